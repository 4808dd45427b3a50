"""Tame triples (g, h, n) and the g-module structure on U(n).

A triple splits the basis of g into a subalgebra h and a complement n. When
[h, n] ⊆ n and [pi_h[n, n], n] = 0 the projected bracket alpha = pi_n ∘ mu makes
n a Lie algebra, and U(n), realised as S(n) with the induced star product,
becomes a g-module: n acts by left star multiplication, h by the derivation
extending ad_h.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from pydantic import ValidationError

from app.models import TripleFile
from app.services.gvs import (
    exact_nullspace,
    exact_rank,
    extend_derivation,
    monomial_basis,
)
from app.services.liealg import LieAlg, SpecError, from_brackets, from_spec, validate
from app.services.models import CheckResult, PBWError
from app.services.scalar import SparseVector, format_rational
from app.services.ualg import TruncationOverflow, star_vectors, sym_to_uenv

logger = logging.getLogger(__name__)


class MalformedPartition(PBWError):
    """Raised when the two name lists do not partition the ambient basis."""

    code = "MALFORMED_PARTITION"


class ReductiveRequired(PBWError):
    """Raised when an operation needs [h, h] ⊆ h and [h, n] ⊆ n."""

    code = "REDUCTIVE_REQUIRED"


class TamenessRequired(PBWError):
    """Raised when an operation needs a tame triple."""

    code = "TAMENESS_REQUIRED"


@dataclass(slots=True)
class TripleSpec:
    ambient: LieAlg
    sub: tuple[int, ...]
    complement: tuple[int, ...]
    name: str = ""
    cache: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_names(
        cls,
        ambient: LieAlg,
        sub: Sequence[str],
        complement: Sequence[str],
        name: str = "",
    ) -> "TripleSpec":
        try:
            sub_idx = tuple(ambient.index(n) for n in sub)
            comp_idx = tuple(ambient.index(n) for n in complement)
        except KeyError as exc:
            raise MalformedPartition(str(exc)) from exc
        listed = sub_idx + comp_idx
        if len(set(listed)) != len(listed) or set(listed) != set(range(ambient.dim)):
            raise MalformedPartition(
                f"{list(sub)} and {list(complement)} do not partition {list(ambient.names)}",
                witness=sorted(set(ambient.names) ^ set(sub) ^ set(complement)),
            )
        # keep the ambient basis order inside each half
        return cls(ambient, tuple(sorted(sub_idx)), tuple(sorted(comp_idx)), name or ambient.name)

    @property
    def sub_names(self) -> tuple[str, ...]:
        return tuple(self.ambient.names[i] for i in self.sub)

    @property
    def complement_names(self) -> tuple[str, ...]:
        return tuple(self.ambient.names[i] for i in self.complement)

    def local(self, index: int) -> int:
        """Position of an n basis vector inside the complement."""

        return self.complement.index(index)

    def project_h(self, vector: Mapping[int, object]) -> SparseVector:
        return SparseVector((i, c) for i, c in vector.items() if i in self.sub)

    def project_n(self, vector: Mapping[int, object]) -> SparseVector:
        return SparseVector((i, c) for i, c in vector.items() if i in self.complement)


def triple_from_spec(spec: TripleFile) -> TripleSpec:
    return TripleSpec.from_names(validate(from_spec(spec)), spec.subalgebra, spec.complement, spec.name)


def load_triple(path: str | Path) -> TripleSpec:
    try:
        spec = TripleFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValidationError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read triple file {path}: {exc}") from exc
    return triple_from_spec(spec)


# -- predicates ----------------------------------------------------------------------


def check_reductive(t: TripleSpec) -> CheckResult:
    """h closed under the bracket and [h, n] ⊆ n; the witness is the first offending pair."""

    g = t.ambient
    for a in t.sub:
        for b in t.sub:
            if t.project_n(g.bracket(a, b)):
                return CheckResult.failed("reductive", witness=(g.names[a], g.names[b]), detail="h is not a subalgebra")
    for h in t.sub:
        for n in t.complement:
            if t.project_h(g.bracket(h, n)):
                return CheckResult.failed("reductive", witness=(g.names[h], g.names[n]), detail="[h, n] leaves n")
    return CheckResult.passed("reductive")


def _beta(t: TripleSpec, a: int, b: int) -> SparseVector:
    return t.project_h(t.ambient.bracket(a, b))


def check_tame(t: TripleSpec) -> CheckResult:
    """[beta(n1, n2), n3] == 0 on every basis triple of n."""

    reductive = check_reductive(t)
    if not reductive:
        raise ReductiveRequired(f"{t.name} is not reductive", witness=reductive.witness)
    g = t.ambient
    for n1 in t.complement:
        for n2 in t.complement:
            beta = _beta(t, n1, n2)
            if not beta:
                continue
            for n3 in t.complement:
                if g.bracket_vectors(beta, {n3: 1}):
                    witness = (g.names[n1], g.names[n2], g.names[n3])
                    logger.info("%s is not tame: witness %s", t.name, witness)
                    return CheckResult.failed("tame", witness=witness)
    return CheckResult.passed("tame")


def _require_tame(t: TripleSpec) -> None:
    tame = check_tame(t)
    if not tame:
        raise TamenessRequired(f"{t.name} is not tame", witness=tame.witness)


def _projected_algebra(t: TripleSpec) -> LieAlg:
    g = t.ambient
    basis = [(g.names[i], g.space.degrees[i]) for i in t.complement]
    brackets = {}
    for a in t.complement:
        for b in t.complement:
            value = t.project_n(g.bracket(a, b))
            if value and a <= b:
                brackets[(g.names[a], g.names[b])] = {g.names[c]: v for c, v in value.items()}
    return from_brackets(f"{t.name}/n", basis, brackets)


def induced_bracket(t: TripleSpec) -> LieAlg:
    """alpha = pi_n ∘ mu on n, re-validated as a Lie algebra."""

    _require_tame(t)
    if "induced" not in t.cache:
        t.cache["induced"] = validate(_projected_algebra(t))
    return t.cache["induced"]


# -- the g-module U(n) ---------------------------------------------------------------


@dataclass(slots=True)
class UnModule:
    """g acting on S^{<=trunc}(n) ≅ U(n)."""

    triple: TripleSpec
    algebra: LieAlg
    trunc: int

    def act(self, z: int, vector: Mapping) -> SparseVector:
        """Action of the ambient basis vector z."""

        t = self.triple
        if z in t.complement:
            out = star_vectors(self.algebra, {(t.local(z),): 1}, vector)
        else:
            out = self.derivation(z, vector)
        top = max((len(m) for m in out), default=0)
        if top > self.trunc:
            raise TruncationOverflow(f"action leaves S^<={self.trunc}(n)", witness=self.triple.ambient.names[z])
        return out

    def derivation(self, h: int, vector: Mapping) -> SparseVector:
        t = self.triple
        g = t.ambient

        def _image(j: int) -> SparseVector:
            return SparseVector((t.local(c), v) for c, v in g.bracket(h, t.complement[j]).items())

        return extend_derivation(vector, _image, g.parity[h], self.algebra.parity)

    def act_vector(self, element: Mapping[int, object], vector: Mapping) -> SparseVector:
        out = SparseVector()
        for z, c in element.items():
            out.iadd_scaled(self.act(z, vector), c)
        return out

    def act_word(self, word: Sequence[int], vector: Mapping) -> SparseVector:
        """w_1 (w_2 (... (w_k · v)))."""

        current = SparseVector(vector)
        for z in reversed(word):
            current = self.act(z, current)
            if not current:
                break
        return current


def g_module_on_Un(t: TripleSpec, trunc: int) -> UnModule:
    _require_tame(t)
    return UnModule(t, induced_bracket(t), trunc)


def module_axiom_report(t: TripleSpec, trunc: int) -> list[CheckResult]:
    """a·(b·u) - ±b·(a·u) == [a, b]·u, split by where a and b live.

    Tameness is not required, so a non-tame triple reports its failing block.
    """

    reductive = check_reductive(t)
    if not reductive:
        raise ReductiveRequired(f"{t.name} is not reductive", witness=reductive.witness)
    g = t.ambient
    module = UnModule(t, _projected_algebra(t), trunc)
    parity = g.parity
    test_vectors = [m for k in range(max(trunc - 1, 0)) for m in monomial_basis(module.algebra.parity, k)]
    blocks = {
        "nn": [(a, b) for a in t.complement for b in t.complement],
        "nh": [(a, b) for a in t.complement for b in t.sub],
        "hh": [(a, b) for a in t.sub for b in t.sub],
    }
    results = []
    for label, pairs in blocks.items():
        witness = None
        for a, b in pairs:
            sign = -1 if parity[a] and parity[b] else 1
            bracket = g.bracket(a, b)
            for u in test_vectors:
                left = module.act(a, module.act(b, {u: 1})) - module.act(b, module.act(a, {u: 1})).scaled(sign)
                if left != module.act_vector(bracket, {u: 1}):
                    witness = (g.names[a], g.names[b], module.algebra.space.format_monomial(u))
                    break
            if witness:
                break
        name = f"module_axiom_{label}"
        results.append(CheckResult.passed(name) if witness is None else CheckResult.failed(name, witness=witness))
    return results


# -- the section delta and the kernel ------------------------------------------------


def _ambient_monomial(t: TripleSpec, monomial: Sequence[int]) -> tuple[int, ...]:
    return tuple(t.complement[i] for i in monomial)


def _dim_upto(parity: Sequence[int], p: int) -> int:
    return sum(len(monomial_basis(parity, k)) for k in range(p + 1))


def kernel_dimensions(t: TripleSpec, trunc: int) -> list[int]:
    """dim of the kernel of U(g)_{<=p} -> U(n), u -> u·1, for p = 0..trunc."""

    module = g_module_on_Un(t, trunc)
    parity = t.ambient.parity
    dims = []
    for p in range(trunc + 1):
        words = [w for k in range(p + 1) for w in monomial_basis(parity, k)]
        images = [module.act_word(w, {(): 1}) for w in words]
        dims.append(len(words) - exact_rank(images))
    logger.debug("%s kernel dimensions %s", t.name, dims)
    return dims


def delta_section_check(t: TripleSpec, trunc: int) -> CheckResult:
    """U(n) -> U(g) -> U(n) is the identity, and the kernel has the PBW size."""

    module = g_module_on_Un(t, trunc)
    g = t.ambient
    n_parity = module.algebra.parity
    for k in range(trunc + 1):
        for m in monomial_basis(n_parity, k):
            image = SparseVector()
            for word, c in sym_to_uenv(g, {_ambient_monomial(t, m): 1}).items():
                image.iadd_scaled(module.act_word(word, {(): 1}), c)
            if image != SparseVector({m: 1}):
                return CheckResult.failed("delta_section", witness=module.algebra.space.format_monomial(m))
    kernel = kernel_dimensions(t, trunc)
    h_dim = len(t.sub)
    exact = h_dim == 1 and not any(g.parity[i] for i in t.sub)
    for p in range(2, trunc + 1):
        expected = _dim_upto(g.parity, p) - _dim_upto(n_parity, p)
        if kernel[p] != expected:
            return CheckResult.failed("delta_section", witness=("kernel", p), detail=f"{kernel[p]} != {expected}")
        bound = h_dim * _dim_upto(g.parity, p - 1)
        if (exact and expected != bound) or expected > bound:
            return CheckResult.failed("delta_section", witness=("dimension", p), detail=f"{expected} vs {bound}")
    return CheckResult.passed("delta_section", detail=f"kernel dimensions {kernel}")


# -- invariants and the anti-morphism ------------------------------------------------


def invariants(t: TripleSpec, trunc: int) -> list[SparseVector]:
    """Homogeneous basis of the h-invariants of S^{<=trunc}(n)."""

    module = g_module_on_Un(t, trunc)
    out = []
    for k in range(trunc + 1):
        basis = monomial_basis(module.algebra.parity, k)
        columns = []
        for m in basis:
            column = SparseVector()
            for h in t.sub:
                for monomial, value in module.derivation(h, {m: 1}).items():
                    column.add_term((h, monomial), value)
            columns.append(column)
        for vector in exact_nullspace(columns):
            out.append(SparseVector(zip(basis, vector)))
    logger.debug("%s has %d invariants up to degree %d", t.name, len(out), trunc)
    return out


def _degree(vector: Mapping) -> int:
    return max((len(m) for m in vector), default=0)


def _right_multiplication_check(t: TripleSpec, module: UnModule, P: SparseVector) -> tuple | None:
    """f(P) = u -> u ⋆ P must be the action of delta(u) on P and commute with h."""

    n_alg = module.algebra
    room = module.trunc - _degree(P)
    for k in range(room + 1):
        for u in monomial_basis(n_alg.parity, k):
            image = star_vectors(n_alg, {u: 1}, P)
            acted = SparseVector()
            for word, c in sym_to_uenv(t.ambient, {_ambient_monomial(t, u): 1}).items():
                acted.iadd_scaled(module.act_word(word, P), c)
            if acted != image:
                return ("module action", n_alg.space.format_monomial(u))
            for h in t.sub:
                moved = star_vectors(n_alg, module.derivation(h, {u: 1}), P)
                if module.derivation(h, image) != moved:
                    return ("not equivariant", t.ambient.names[h], n_alg.space.format_monomial(u))
    return None


def antimorphism_check(t: TripleSpec, trunc: int, candidates: Sequence[Mapping] | None = None) -> CheckResult:
    """P -> f(P) = right star multiplication by P is an anti-morphism into End_g(U(n)).

    Every candidate must give a g-module endomorphism that agrees with the
    action of delta(u) on P, and f(P ⋆ Q) == f(Q) ∘ f(P). The candidates default
    to the h-invariants of positive degree.
    """

    module = g_module_on_Un(t, trunc)
    n_alg = module.algebra
    if candidates is None:
        found = [v for v in invariants(t, trunc) if _degree(v) >= 1]
    else:
        found = [SparseVector(v) for v in candidates]
    for P in found:
        witness = _right_multiplication_check(t, module, P)
        if witness is not None:
            return CheckResult.failed("antimorphism", witness=(*witness, _text(n_alg, P)))
    for P in found:
        for Q in found:
            room = trunc - _degree(P) - _degree(Q)
            if room < 0:
                continue
            product = star_vectors(n_alg, P, Q)
            for k in range(room + 1):
                for u in monomial_basis(n_alg.parity, k):
                    left = star_vectors(n_alg, {u: 1}, product)
                    right = star_vectors(n_alg, star_vectors(n_alg, {u: 1}, P), Q)
                    if left != right:
                        return CheckResult.failed("antimorphism", witness=(_text(n_alg, P), _text(n_alg, Q)))
    return CheckResult.passed("antimorphism", detail=f"{len(found)} endomorphisms")


def _text(g: LieAlg, vector: Mapping) -> str:
    return " + ".join(f"{format_rational(c)}*{g.space.format_monomial(m)}" for m, c in sorted(vector.items()))


def tame_report(t: TripleSpec, trunc: int) -> dict[str, object]:
    """Everything the command line prints for a triple."""

    report: dict[str, object] = {}
    reductive = check_reductive(t)
    report["reductive"] = reductive.ok
    if not reductive:
        report["witness"] = reductive.witness
        return report
    tame = check_tame(t)
    report["tame"] = tame.ok
    axioms = module_axiom_report(t, trunc)
    report["module_axioms"] = all(axioms)
    if not tame:
        report["witness"] = tame.witness
        report["failing_axioms"] = [r.name for r in axioms if not r]
        return report
    report["section"] = delta_section_check(t, trunc).ok
    report["antimorphism"] = antimorphism_check(t, trunc).ok
    return report


def checks_for(t: TripleSpec, trunc: int) -> Iterable[CheckResult]:
    reductive = check_reductive(t)
    yield reductive
    if not reductive:
        return
    tame = check_tame(t)
    yield tame
    yield from module_axiom_report(t, trunc)
    if not tame:
        return
    try:
        induced_bracket(t)
        yield CheckResult.passed("induced_bracket_jacobi")
    except PBWError as exc:
        yield CheckResult.failed("induced_bracket_jacobi", witness=exc.witness, detail=str(exc))
    yield delta_section_check(t, trunc)
    yield antimorphism_check(t, trunc)

