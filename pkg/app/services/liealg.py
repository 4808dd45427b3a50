"""Finite-dimensional graded Lie algebras over Q and their adjoint invariants.

The bracket mu is stored as a full table of structure constants. The half
bracket alpha = mu/2 is the map fed to the Jacobi criterion and to the
structure-coefficient recursion; ``mu_star`` is the adjoint coaction
y -> sum_i e_i* ⊗ [e_i, y].
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from pydantic import ValidationError

from app.models import AlgebraFile, BasisEntry, BracketEntry, TermEntry
from app.services.gvs import (
    GradedSpace,
    LinearMap,
    contract,
    extend_derivation,
    first_jacobi_failure,
    jacobi_witness,
    monomial_basis,
    monomial_product,
    multiply_monomial_vectors,
    sort_with_sign,
)
from app.services.models import CheckResult, PBWError
from app.services.scalar import SparseVector, format_rational, parse_rational

logger = logging.getLogger(__name__)


class SpecError(PBWError):
    """Raised when an algebra description cannot be parsed or is inconsistent."""

    code = "SPEC_ERROR"


class AntisymmetryViolation(PBWError):
    """Raised when the bracket does not kill S^2 V."""

    code = "ANTISYMMETRY_VIOLATION"


class BracketDegreeViolation(PBWError):
    """Raised when a bracket does not preserve degree."""

    code = "BRACKET_DEGREE_VIOLATION"


class JacobiViolation(PBWError):
    """Raised when the graded Jacobi identity fails; ``witness`` is the basis triple."""

    code = "JACOBI_VIOLATION"


@dataclass(slots=True, eq=False)
class LieAlg:
    name: str
    space: GradedSpace
    constants: dict[tuple[int, int], SparseVector]
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        cleaned = ((key, SparseVector(value)) for key, value in self.constants.items())
        self.constants = {key: value for key, value in cleaned if value}

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LieAlg):
            return NotImplemented
        return self.name == other.name and self.space == other.space and self.constants == other.constants

    __hash__ = None

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def names(self) -> tuple[str, ...]:
        return self.space.names

    @property
    def parity(self) -> tuple[int, ...]:
        return self.space.parities

    def index(self, name: str) -> int:
        return self.space.index(name)

    def bracket(self, a: int, b: int) -> SparseVector:
        """[e_a, e_b]; the returned vector is shared and must not be mutated."""

        return self.constants.get((a, b)) or _EMPTY

    def bracket_vectors(self, left: Mapping, right: Mapping) -> SparseVector:
        out = SparseVector()
        for a, x in left.items():
            for b, y in right.items():
                column = self.constants.get((a, b))
                if column:
                    out.iadd_scaled(column, x * y)
        return out

    def bracket_map(self) -> LinearMap:
        keys = tuple(itertools.product(range(self.dim), repeat=2))
        return LinearMap(keys, dict(self.constants), "mu")

    def alpha_map(self) -> LinearMap:
        return self.bracket_map().scaled(Fraction(1, 2))

    def ad_matrix(self, a: int) -> dict[int, SparseVector]:
        return {b: self.bracket(a, b) for b in range(self.dim)}

    def is_abelian(self) -> bool:
        return not self.constants

    def format_vector(self, vector: Mapping) -> str:
        if not vector:
            return "0"
        return " + ".join(f"{format_rational(c)}*{self.names[i]}" for i, c in sorted(vector.items()))


_EMPTY = SparseVector()


def from_brackets(
    name: str,
    basis: Iterable[tuple[str, int]],
    brackets: Mapping[tuple[str, str], Mapping[str, object]],
) -> LieAlg:
    """Build the full bracket table from the listed pairs, filling in [b,a] by antisymmetry."""

    space = GradedSpace.from_pairs(basis)
    parity = space.parities
    constants: dict[tuple[int, int], SparseVector] = {}
    for (left, right), result in brackets.items():
        try:
            a, b = space.index(left), space.index(right)
            value = SparseVector({space.index(k): parse_rational(v) for k, v in result.items()})
        except (KeyError, ValueError) as exc:
            raise SpecError(f"bad bracket [{left},{right}]: {exc}") from exc
        target_degree = space.degrees[a] + space.degrees[b]
        for c in value:
            if space.degrees[c] != target_degree:
                raise BracketDegreeViolation(
                    f"[{left},{right}] has a term {space.names[c]} of degree {space.degrees[c]}, expected {target_degree}",
                    witness=(left, right),
                )
        if a == b and not parity[a] and value:
            raise AntisymmetryViolation(f"[{left},{left}] must vanish for an even vector", witness=(left, left))
        mirror = value.scaled(-1 if parity[a] and parity[b] else 1).scaled(-1)
        for key, vector in (((a, b), value), ((b, a), mirror)):
            if key in constants and constants[key] != vector:
                raise SpecError(
                    f"brackets [{left},{right}] and [{right},{left}] are inconsistent with graded antisymmetry",
                    witness=(left, right),
                )
            constants[key] = vector
    return LieAlg(name=name, space=space, constants=constants)


def from_spec(spec: AlgebraFile) -> LieAlg:
    brackets: dict[tuple[str, str], dict[str, str]] = {}
    for entry in spec.brackets:
        key = (entry.left, entry.right)
        if key in brackets:
            raise SpecError(f"bracket [{entry.left},{entry.right}] listed twice")
        result: dict[str, Fraction] = {}
        for term in entry.result:
            result[term.basis] = result.get(term.basis, Fraction(0)) + parse_rational(term.coeff)
        brackets[key] = result
    return from_brackets(spec.name, [(b.name, b.degree) for b in spec.basis], brackets)


def to_spec(g: LieAlg) -> AlgebraFile:
    """Emit the JSON description; only pairs with a <= b are listed."""

    entries = []
    for (a, b), value in sorted(g.constants.items()):
        if a > b:
            continue
        entries.append(
            BracketEntry(
                left=g.names[a],
                right=g.names[b],
                result=[TermEntry(basis=g.names[c], coeff=format_rational(v)) for c, v in sorted(value.items())],
            )
        )
    return AlgebraFile(
        name=g.name,
        basis=[BasisEntry(name=v.name, degree=v.degree) for v in g.space.basis],
        brackets=entries,
    )


def load_algebra(path: str | Path) -> LieAlg:
    try:
        spec = AlgebraFile.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValidationError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read algebra file {path}: {exc}") from exc
    return validate(from_spec(spec))


def validate(g: LieAlg | AlgebraFile) -> LieAlg:
    """Return the algebra iff the bracket is degree-0, graded antisymmetric and satisfies Jacobi."""

    if isinstance(g, AlgebraFile):
        g = from_spec(g)
    space, parity = g.space, g.parity
    for (a, b), value in g.constants.items():
        for c in value:
            if space.degrees[c] != space.degrees[a] + space.degrees[b]:
                raise BracketDegreeViolation(
                    f"[{g.names[a]},{g.names[b]}] leaves degree {space.degrees[a] + space.degrees[b]}",
                    witness=(g.names[a], g.names[b]),
                )
    for a in range(g.dim):
        for b in range(a, g.dim):
            sign = -1 if parity[a] and parity[b] else 1
            if g.bracket(a, b) + g.bracket(b, a).scaled(sign):
                raise AntisymmetryViolation(
                    f"[{g.names[a]},{g.names[b]}] is not graded antisymmetric",
                    witness=(g.names[a], g.names[b]),
                )
    classical = first_jacobi_failure(g.bracket_map(), space)
    witness_map = jacobi_witness(g.alpha_map(), space)
    if (classical is None) != (witness_map is not None):
        raise JacobiViolation(f"{g.name}: Jacobiator and the Psi_3 criterion disagree", witness=classical)
    if classical is not None:
        logger.warning("%s violates Jacobi at %s", g.name, classical)
        raise JacobiViolation(f"{g.name}: Jacobi identity fails at {classical}", witness=classical)
    return g


# -- adjoint coaction and its bullet powers ----------------------------------------


@dataclass(slots=True)
class DualElem:
    """Element of S^k(V*) keyed by sorted tuples of dual basis positions."""

    degree: int
    terms: SparseVector = field(default_factory=SparseVector)

    def __post_init__(self) -> None:
        self.terms = SparseVector(self.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, DualElem):
            return self.terms == other.terms
        if isinstance(other, Mapping):
            return self.terms == SparseVector(other)
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def format(self, names: Sequence[str]) -> str:
        if not self.terms:
            return "0"
        parts = []
        for monomial, coeff in sorted(self.terms.items()):
            word = "·".join(f"{names[i]}*" for i in monomial) or "1"
            parts.append(f"{format_rational(coeff)}*{word}")
        return " + ".join(parts)


def mu_star(g: LieAlg) -> LinearMap:
    """V -> V*⊗V, y -> sum_i e_i* ⊗ [e_i, y], keyed by ((i,), t)."""

    def _column(y: int) -> SparseVector:
        out = SparseVector()
        for i in range(g.dim):
            for t, c in g.bracket(i, y).items():
                out.add_term(((i,), t), c)
        return out

    return LinearMap.from_function(range(g.dim), _column, "mu*")


def _bullet_step(g: LieAlg, vector: Mapping) -> SparseVector:
    """f ⊗ t -> sum_i (f·e_i*) ⊗ [e_i, t]."""

    out = SparseVector()
    for (monomial, t), coeff in vector.items():
        for i in range(g.dim):
            image = g.bracket(i, t)
            if not image:
                continue
            sign, new_monomial = monomial_product(monomial, (i,), g.parity)
            if not sign:
                continue
            for t2, c2 in image.items():
                out.add_term((new_monomial, t2), sign * coeff * c2)
    return out


def bullet_power(g: LieAlg, k: int) -> LinearMap:
    """(mu*)^{•k}: y -> sum e*_{i1}...e*_{ik} ⊗ [e_ik,[...,[e_i1, y]]]."""

    if k < 1:
        raise ValueError("bullet power needs k >= 1")
    key = ("bullet_power", k)
    if key not in g.cache:
        if k == 1:
            g.cache[key] = mu_star(g)
        else:
            previous = bullet_power(g, k - 1)
            g.cache[key] = LinearMap.from_function(
                range(g.dim), lambda y: _bullet_step(g, previous.column(y)), f"(mu*)^{k}"
            )
    return g.cache[key]


def nu(g: LieAlg, k: int) -> DualElem:
    """Graded trace of (mu*)^{•k}: the invariant form sum ±Tr(ad...ad) e*...e*."""

    key = ("nu", k)
    if key not in g.cache:
        power = bullet_power(g, k)
        out = SparseVector()
        for j in range(g.dim):
            sign = -1 if g.parity[j] else 1
            for (monomial, t), coeff in power.column(j).items():
                if t == j:
                    out.add_term(monomial, sign * coeff)
        g.cache[key] = DualElem(k, out)
    return g.cache[key]


def polarized_value(g: LieAlg, form: DualElem | Mapping, vectors: Sequence[str | int]) -> Fraction:
    """f(x_1, ..., x_k) = c_k(x_1...x_k ⊗ f) / k!."""

    terms = form.terms if isinstance(form, DualElem) else form
    letters = tuple(g.index(v) if isinstance(v, str) else v for v in vectors)
    sign, monomial = sort_with_sign(letters, g.parity)
    if not sign:
        return Fraction(0)
    value = contract({monomial: 1}, terms, g.parity).get((), Fraction(0))
    return sign * value / factorial(len(letters))


def bullet_epsilon_check(g: LieAlg, p: int) -> bool:
    """(mu*)^{•p} • epsilon == 0, epsilon = sum_i e_i* ⊗ e_i."""

    if p < 1:
        raise ValueError("p must be >= 1")
    current = SparseVector({((i,), i): 1 for i in range(g.dim)})
    for _ in range(p):
        current = _bullet_step(g, current)
    return not current


def coadjoint(g: LieAlg, z: int, form: Mapping) -> SparseVector:
    """Action of e_z on S(V*) extending z·e_j* = -(-1)^{|z||j|} sum_i c^j_{z,i} e_i*."""

    parity = g.parity

    def _image(j: int) -> SparseVector:
        sign = -1 if parity[z] and parity[j] else 1
        out = SparseVector()
        for i in range(g.dim):
            c = g.bracket(z, i).get(j)
            if c:
                out.add_term(i, -sign * c)
        return out

    return extend_derivation(form, _image, parity[z], parity)


def invariance_check(g: LieAlg, form: DualElem | Mapping, label: str = "form") -> CheckResult:
    terms = form.terms if isinstance(form, DualElem) else form
    for z in range(g.dim):
        if coadjoint(g, z, terms):
            return CheckResult.failed(f"{label}_invariance", witness=g.names[z])
    return CheckResult.passed(f"{label}_invariance")


def snake_check(g: LieAlg) -> CheckResult:
    """Recontracting mu*(y) against v recovers [v, y]."""

    star = mu_star(g)
    for v in range(g.dim):
        for y in range(g.dim):
            recovered = SparseVector()
            for (monomial, t), coeff in star.column(y).items():
                if monomial == (v,):
                    recovered.add_term(t, coeff)
            if recovered != g.bracket(v, y):
                return CheckResult.failed("snake", witness=(g.names[v], g.names[y]))
    return CheckResult.passed("snake")


def contraction_composition_check(g: LieAlg, n: int, p: int, q: int) -> CheckResult:
    """c_q(c_p(s ⊗ f) ⊗ h) == c_{p+q}(s ⊗ f·h) on basis monomials."""

    parity = g.parity
    for s in monomial_basis(parity, n):
        for f in monomial_basis(parity, p):
            for h in monomial_basis(parity, q):
                left = contract(contract({s: 1}, {f: 1}, parity), {h: 1}, parity)
                right = contract({s: 1}, multiply_monomial_vectors({f: 1}, {h: 1}, parity), parity)
                if left != right:
                    return CheckResult.failed("contraction_composition", witness=(s, f, h))
    return CheckResult.passed("contraction_composition", detail=f"n={n} p={p} q={q}")


def corollary_check(g: LieAlg, n: int, p: int) -> CheckResult:
    """omega^{∘p} == (c_p ⊗ id)∘(id ⊗ (mu*)^{•p}) on S^n V ⊗ V."""

    from app.services.ualg import omega_power

    power = omega_power(g, n, p)
    bullets = bullet_power(g, p)
    for s in monomial_basis(g.parity, n):
        for y in range(g.dim):
            expected = SparseVector()
            for (monomial, t), coeff in bullets.column(y).items():
                for rest, value in contract({s: 1}, {monomial: 1}, g.parity).items():
                    expected.add_term((rest, t), coeff * value)
            if power.column((s, y)) != expected:
                return CheckResult.failed("omega_via_bullets", witness=(g.space.format_monomial(s), g.names[y]))
    return CheckResult.passed("omega_via_bullets", detail=f"n={n} p={p}")


def trace_identity_check(g: LieAlg, n: int, p: int) -> bool:
    """sum_i ±c_1(m0 omega^p(s ⊗ e_i) ⊗ e_i*) == c_p(s ⊗ nu_p) for s in S^n V."""

    if not n >= p >= 1:
        raise ValueError("need n >= p >= 1")
    from app.services.ualg import omega_power

    power = omega_power(g, n, p)
    parity = g.parity
    form = nu(g, p).terms
    for s in monomial_basis(parity, n):
        left = SparseVector()
        for i in range(g.dim):
            merged = SparseVector()
            for (rest, t), coeff in power.column((s, i)).items():
                sign, monomial = monomial_product(rest, (t,), parity)
                if sign:
                    merged.add_term(monomial, sign * coeff)
            left.iadd_scaled(contract(merged, {(i,): 1}, parity), -1 if parity[i] else 1)
        if left != contract({s: 1}, form, parity):
            logger.warning("trace identity fails for %s at %s", g.name, s)
            return False
    return True
