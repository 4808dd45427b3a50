"""Duflo element, the universal polynomials P_k and l-torsion morphisms.

P_k is the degree-k part of prod_n x_n/(1-e^{-x_n}) written in the power sums
y_i = sum_n x_n^i; the Duflo element is d_p = P_p(nu_1, ..., nu_p) with the
products taken in S(V*).

Two torsion solvers live here. ``torsion_solve`` runs the downward recursion in
the inverse Todd coefficients and compares it with the closed form
c(d ⊗ a_l). ``exact_torsion_solve`` instead solves, degree by degree, for the
lower components that make m_star ∘ (a ⊗ id_V) land in S^{l+1}V. The two do
not agree in general; the comparison is reported, never patched over.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Mapping

import sympy
from sympy.polys.polyfuncs import symmetrize

from app.models import TopFile
from app.services.gvs import (
    LinearMap,
    contract,
    exact_nullspace,
    exact_solve,
    extend_derivation,
    from_sympy,
    monomial_basis,
    monomial_product,
    multiply_monomial_vectors,
    sort_with_sign,
    to_sympy,
)
from app.services.liealg import DualElem, LieAlg, SpecError, invariance_check, nu
from app.services.models import CheckResult, PBWError
from app.services.scalar import (
    SparseVector,
    binomial_half,
    format_rational,
    inverse_todd_coefficient,
    todd_coefficient,
)
from app.services.ualg import (
    UEnvElem,
    omega_power,
    parse_monomial,
    star_vectors,
    sym_to_uenv,
    uenv_multiply,
)

logger = logging.getLogger(__name__)


class TruncationTooSmall(PBWError):
    """Raised when the requested level does not fit below the truncation."""

    code = "TRUNCATION_TOO_SMALL"


# -- the polynomials P_k ----------------------------------------------------------


def power_sum_symbols(k: int) -> tuple[sympy.Symbol, ...]:
    return tuple(sympy.Symbol(f"y{i}") for i in range(1, k + 1))


@lru_cache(maxsize=None)
def p_polynomial(k: int) -> sympy.Expr:
    """P_k(y_1, ..., y_k), exact."""

    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return sympy.Integer(1)
    xs = sympy.symbols(f"x1:{k + 1}")
    # degree-k part of the product: one Todd coefficient per variable
    homogeneous = sympy.Integer(0)
    for exponents in _weak_compositions(k, k):
        coeff = sympy.Integer(1)
        for e in exponents:
            coeff *= to_sympy(todd_coefficient(e))
            if not coeff:
                break
        if coeff:
            homogeneous += coeff * sympy.Mul(*(x**e for x, e in zip(xs, exponents)))
    elementary_form, remainder, elementary = symmetrize(sympy.expand(homogeneous), *xs, formal=True)
    if remainder != 0:
        raise PBWError(f"degree-{k} Todd product is not symmetric")
    ys = power_sum_symbols(k)
    e_in_y = [sympy.Integer(1)]
    for m in range(1, k + 1):
        e_in_y.append(sympy.expand(sum((-1) ** (i - 1) * e_in_y[m - i] * ys[i - 1] for i in range(1, m + 1)) / m))
    substitution = {symbol: e_in_y[sympy.Poly(poly, *xs).total_degree()] for symbol, poly in elementary}
    result = sympy.expand(elementary_form.subs(substitution, simultaneous=True))
    logger.debug("P_%d = %s", k, result)
    return result


def _weak_compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def bernoulli_recursion_check(k: int) -> bool:
    """k P_k + sum_i b_i y_i P_{k-i} == 0 with b_i the coefficients of x/(e^x-1)."""

    if k < 1:
        raise ValueError("k must be >= 1")
    ys = power_sum_symbols(k)
    expr = k * p_polynomial(k)
    for i in range(1, k + 1):
        expr += to_sympy(inverse_todd_coefficient(i)) * ys[i - 1] * p_polynomial(k - i)
    return sympy.expand(expr) == 0


# -- the Duflo element -------------------------------------------------------------


@dataclass(slots=True)
class DufloElement:
    algebra: LieAlg
    trunc: int
    components: list[DualElem] = field(default_factory=list)

    def component(self, p: int) -> DualElem:
        return self.components[p]

    def to_records(self) -> dict[str, dict[str, str]]:
        names = self.algebra.names
        return {
            str(p): {_dual_key(names, m): format_rational(c) for m, c in sorted(d.terms.items())}
            for p, d in enumerate(self.components)
        }


def _dual_key(names, monomial) -> str:
    if not monomial:
        return "1"
    parts = []
    for letter, group in itertools.groupby(monomial):
        power = len(list(group))
        parts.append(f"{names[letter]}*" if power == 1 else f"{names[letter]}*^{power}")
    return " ".join(parts)


def _power(terms: Mapping, exponent: int, parity) -> SparseVector:
    out = SparseVector({(): 1})
    for _ in range(exponent):
        out = multiply_monomial_vectors(out, terms, parity)
    return out


def evaluate_on_nu(g: LieAlg, expr: sympy.Expr, k: int) -> SparseVector:
    """Substitute y_i -> nu_i in a polynomial and expand in S(V*)."""

    if k == 0:
        return SparseVector({(): from_sympy(expr)})
    parity = g.parity
    out = SparseVector()
    for exponents, coeff in sympy.Poly(expr, *power_sum_symbols(k)).terms():
        term = SparseVector({(): from_sympy(coeff)})
        for i, e in enumerate(exponents, start=1):
            if e:
                term = multiply_monomial_vectors(term, _power(nu(g, i).terms, e, parity), parity)
        out.iadd_scaled(term)
    return out


def duflo_element(g: LieAlg, trunc: int) -> DufloElement:
    if trunc < 0:
        raise ValueError("truncation must be non-negative")
    key = ("duflo", trunc)
    if key not in g.cache:
        components = [DualElem(p, evaluate_on_nu(g, p_polynomial(p), p)) for p in range(trunc + 1)]
        g.cache[key] = DufloElement(g, trunc, components)
    return g.cache[key]


def duflo_invariance_check(g: LieAlg, trunc: int) -> list[CheckResult]:
    d = duflo_element(g, trunc)
    return [invariance_check(g, d.component(p), f"duflo_{p}") for p in range(1, trunc + 1)]


def duflo_sqrt(d: DufloElement) -> list[DualElem]:
    """sqrt(d) = sum_j (1/2 choose j) (d - 1)^j, truncated at the degree of d."""

    parity = d.algebra.parity
    trunc = d.trunc
    shifted = SparseVector()
    for component in d.components[1:]:
        shifted.iadd_scaled(component.terms)
    total = SparseVector({(): 1})
    power = SparseVector({(): 1})
    for j in range(1, trunc + 1):
        power = SparseVector(
            (m, c) for m, c in multiply_monomial_vectors(power, shifted, parity).items() if len(m) <= trunc
        )
        if not power:
            break
        total.iadd_scaled(power, binomial_half(j))
    return [
        DualElem(p, SparseVector((m, c) for m, c in total.items() if len(m) == p)) for p in range(trunc + 1)
    ]


def duflo_map(g: LieAlg, c: Mapping, trunc: int) -> UEnvElem:
    """c -> sym(c(c ⊗ sqrt d)) in U(g)."""

    root = duflo_sqrt(duflo_element(g, trunc))
    twisted = SparseVector()
    for component in root:
        twisted.iadd_scaled(contract(c, component.terms, g.parity))
    return UEnvElem(g, sym_to_uenv(g, twisted))


def invariant_polynomials(g: LieAlg, k: int) -> list[SparseVector]:
    """Basis of the g-invariants in S^k(g), from the kernel of the stacked adjoint action."""

    parity = g.parity
    basis = monomial_basis(parity, k)
    columns = []
    for m in basis:
        column = SparseVector()
        for z in range(g.dim):
            image = extend_derivation({m: 1}, lambda j, z=z: g.bracket(z, j), parity[z], parity)
            for monomial, value in image.items():
                column.add_term((z, monomial), value)
        columns.append(column)
    kernel = exact_nullspace(columns)
    logger.debug("%s has %d invariants in degree %d", g.name, len(kernel), k)
    return [SparseVector(zip(basis, vector)) for vector in kernel]


def is_central(g: LieAlg, u: UEnvElem) -> bool:
    """u commutes with every basis vector (u is assumed even)."""

    for z in range(g.dim):
        e = {(z,): 1}
        if uenv_multiply(g, u.terms, e) != uenv_multiply(g, e, u.terms):
            return False
    return True


def central_image_check(g: LieAlg, max_degree: int = 2) -> CheckResult:
    """Every invariant of degree <= max_degree goes to the centre of U(g) under the Duflo map."""

    for k in range(1, max_degree + 1):
        for invariant in invariant_polynomials(g, k):
            if not is_central(g, duflo_map(g, invariant, max_degree)):
                return CheckResult.failed("duflo_central", witness=g.space.format_monomial(max(invariant)))
    return CheckResult.passed("duflo_central", detail=f"invariants of degree <= {max_degree}")


# -- torsion morphisms --------------------------------------------------------------


@dataclass(slots=True)
class TorsionMorphism:
    """a = a_0 + ... + a_l, each a_k a map from the labels of X into S^k V."""

    algebra: LieAlg
    level: int
    components: list[LinearMap]
    closed_form_matches: bool = True
    defects: dict = field(default_factory=dict)

    @property
    def is_torsion(self) -> bool:
        return not self.defects

    def column(self, label: Hashable) -> SparseVector:
        out = SparseVector()
        for component in self.components:
            out.iadd_scaled(component.column(label))
        return out

    def labels(self) -> tuple:
        return self.components[self.level].source

    def to_records(self) -> dict[str, dict[str, dict[str, str]]]:
        g = self.algebra
        records = {}
        for k, component in enumerate(self.components):
            records[str(k)] = {
                _label_text(g, label): {g.space.format_monomial(m): format_rational(c) for m, c in component.column(label).items()}
                for label in component.source
            }
        return records


def _label_text(g: LieAlg, label: Hashable) -> str:
    if isinstance(label, tuple):
        return g.space.format_word(label)
    return str(label)


def projection_top(g: LieAlg, ell: int) -> LinearMap:
    """a_l = pi_l: V^{⊗l} -> S^l V."""

    def _column(word):
        sign, monomial = sort_with_sign(word, g.parity)
        return {monomial: sign} if sign else {}

    return LinearMap.from_function(g.space.words(ell), _column, f"pi_{ell}")


def top_from_file(g: LieAlg, top: TopFile) -> LinearMap:
    columns = {}
    for entry in top.entries:
        column = SparseVector()
        for term in entry.value:
            try:
                sign, monomial = parse_monomial(g, term["monomial"])
                coeff = Fraction(term.get("coeff", "1"))
            except (KeyError, ValueError) as exc:
                raise SpecError(f"bad top component for {entry.label}: {exc}") from exc
            if len(monomial) != top.ell:
                raise SpecError(f"{term['monomial']} is not of degree {top.ell}", witness=entry.label)
            if sign:
                column.add_term(monomial, sign * coeff)
        columns[entry.label] = column
    return LinearMap(tuple(columns), columns, f"a_{top.ell}")


def _contract_map(a: LinearMap, form: Mapping, parity) -> LinearMap:
    return LinearMap(a.source, {x: contract(col, form, parity) for x, col in a.columns.items()})


def closed_form(g: LieAlg, ell: int, top: LinearMap) -> list[LinearMap]:
    """a_{l-p} = c_p(a_l ⊗ d_p)."""

    d = duflo_element(g, ell)
    return [_contract_map(top, d.component(ell - k).terms, g.parity) for k in range(ell + 1)]


def torsion_defects(g: LieAlg, components: list[LinearMap]) -> dict[tuple[str, str], dict[str, str]]:
    """Graded pieces of a ⋆ y below S^{l+1}V, keyed by (label, y)."""

    ell = len(components) - 1
    defects = {}
    for label in components[ell].source:
        total = SparseVector()
        for component in components:
            total.iadd_scaled(component.column(label))
        for y in range(g.dim):
            product = star_vectors(g, total, {(y,): 1})
            low = SparseVector((m, c) for m, c in product.items() if len(m) <= ell)
            if low:
                defects[(_label_text(g, label), g.names[y])] = {
                    g.space.format_monomial(m): format_rational(c) for m, c in sorted(low.items())
                }
    return defects


def torsion_solve(g: LieAlg, ell: int, top: LinearMap, trunc: int) -> TorsionMorphism:
    """Downward recursion a_{l-k} = -(1/k) sum_i b_i c_i(a_{l-k+i} ⊗ nu_i)."""

    if ell < 0:
        raise ValueError("level must be non-negative")
    if ell > trunc - 1:
        raise TruncationTooSmall(f"level {ell} needs truncation >= {ell + 1}, got {trunc}", witness=ell)
    parity = g.parity
    components: list[LinearMap | None] = [None] * (ell + 1)
    components[ell] = top
    for k in range(1, ell + 1):
        columns = {x: SparseVector() for x in top.source}
        for i in range(1, k + 1):
            coeff = inverse_todd_coefficient(i)
            if not coeff:
                continue
            form = nu(g, i).terms
            for x in top.source:
                columns[x].iadd_scaled(contract(components[ell - k + i].column(x), form, parity), -coeff / k)
        components[ell - k] = LinearMap(top.source, columns, f"a_{ell - k}")
    matches = closed_form(g, ell, top) == components
    if not matches:
        logger.warning("torsion recursion and closed form disagree for %s at level %d", g.name, ell)
    defects = torsion_defects(g, components)
    if defects:
        logger.info("%s: recursion output at level %d is not torsion (%d defects)", g.name, ell, len(defects))
    return TorsionMorphism(g, ell, components, closed_form_matches=matches, defects=defects)


def _lower_terms(g: LieAlg, components: list[LinearMap | None], ell: int, d: int, x: Hashable, y: int) -> SparseVector:
    """R_y = sum_{m >= d} todd(m+1-d) m0 omega^{m+1-d}(a_m(x) ⊗ y), in degree d."""

    parity = g.parity
    out = SparseVector()
    for m in range(d, ell + 1):
        i = m + 1 - d
        coeff = todd_coefficient(i)
        if not coeff:
            continue
        power = omega_power(g, m, i)
        for s, c in components[m].column(x).items():
            for (rest, t), value in power.column((s, y)).items():
                sign, monomial = monomial_product(rest, (t,), parity)
                if sign:
                    out.add_term(monomial, sign * coeff * c * value)
    return out


def exact_torsion_solve(g: LieAlg, ell: int, top: LinearMap, trunc: int) -> TorsionMorphism | None:
    """Lower components making a genuinely l-torsion, or None when none exist."""

    if ell > trunc - 1:
        raise TruncationTooSmall(f"level {ell} needs truncation >= {ell + 1}, got {trunc}", witness=ell)
    parity = g.parity
    components: list[LinearMap | None] = [None] * (ell + 1)
    components[ell] = top
    for d in range(ell, 0, -1):
        basis = monomial_basis(parity, d - 1)
        columns = []
        for s in basis:
            column = SparseVector()
            for y in range(g.dim):
                sign, monomial = monomial_product(s, (y,), parity)
                if sign:
                    column.add_term((y, monomial), sign)
            columns.append(column)
        solved = {}
        for x in top.source:
            rhs = SparseVector()
            for y in range(g.dim):
                for monomial, c in _lower_terms(g, components, ell, d, x, y).items():
                    rhs.add_term((y, monomial), -c)
            solution = exact_solve(columns, rhs)
            if solution is None:
                logger.info("%s: no %d-torsion extension (stuck in degree %d at %s)", g.name, ell, d - 1, x)
                return None
            solved[x] = SparseVector(zip(basis, solution))
        components[d - 1] = LinearMap(top.source, solved, f"a_{d - 1}")
    defects = torsion_defects(g, components)
    matches = closed_form(g, ell, top) == components
    return TorsionMorphism(g, ell, components, closed_form_matches=matches, defects=defects)
