"""The universal enveloping algebra on truncated S(g), computed two independent ways.

``star_multiply`` reconstructs m_star from its corestrictions M_{p,q}: for
monomials a, b it sums, over set partitions of the letters of a⊗b, the
S(V)-product of the multibraces evaluated on each block. ``pbw_oracle_multiply``
instead symmetrizes into U(g), multiplies by normal-order rewriting in the basis
order and inverts the symmetrization by back-substitution from the top degree.
Everything else here (c_p^k, omega, the Todd formula, coproducts) is built on
those two products.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, Sequence

from sympy.utilities.iterables import multiset_partitions

from app.services.freelie import FreeLieElem, mbrace, standard_factorization
from app.services.gvs import (
    LinearMap,
    Monomial,
    contract,
    identity_map,
    koszul_sign,
    monomial_basis,
    monomial_parity,
    monomial_product,
    multiply_monomial_vectors,
    psi_map,
    sort_with_sign,
    symmetrize_word,
)
from app.services.liealg import LieAlg
from app.services.models import CheckResult, PBWError
from app.services.scalar import SparseVector, format_rational, todd_coefficient

logger = logging.getLogger(__name__)


class TruncationOverflow(PBWError):
    """Raised when a product would leave S^{<=N}(V)."""

    code = "TRUNCATION_OVERFLOW"


@dataclass(slots=True)
class SymElem:
    """Element of S^{<=trunc}(g) keyed by sorted monomials."""

    algebra: LieAlg
    trunc: int
    terms: SparseVector = field(default_factory=SparseVector)

    def __post_init__(self) -> None:
        self.terms = SparseVector(self.terms)
        for monomial in self.terms:
            if len(monomial) > self.trunc:
                raise TruncationOverflow(f"monomial of degree {len(monomial)} exceeds truncation {self.trunc}")

    @classmethod
    def monomial(cls, algebra: LieAlg, trunc: int, *names: str, coeff=1) -> "SymElem":
        sign, monomial = sort_with_sign(tuple(algebra.index(n) for n in names), algebra.parity)
        return cls(algebra, trunc, SparseVector({monomial: sign * Fraction(coeff)}))

    @classmethod
    def one(cls, algebra: LieAlg, trunc: int) -> "SymElem":
        return cls(algebra, trunc, SparseVector({(): 1}))

    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def component(self, k: int) -> SparseVector:
        return SparseVector((m, c) for m, c in self.terms.items() if len(m) == k)

    def _with(self, terms: SparseVector) -> "SymElem":
        return SymElem(self.algebra, self.trunc, terms)

    def __add__(self, other: "SymElem") -> "SymElem":
        return self._with(self.terms + other.terms)

    def __sub__(self, other: "SymElem") -> "SymElem":
        return self._with(self.terms - other.terms)

    def scaled(self, coeff) -> "SymElem":
        return self._with(self.terms.scaled(coeff))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, SymElem):
            return self.terms == other.terms
        if isinstance(other, Mapping):
            return self.terms == SparseVector(other)
        return NotImplemented

    __hash__ = None

    def format(self) -> str:
        return format_sym(self.algebra, self.terms)


def parse_monomial(g: LieAlg, text: str) -> tuple[int, Monomial]:
    """``"x^2*y"`` -> (sign, sorted monomial); ``"1"`` is the empty monomial."""

    text = text.strip()
    if text in ("", "1"):
        return 1, ()
    letters: list[int] = []
    for factor in text.split("*"):
        name, _, power = factor.strip().partition("^")
        letters.extend([g.index(name)] * (int(power) if power else 1))
    return sort_with_sign(letters, g.parity)


def format_sym(g: LieAlg, vector: Mapping) -> str:
    if not vector:
        return "0"
    ordered = sorted(vector.items(), key=lambda item: (-len(item[0]), item[0]))
    return " + ".join(f"{format_rational(c)}*{g.space.format_monomial(m)}" for m, c in ordered)


@dataclass(slots=True)
class UEnvElem:
    """Element of U(g) in PBW normal form: nondecreasing words in the basis order."""

    algebra: LieAlg
    terms: SparseVector = field(default_factory=SparseVector)

    def __post_init__(self) -> None:
        self.terms = SparseVector(self.terms)

    def __mul__(self, other: "UEnvElem") -> "UEnvElem":
        return UEnvElem(self.algebra, uenv_multiply(self.algebra, self.terms, other.terms))

    def __sub__(self, other: "UEnvElem") -> "UEnvElem":
        return UEnvElem(self.algebra, self.terms - other.terms)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, UEnvElem):
            return self.terms == other.terms
        return NotImplemented

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(slots=True)
class StructConst:
    """c_p^k: V^{⊗p} -> S^k V."""

    p: int
    k: int
    map: LinearMap


# -- the BCH star product -----------------------------------------------------------


def _tree_value(g: LieAlg, word: tuple[int, ...], values: Sequence[int]) -> SparseVector:
    if len(word) == 1:
        return SparseVector({values[word[0]]: 1})
    left, right = standard_factorization(word)
    return g.bracket_vectors(_tree_value(g, left, values), _tree_value(g, right, values))


def evaluate_multilinear(g: LieAlg, element: FreeLieElem, values: Sequence[int]) -> SparseVector:
    """Value of a multilinear Lie polynomial on graded basis vectors, Koszul signs included."""

    parities = [g.parity[v] for v in values]
    out = SparseVector()
    for word, coeff in element.terms.items():
        sign = koszul_sign(parities, word)
        out.iadd_scaled(_tree_value(g, word, values), sign * coeff)
    return out


def corestriction(g: LieAlg, xs: tuple[int, ...], ys: tuple[int, ...]) -> SparseVector:
    """M_{|xs|,|ys|}(xs; ys) evaluated in g (a vector of g)."""

    cache = g.cache.setdefault("corestriction", {})
    key = (xs, ys)
    if key not in cache:
        cache[key] = evaluate_multilinear(g, mbrace(len(xs), len(ys)), xs + ys)
    return cache[key]


def _star_monomials(g: LieAlg, a: Monomial, b: Monomial) -> SparseVector:
    cache = g.cache.setdefault("star", {})
    if (a, b) in cache:
        return cache[(a, b)]
    letters = a + b
    split = len(a)
    parity = g.parity
    parities = [parity[letter] for letter in letters]
    out = SparseVector()
    if not letters:
        out.add_term((), 1)
    else:
        for partition in multiset_partitions(list(range(len(letters)))):
            blocks = sorted((sorted(block) for block in partition), key=lambda block: block[0])
            values = []
            for block in blocks:
                xs = tuple(letters[i] for i in block if i < split)
                ys = tuple(letters[i] for i in block if i >= split)
                value = corestriction(g, xs, ys)
                if not value:
                    break
                values.append(value)
            else:
                order = [i for block in blocks for i in block]
                product = SparseVector({(): koszul_sign(parities, order)})
                for value in values:
                    product = multiply_monomial_vectors(product, {(v,): c for v, c in value.items()}, parity)
                out.iadd_scaled(product)
    cache[(a, b)] = out
    return out


def star_vectors(g: LieAlg, left: Mapping, right: Mapping) -> SparseVector:
    out = SparseVector()
    for a, x in left.items():
        for b, y in right.items():
            out.iadd_scaled(_star_monomials(g, a, b), x * y)
    return out


def _check_pair(a: SymElem, b: SymElem) -> None:
    if a.algebra is not b.algebra and a.algebra != b.algebra:
        raise ValueError("operands live in different algebras")
    if a.trunc != b.trunc:
        raise ValueError("operands have different truncations")
    if a.degree() + b.degree() > a.trunc:
        raise TruncationOverflow(
            f"degree {a.degree()} times degree {b.degree()} exceeds truncation {a.trunc}",
            witness=(a.degree(), b.degree()),
        )


def star_multiply(a: SymElem, b: SymElem) -> SymElem:
    _check_pair(a, b)
    return SymElem(a.algebra, a.trunc, star_vectors(a.algebra, a.terms, b.terms))


def m0(a: SymElem, b: SymElem) -> SymElem:
    _check_pair(a, b)
    return SymElem(a.algebra, a.trunc, multiply_monomial_vectors(a.terms, b.terms, a.algebra.parity))


# -- the PBW oracle -------------------------------------------------------------------


def _normal_order_word(g: LieAlg, word: tuple[int, ...]) -> SparseVector:
    cache = g.cache.setdefault("normal_order", {})
    if word in cache:
        return cache[word]
    parity = g.parity
    out = None
    for i in range(len(word) - 1):
        a, b = word[i], word[i + 1]
        if a > b:
            # e_a e_b = ± e_b e_a + [e_a, e_b]
            out = SparseVector()
            sign = -1 if parity[a] and parity[b] else 1
            out.iadd_scaled(_normal_order_word(g, word[:i] + (b, a) + word[i + 2 :]), sign)
            for c, coeff in g.bracket(a, b).items():
                out.iadd_scaled(_normal_order_word(g, word[:i] + (c,) + word[i + 2 :]), coeff)
            break
        if a == b and parity[a]:
            # e e = [e, e] / 2 for odd e
            out = SparseVector()
            for c, coeff in g.bracket(a, a).items():
                out.iadd_scaled(_normal_order_word(g, word[:i] + (c,) + word[i + 2 :]), coeff / 2)
            break
    if out is None:
        out = SparseVector({word: 1})
    cache[word] = out
    return out


def normal_order(g: LieAlg, vector: Mapping) -> SparseVector:
    out = SparseVector()
    for word, coeff in vector.items():
        out.iadd_scaled(_normal_order_word(g, tuple(word)), coeff)
    return out


def uenv_multiply(g: LieAlg, left: Mapping, right: Mapping) -> SparseVector:
    out = SparseVector()
    for u, x in left.items():
        for v, y in right.items():
            out.iadd_scaled(_normal_order_word(g, tuple(u) + tuple(v)), x * y)
    return out


def sym_to_uenv(g: LieAlg, vector: Mapping) -> SparseVector:
    """Graded symmetrization S(g) -> U(g), x1...xk -> (1/k!) sum ± words."""

    out = SparseVector()
    for monomial, coeff in vector.items():
        out.iadd_scaled(normal_order(g, symmetrize_word(monomial, g.parity)), coeff)
    return out


def uenv_to_sym(g: LieAlg, vector: Mapping) -> SparseVector:
    """Inverse of sym_to_uenv by back-substitution from the longest PBW word down."""

    remaining = SparseVector(vector)
    out = SparseVector()
    while remaining:
        word = max(remaining, key=lambda w: (len(w), w))
        coeff = remaining[word]
        out.add_term(word, coeff)
        remaining.iadd_scaled(sym_to_uenv(g, {word: 1}), -coeff)
    return out


def pbw_product_vectors(g: LieAlg, left: Mapping, right: Mapping) -> SparseVector:
    return uenv_to_sym(g, uenv_multiply(g, sym_to_uenv(g, left), sym_to_uenv(g, right)))


def pbw_oracle_multiply(a: SymElem, b: SymElem) -> SymElem:
    _check_pair(a, b)
    return SymElem(a.algebra, a.trunc, pbw_product_vectors(a.algebra, a.terms, b.terms))


# -- structure coefficients -----------------------------------------------------------


def delta_map(g: LieAlg, p: int) -> LinearMap:
    """V^{⊗p} -> S^{<=p}V, w -> w_1 ⋆ w_2 ⋆ ... ⋆ w_p."""

    if p < 1:
        raise ValueError("p must be >= 1")
    key = ("delta", p)
    if key not in g.cache:
        if p == 1:
            g.cache[key] = LinearMap.from_function(g.space.words(1), lambda w: {w: 1}, "Delta^1")
        else:
            previous = delta_map(g, p - 1)
            g.cache[key] = LinearMap.from_function(
                g.space.words(p),
                lambda w: star_vectors(g, previous.column(w[:-1]), {(w[-1],): 1}),
                f"Delta^{p}",
            )
    return g.cache[key]


def structure_coefficients(g: LieAlg, p: int, k: int) -> StructConst:
    if not 1 <= k <= p:
        raise ValueError("need 1 <= k <= p")
    full = delta_map(g, p)
    columns = {w: {m: c for m, c in col.items() if len(m) == k} for w, col in full.columns.items()}
    return StructConst(p=p, k=k, map=LinearMap(full.source, columns, f"c_{p}^{k}"))


def _insert_alpha(g: LieAlg, word: tuple[int, ...], i: int) -> SparseVector:
    """(id ⊗ alpha ⊗ id) with alpha = mu/2 acting on slots i, i+1."""

    out = SparseVector()
    for c, coeff in g.bracket(word[i - 1], word[i]).items():
        out.add_term(word[: i - 1] + (c,) + word[i + 1 :], coeff / 2)
    return out


def recursion_check(g: LieAlg, p: int, k: int) -> CheckResult:
    """c_p^k ∘ Psi_p == {c_{p-1}^k ∘ (id ⊗ alpha ⊗ id)}_i."""

    name = f"c_{p}^{k}_recursion"
    if p < 2:
        return CheckResult.passed(name, detail="p < 2 has no Psi_p")
    psi, _ = psi_map(g.space, p)
    top = structure_coefficients(g, p, k).map
    lower = structure_coefficients(g, p - 1, k).map if k <= p - 1 else None
    for key in psi.source:
        i, word = key
        left = top.apply(psi.column(key))
        right = lower.apply(_insert_alpha(g, word, i)) if lower else SparseVector()
        if left != right:
            return CheckResult.failed(name, witness=(i, g.space.format_word(word)))
    return CheckResult.passed(name)


def structure_check(g: LieAlg, p: int) -> list[CheckResult]:
    """c_p^p = pi_p, c_p^k kills S^p V for k < p, c_2^1 = mu/2 on Λ², and the recursion."""

    results: list[CheckResult] = []
    parity = g.parity
    top = structure_coefficients(g, p, p).map
    bad = next(
        (w for w in g.space.words(p) if top.column(w) != _sorted_word(w, parity)),
        None,
    )
    results.append(
        CheckResult.passed(f"c_{p}^{p}_is_projection")
        if bad is None
        else CheckResult.failed(f"c_{p}^{p}_is_projection", witness=g.space.format_word(bad))
    )
    for k in range(1, p):
        c = structure_coefficients(g, p, k).map
        witness = next(
            (m for m in monomial_basis(parity, p) if c.apply(symmetrize_word(m, parity))),
            None,
        )
        results.append(
            CheckResult.passed(f"c_{p}^{k}_kills_symmetric")
            if witness is None
            else CheckResult.failed(f"c_{p}^{k}_kills_symmetric", witness=g.space.format_monomial(witness))
        )
    if p == 2:
        c21 = structure_coefficients(g, 2, 1).map
        witness = None
        for a, b in itertools.product(range(g.dim), repeat=2):
            sign = -1 if parity[a] and parity[b] else 1
            commutator = SparseVector({(a, b): 1})
            commutator.add_term((b, a), -sign)
            value = c21.apply(commutator)
            expected = SparseVector({(c,): v for c, v in g.bracket(a, b).items()})
            if value != expected:
                witness = (g.names[a], g.names[b])
                break
        results.append(
            CheckResult.passed("c_2^1_is_half_bracket")
            if witness is None
            else CheckResult.failed("c_2^1_is_half_bracket", witness=witness)
        )
    for k in range(1, p + 1):
        results.append(recursion_check(g, p, k))
    return results


def _sorted_word(word: Sequence[int], parity: Sequence[int]) -> SparseVector:
    sign, monomial = sort_with_sign(word, parity)
    return SparseVector({monomial: sign}) if sign else SparseVector()


# -- omega, the Todd formula and contractions -----------------------------------------


def omega(g: LieAlg, n: int) -> LinearMap:
    """n·(id ⊗ mu) on S^n V ⊗ V, landing in S^{n-1} V ⊗ V.

    Computed in the tensor model pi_n(s) ⊗ y; the prefix is checked to be
    symmetric before it is read back as a monomial.
    """

    if n < 1:
        raise ValueError("omega needs n >= 1")
    key = ("omega", n)
    if key in g.cache:
        return g.cache[key]
    parity = g.parity
    keys = [(s, y) for s in monomial_basis(parity, n) for y in range(g.dim)]

    def _column(key: tuple[Monomial, int]) -> SparseVector:
        s, y = key
        prefixes: dict[int, SparseVector] = {}
        for word, coeff in symmetrize_word(s, parity).items():
            for t, value in g.bracket(word[-1], y).items():
                prefixes.setdefault(t, SparseVector()).add_term(word[:-1], n * coeff * value)
        out = SparseVector()
        for t, prefix in prefixes.items():
            symmetric = SparseVector()
            for word, coeff in prefix.items():
                symmetric.iadd_scaled(symmetrize_word(word, parity), coeff)
            if symmetric != prefix:
                raise PBWError(f"omega image does not factor through S^{n - 1} at {key}", witness=key)
            for word, coeff in prefix.items():
                sign, monomial = sort_with_sign(word, parity)
                if sign:
                    out.add_term((monomial, t), sign * coeff)
        return out

    result = LinearMap.from_function(keys, _column, f"omega_{n}")
    logger.debug("omega_%d built for %s", n, g.name)
    g.cache[key] = result
    return result


def omega_power(g: LieAlg, n: int, p: int) -> LinearMap:
    """omega^{∘p}: S^n V ⊗ V -> S^{n-p} V ⊗ V (zero when p > n)."""

    keys = [(s, y) for s in monomial_basis(g.parity, n) for y in range(g.dim)]
    if p == 0:
        return identity_map(keys)
    if p > n:
        return LinearMap(tuple(keys), {}, f"omega^{p}")
    result = omega(g, n)
    for m in range(n - 1, n - p, -1):
        result = omega(g, m).compose(result)
    return result


def q_map(g: LieAlg, n: int, k: int) -> LinearMap:
    """q_k = m0 ∘ omega^{∘k} on S^n V ⊗ V."""

    power = omega_power(g, n, k)
    parity = g.parity

    def _column(key):
        out = SparseVector()
        for (rest, t), coeff in power.column(key).items():
            sign, monomial = monomial_product(rest, (t,), parity)
            if sign:
                out.add_term(monomial, sign * coeff)
        return out

    return LinearMap.from_function(power.source, _column, f"q_{k}")


def phi_todd(g: LieAlg, n: int) -> LinearMap:
    """m0 ∘ sum_i todd(i) omega^{∘i} on S^n V ⊗ V."""

    total = None
    for i in range(n + 1):
        coeff = todd_coefficient(i)
        if not coeff:
            continue
        term = q_map(g, n, i).scaled(coeff)
        total = term if total is None else total + term
    return total


def todd_formula_check(g: LieAlg, n: int) -> CheckResult:
    """phi_todd == m_star restricted to S^n V ⊗ V."""

    phi = phi_todd(g, n)
    for s, y in phi.source:
        if phi.column((s, y)) != _star_monomials(g, s, (y,)):
            return CheckResult.failed(f"todd_formula_n{n}", witness=(g.space.format_monomial(s), g.names[y]))
    return CheckResult.passed(f"todd_formula_n{n}")


def contraction(g: LieAlg, n: int, p: int) -> LinearMap:
    """c_p: S^n V ⊗ S^p V* -> S^{n-p} V (p = 0 is the identity)."""

    if p < 0 or p > n:
        raise ValueError("need 0 <= p <= n")
    parity = g.parity
    keys = [(s, f) for s in monomial_basis(parity, n) for f in monomial_basis(parity, p)]
    return LinearMap.from_function(keys, lambda key: contract({key[0]: 1}, {key[1]: 1}, parity), f"c_{p}")


# -- coproducts -----------------------------------------------------------------------


def coproduct(g: LieAlg, vector: Mapping) -> SparseVector:
    """Unshuffle coproduct on S(V), keyed by (left monomial, right monomial)."""

    parity = g.parity
    out = SparseVector()
    for monomial, coeff in vector.items():
        n = len(monomial)
        parities = [parity[letter] for letter in monomial]
        for size in range(n + 1):
            for chosen in itertools.combinations(range(n), size):
                rest = [i for i in range(n) if i not in chosen]
                sign = koszul_sign(parities, list(chosen) + rest)
                left = tuple(monomial[i] for i in chosen)
                right = tuple(monomial[i] for i in rest)
                out.add_term((left, right), sign * coeff)
    return out


def reduced_coproduct(g: LieAlg, vector: Mapping, k: int) -> SparseVector:
    """Iterated reduced coproduct into k nonempty factors, keyed by k-tuples of monomials."""

    parity = g.parity
    out = SparseVector()
    for monomial, coeff in vector.items():
        n = len(monomial)
        parities = [parity[letter] for letter in monomial]
        for slots in itertools.product(range(k), repeat=n):
            if len(set(slots)) != k:
                continue
            order = [i for slot in range(k) for i in range(n) if slots[i] == slot]
            pieces = tuple(tuple(monomial[i] for i in range(n) if slots[i] == slot) for slot in range(k))
            out.add_term(pieces, koszul_sign(parities, order) * coeff)
    return out


def reduced_coproduct_self_test(g: LieAlg, n: int) -> CheckResult:
    """The n-fold reduced coproduct of a degree-n monomial is n! times its symmetric tensor."""

    for monomial in monomial_basis(g.parity, n):
        pieces = reduced_coproduct(g, {monomial: 1}, n)
        as_words = SparseVector((tuple(p[0] for p in key), c) for key, c in pieces.items())
        if as_words != symmetrize_word(monomial, g.parity).scaled(factorial(n)):
            return CheckResult.failed(f"reduced_coproduct_n{n}", witness=g.space.format_monomial(monomial))
    return CheckResult.passed(f"reduced_coproduct_n{n}")


# -- verification batteries -----------------------------------------------------------


def monomial_pairs(g: LieAlg, max_total: int, include_unit: bool = False) -> Iterable[tuple[Monomial, Monomial]]:
    start = 0 if include_unit else 1
    for i in range(start, max_total + 1):
        for j in range(start, max_total + 1 - i):
            for a in monomial_basis(g.parity, i):
                for b in monomial_basis(g.parity, j):
                    yield a, b


def oracle_equivalence_check(g: LieAlg, max_total: int) -> CheckResult:
    for a, b in monomial_pairs(g, max_total, include_unit=True):
        if _star_monomials(g, a, b) != pbw_product_vectors(g, {a: 1}, {b: 1}):
            return CheckResult.failed(
                "oracle_equivalence", witness=(g.space.format_monomial(a), g.space.format_monomial(b))
            )
    return CheckResult.passed("oracle_equivalence", detail=f"total degree <= {max_total}")


def associativity_check(g: LieAlg, max_total: int) -> CheckResult:
    parity = g.parity
    for i in range(1, max_total + 1):
        for j in range(1, max_total + 1 - i):
            for k in range(1, max_total + 1 - i - j):
                for a in monomial_basis(parity, i):
                    for b in monomial_basis(parity, j):
                        for c in monomial_basis(parity, k):
                            left = star_vectors(g, _star_monomials(g, a, b), {c: 1})
                            right = star_vectors(g, {a: 1}, _star_monomials(g, b, c))
                            if left != right:
                                return CheckResult.failed(
                                    "associativity",
                                    witness=tuple(g.space.format_monomial(m) for m in (a, b, c)),
                                )
    return CheckResult.passed("associativity", detail=f"total degree <= {max_total}")


def deformation_check(g: LieAlg, max_total: int) -> CheckResult:
    """Filtered, top part is m0, and the commutator on V ⊗ V is mu."""

    parity = g.parity
    for a, b in monomial_pairs(g, max_total):
        product = _star_monomials(g, a, b)
        top = len(a) + len(b)
        if any(len(m) > top for m in product):
            return CheckResult.failed("filtered", witness=(g.space.format_monomial(a), g.space.format_monomial(b)))
        leading = SparseVector((m, c) for m, c in product.items() if len(m) == top)
        if leading != multiply_monomial_vectors({a: 1}, {b: 1}, parity):
            return CheckResult.failed("deformation_of_m0", witness=(g.space.format_monomial(a), g.space.format_monomial(b)))
    for x, y in itertools.product(range(g.dim), repeat=2):
        sign = -1 if parity[x] and parity[y] else 1
        commutator = _star_monomials(g, (x,), (y,)) - _star_monomials(g, (y,), (x,)).scaled(sign)
        if commutator != SparseVector({(c,): v for c, v in g.bracket(x, y).items()}):
            return CheckResult.failed("commutator_is_bracket", witness=(g.names[x], g.names[y]))
    return CheckResult.passed("deformation", detail="filtered, leading term m0, commutator mu")


def coalgebra_morphism_check(g: LieAlg, max_total: int) -> CheckResult:
    """∇ ∘ m_star == (m_star ⊗ m_star) ∘ (23) ∘ (∇ ⊗ ∇)."""

    parity = g.parity
    for a, b in monomial_pairs(g, max_total, include_unit=True):
        left = coproduct(g, _star_monomials(g, a, b))
        right = SparseVector()
        for (a1, a2), x in coproduct(g, {a: 1}).items():
            for (b1, b2), y in coproduct(g, {b: 1}).items():
                sign = -1 if monomial_parity(a2, parity) and monomial_parity(b1, parity) else 1
                first = _star_monomials(g, a1, b1)
                second = _star_monomials(g, a2, b2)
                for m1, c1 in first.items():
                    for m2, c2 in second.items():
                        right.add_term((m1, m2), sign * x * y * c1 * c2)
        if left != right:
            return CheckResult.failed("coalgebra_morphism", witness=(g.space.format_monomial(a), g.space.format_monomial(b)))
    return CheckResult.passed("coalgebra_morphism", detail=f"total degree <= {max_total}")


def step_one_check(g: LieAlg, n: int, k: int) -> CheckResult:
    """∇ ∘ q_k == (id + (12)) ∘ (id ⊗ q_k) ∘ (∇ ⊗ id) on S^n V ⊗ V."""

    parity = g.parity
    q_maps = {m: q_map(g, m, k) for m in range(n + 1)}
    for s in monomial_basis(parity, n):
        for y in range(g.dim):
            left = coproduct(g, q_maps[n].column((s, y)))
            right = SparseVector()
            for (s1, s2), c in coproduct(g, {s: 1}).items():
                for w, v in q_maps[len(s2)].column((s2, y)).items():
                    right.add_term((s1, w), c * v)
                    swap = -1 if monomial_parity(s1, parity) and monomial_parity(w, parity) else 1
                    right.add_term((w, s1), swap * c * v)
            if left != right:
                return CheckResult.failed(f"step_one_k{k}", witness=(g.space.format_monomial(s), g.names[y]))
    return CheckResult.passed(f"step_one_k{k}", detail=f"n={n}")


def reverse_pbw_check(g: LieAlg, max_total: int) -> CheckResult:
    """T(V) -> (S(V), m_star) is multiplicative: Delta^{p+q}(uv) == Delta^p(u) ⋆ Delta^q(v)."""

    for total in range(2, max_total + 1):
        full = delta_map(g, total)
        for p in range(1, total):
            left_map, right_map = delta_map(g, p), delta_map(g, total - p)
            for word in g.space.words(total):
                expected = star_vectors(g, left_map.column(word[:p]), right_map.column(word[p:]))
                if full.column(word) != expected:
                    return CheckResult.failed("reverse_pbw", witness=(p, g.space.format_word(word)))
    return CheckResult.passed("reverse_pbw", detail=f"p+q <= {max_total}")
