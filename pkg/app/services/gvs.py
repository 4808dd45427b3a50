"""Graded vector spaces, Koszul-signed tensor actions and the maps Psi_n / Phi_n.

Basis vectors are addressed by their position in the space, words of V^{⊗n}
are tuples of positions and symmetric monomials are sorted tuples in which an
odd letter occurs at most once. A monomial m is identified with pi_n(m) inside
V^{⊗n}. Signs only depend on degree parity.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import sympy

from app.services.models import PBWError
from app.services.scalar import SparseVector
from app.services.symgroup import (
    ArityMismatch,
    GroupAlgElem,
    Permutation,
    ideal_decomposition,
)

logger = logging.getLogger(__name__)

Word = tuple[int, ...]
Monomial = tuple[int, ...]


class NotAntisymmetric(PBWError):
    """Raised when a bilinear map does not kill S^2 V."""

    code = "NOT_ANTISYMMETRIC"


@dataclass(frozen=True, slots=True)
class BasisVector:
    name: str
    degree: int = 0

    @property
    def parity(self) -> int:
        return self.degree % 2


@dataclass(frozen=True, slots=True)
class GradedSpace:
    basis: tuple[BasisVector, ...]

    def __post_init__(self) -> None:
        names = [vector.name for vector in self.basis]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate basis names in {names}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[str, int]]) -> "GradedSpace":
        return cls(tuple(BasisVector(name, degree) for name, degree in pairs))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(vector.name for vector in self.basis)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(vector.degree for vector in self.basis)

    @property
    def parities(self) -> tuple[int, ...]:
        return tuple(vector.parity for vector in self.basis)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError as exc:
            raise KeyError(f"unknown basis vector {name!r}") from exc

    def words(self, n: int) -> list[Word]:
        return list(itertools.product(range(self.dim), repeat=n))

    def monomials(self, n: int) -> list[Monomial]:
        return monomial_basis(self.parities, n)

    def monomials_upto(self, n: int) -> list[Monomial]:
        return [m for k in range(n + 1) for m in monomial_basis(self.parities, k)]

    def word_degree(self, word: Sequence[int]) -> int:
        return sum(self.basis[letter].degree for letter in word)

    def format_word(self, word: Sequence[int], joiner: str = "⊗") -> str:
        if not word:
            return "1"
        return joiner.join(self.names[letter] for letter in word)

    def format_monomial(self, monomial: Sequence[int]) -> str:
        if not monomial:
            return "1"
        parts = []
        for letter, group in itertools.groupby(monomial):
            power = len(list(group))
            name = self.names[letter]
            parts.append(name if power == 1 else f"{name}^{power}")
        return "*".join(parts)


# -- signs and monomials -------------------------------------------------------


def koszul_sign(parities: Sequence[int], order: Sequence[int]) -> int:
    """Sign of rearranging letters with the given parities into ``order``.

    ``order[j]`` is the old position placed at new position j. Every pair of
    odd letters whose relative order flips contributes a factor -1.
    """

    sign = 1
    for a in range(len(order)):
        if not parities[order[a]]:
            continue
        for b in range(a + 1, len(order)):
            if parities[order[b]] and order[a] > order[b]:
                sign = -sign
    return sign


def sort_with_sign(word: Sequence[int], parity: Sequence[int]) -> tuple[int, Monomial]:
    """Commutative normal form of a word: (sign, sorted monomial), sign 0 if it dies."""

    order = sorted(range(len(word)), key=lambda j: word[j])
    monomial = tuple(word[j] for j in order)
    for a, b in zip(monomial, monomial[1:]):
        if a == b and parity[a]:
            return 0, monomial
    return koszul_sign([parity[letter] for letter in word], order), monomial


def monomial_product(left: Sequence[int], right: Sequence[int], parity: Sequence[int]) -> tuple[int, Monomial]:
    return sort_with_sign(tuple(left) + tuple(right), parity)


def multiply_monomial_vectors(left: Mapping, right: Mapping, parity: Sequence[int]) -> SparseVector:
    """Product in the graded-commutative algebra S(V)."""

    out = SparseVector()
    for m1, a in left.items():
        for m2, b in right.items():
            sign, monomial = monomial_product(m1, m2, parity)
            if sign:
                out.add_term(monomial, sign * a * b)
    return out


def monomial_basis(parity: Sequence[int], n: int) -> list[Monomial]:
    out = []
    for monomial in itertools.combinations_with_replacement(range(len(parity)), n):
        if any(a == b and parity[a] for a, b in zip(monomial, monomial[1:])):
            continue
        out.append(monomial)
    return out


def remove_position(monomial: Sequence[int], r: int, parity: Sequence[int]) -> tuple[int, Monomial]:
    """Move the letter at position r to the end; return (sign, rest)."""

    letter = monomial[r]
    sign = 1
    if parity[letter]:
        for later in monomial[r + 1 :]:
            if parity[later]:
                sign = -sign
    return sign, tuple(monomial[:r]) + tuple(monomial[r + 1 :])


def monomial_parity(monomial: Sequence[int], parity: Sequence[int]) -> int:
    return sum(parity[letter] for letter in monomial) % 2


def right_derivative(vector: Mapping, letter: int, parity: Sequence[int]) -> SparseVector:
    """Contract one copy of ``letter`` against its dual, moving it to the end first."""

    out = SparseVector()
    for monomial, coeff in vector.items():
        for r, current in enumerate(monomial):
            if current == letter:
                sign, rest = remove_position(monomial, r, parity)
                out.add_term(rest, sign * coeff)
    return out


def contract(vector: Mapping, dual: Mapping, parity: Sequence[int]) -> SparseVector:
    """c_p(s ⊗ f): derivatives along the letters of each dual monomial, first letter first.

    On v^n ⊗ (v*)^p this gives n!/(n-p)! v^{n-p}, so <h^2, (h*)^2> = 2.
    """

    out = SparseVector()
    for monomial, coeff in dual.items():
        current = SparseVector(vector)
        for letter in monomial:
            current = right_derivative(current, letter, parity)
            if not current:
                break
        out.iadd_scaled(current, coeff)
    return out


def extend_derivation(
    vector: Mapping,
    letter_image: Callable[[int], Mapping],
    degree_parity: int,
    parity: Sequence[int],
) -> SparseVector:
    """Extend a map on letters to a graded derivation of S(V).

    Passing the derivation over earlier letters costs the Koszul sign.
    """

    out = SparseVector()
    for monomial, coeff in vector.items():
        passed = 0
        for r, letter in enumerate(monomial):
            sign = -1 if degree_parity and passed % 2 else 1
            for image, value in letter_image(letter).items():
                factor, result = sort_with_sign(monomial[:r] + (image,) + monomial[r + 1 :], parity)
                if factor:
                    out.add_term(result, sign * factor * coeff * value)
            passed += parity[letter]
    return out


def symmetrize_word(word: Sequence[int], parity: Sequence[int]) -> SparseVector:
    """pi_n applied to one word of V^{⊗n}."""

    n = len(word)
    pars = [parity[letter] for letter in word]
    weight = Fraction(1, factorial(n))
    out = SparseVector()
    for order in itertools.permutations(range(n)):
        out.add_term(tuple(word[j] for j in order), koszul_sign(pars, order) * weight)
    return out


# -- tensors and the signed S_n action -----------------------------------------


def act_on_word(perm: Permutation, word: Sequence[int], parity: Sequence[int]) -> tuple[int, Word]:
    """rho(g): the letter in slot i moves to slot g(i)."""

    if perm.n != len(word):
        raise ArityMismatch(f"S_{perm.n} cannot act on a word of length {len(word)}")
    inverse = perm.inverse()
    order = [inverse(j + 1) - 1 for j in range(perm.n)]
    new_word = tuple(word[j] for j in order)
    return koszul_sign([parity[letter] for letter in word], order), new_word


def act_on_vector(g: GroupAlgElem, vector: Mapping, parity: Sequence[int]) -> SparseVector:
    out = SparseVector()
    for perm, coeff in g.terms.items():
        for word, value in vector.items():
            sign, new_word = act_on_word(perm, word, parity)
            out.add_term(new_word, sign * coeff * value)
    return out


@dataclass(slots=True)
class TensorElem:
    space: GradedSpace
    n: int
    terms: SparseVector = field(default_factory=SparseVector)

    def __post_init__(self) -> None:
        self.terms = SparseVector(self.terms)
        for word in self.terms:
            if len(word) != self.n:
                raise ArityMismatch(f"word {word} is not in tensor power {self.n}")

    @classmethod
    def word(cls, space: GradedSpace, *names: str, coeff=1) -> "TensorElem":
        key = tuple(space.index(name) for name in names)
        return cls(space, len(key), SparseVector({key: coeff}))

    def __add__(self, other: "TensorElem") -> "TensorElem":
        return TensorElem(self.space, self.n, self.terms + other.terms)

    def __sub__(self, other: "TensorElem") -> "TensorElem":
        return TensorElem(self.space, self.n, self.terms - other.terms)

    def scaled(self, coeff) -> "TensorElem":
        return TensorElem(self.space, self.n, self.terms.scaled(coeff))

    def is_zero(self) -> bool:
        return not self.terms


def koszul_act(g: GroupAlgElem, t: TensorElem) -> TensorElem:
    if g.n != t.n:
        raise ArityMismatch(f"S_{g.n} element applied to a tensor of power {t.n}")
    return TensorElem(t.space, t.n, act_on_vector(g, t.terms, t.space.parities))


# -- linear maps ----------------------------------------------------------------


def to_sympy(value: Fraction) -> sympy.Rational:
    return sympy.Rational(value.numerator, value.denominator)


def from_sympy(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _matrix(columns: Sequence[Mapping], rows: Sequence[Hashable] | None = None) -> tuple[sympy.Matrix, list]:
    if rows is None:
        rows = list(dict.fromkeys(key for column in columns for key in column))
    position = {key: r for r, key in enumerate(rows)}
    matrix = sympy.zeros(len(rows), len(columns))
    for c, column in enumerate(columns):
        for key, value in column.items():
            matrix[position[key], c] = to_sympy(value)
    return matrix, list(rows)


def exact_rank(columns: Sequence[Mapping]) -> int:
    if not columns:
        return 0
    matrix, rows = _matrix(columns)
    if not rows:
        return 0
    return matrix.rank()


def exact_nullspace(columns: Sequence[Mapping]) -> list[list[Fraction]]:
    """Kernel of the matrix with the given sparse columns, as coefficient lists."""

    if not columns:
        return []
    matrix, rows = _matrix(columns)
    if not rows:
        return [[Fraction(int(i == j)) for i in range(len(columns))] for j in range(len(columns))]
    return [[from_sympy(x) for x in vector] for vector in matrix.nullspace()]


def exact_solve(columns: Sequence[Mapping], rhs: Mapping) -> list[Fraction] | None:
    """One solution c of sum c_j columns[j] == rhs, or None when inconsistent."""

    rows = list(dict.fromkeys([key for column in columns for key in column] + list(rhs)))
    if not columns:
        return [] if not rhs else None
    matrix, _ = _matrix(columns, rows)
    target, _ = _matrix([rhs], rows)
    try:
        solution, params = matrix.gauss_jordan_solve(target)
    except ValueError:
        return None
    if params.shape[0]:
        solution = solution.subs({symbol: 0 for symbol in params})
    return [from_sympy(x) for x in solution]


@dataclass(slots=True, eq=False)
class LinearMap:
    """Sparse matrix: each source key maps to a SparseVector of target keys."""

    source: tuple
    columns: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self) -> None:
        columns = ((key, SparseVector(value)) for key, value in self.columns.items())
        self.columns = {key: value for key, value in columns if value}

    @classmethod
    def from_function(cls, source: Iterable, function: Callable[[Hashable], Mapping], name: str = "") -> "LinearMap":
        source = tuple(source)
        return cls(source, {key: function(key) for key in source}, name)

    def column(self, key: Hashable) -> SparseVector:
        return self.columns.get(key, SparseVector())

    def apply(self, vector: Mapping) -> SparseVector:
        out = SparseVector()
        for key, coeff in vector.items():
            column = self.columns.get(key)
            if column:
                out.iadd_scaled(column, coeff)
        return out

    def compose(self, inner: "LinearMap") -> "LinearMap":
        """self ∘ inner."""

        return LinearMap(inner.source, {key: self.apply(col) for key, col in inner.columns.items()}, f"{self.name}∘{inner.name}")

    def __add__(self, other: "LinearMap") -> "LinearMap":
        source = tuple(dict.fromkeys(self.source + other.source))
        return LinearMap(source, {key: self.column(key) + other.column(key) for key in source}, self.name)

    def __sub__(self, other: "LinearMap") -> "LinearMap":
        source = tuple(dict.fromkeys(self.source + other.source))
        return LinearMap(source, {key: self.column(key) - other.column(key) for key in source}, self.name)

    def scaled(self, coeff) -> "LinearMap":
        return LinearMap(self.source, {key: col.scaled(coeff) for key, col in self.columns.items()}, self.name)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.columns == other.columns

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.columns

    def first_difference(self, other: "LinearMap") -> Hashable | None:
        for key in dict.fromkeys(self.source + other.source):
            if self.column(key) != other.column(key):
                return key
        return None

    def rank(self) -> int:
        return exact_rank([self.column(key) for key in self.source])


def identity_map(keys: Iterable[Hashable]) -> LinearMap:
    keys = tuple(keys)
    return LinearMap(keys, {key: {key: 1} for key in keys}, "id")


def symmetrizer_map(space: GradedSpace, n: int) -> LinearMap:
    parity = space.parities
    return LinearMap.from_function(space.words(n), lambda word: symmetrize_word(word, parity), f"pi_{n}")


# -- the split V^{⊗n} = S^n V ⊕ Λ̃^n V -------------------------------------------


@dataclass(slots=True)
class SplitPower:
    n: int
    sym_basis: list[Monomial]
    alt_basis: list[Word]
    incl_sym: LinearMap
    proj_sym: LinearMap
    incl_alt: LinearMap
    proj_alt: LinearMap


def split_power(space: GradedSpace, n: int) -> SplitPower:
    """Bases of S^n V and Λ̃^n V with inclusions and projections.

    Λ̃^n V gets the combinatorial basis w - eps_w * w0, w running over the
    non-sorted words of each letter multiset (w0 the sorted word); multisets
    with a repeated odd letter are killed by pi_n, so all their words qualify.
    """

    if n < 0:
        raise ValueError("tensor power must be non-negative")
    parity = space.parities
    words = space.words(n)
    sym_basis = space.monomials(n)
    alt_basis: list[Word] = []
    incl_alt: dict[Word, SparseVector] = {}
    for word in words:
        sign, monomial = sort_with_sign(word, parity)
        if sign == 0:
            alt_basis.append(word)
            incl_alt[word] = SparseVector({word: 1})
        elif word != monomial:
            alt_basis.append(word)
            incl_alt[word] = SparseVector({word: 1, monomial: -sign})
    alt_keys = set(alt_basis)

    incl_sym = LinearMap.from_function(sym_basis, lambda m: symmetrize_word(m, parity), f"incl_S{n}")

    def _proj_sym(word: Word) -> SparseVector:
        sign, monomial = sort_with_sign(word, parity)
        return SparseVector({monomial: sign}) if sign else SparseVector()

    def _proj_alt(word: Word) -> SparseVector:
        rest = SparseVector({word: 1}) - symmetrize_word(word, parity)
        return SparseVector((key, value) for key, value in rest.items() if key in alt_keys)

    logger.debug("split V^{⊗%d}: dim S=%d dim Λ̃=%d", n, len(sym_basis), len(alt_basis))
    return SplitPower(
        n=n,
        sym_basis=sym_basis,
        alt_basis=alt_basis,
        incl_sym=incl_sym,
        proj_sym=LinearMap.from_function(words, _proj_sym, f"proj_S{n}"),
        incl_alt=LinearMap(tuple(alt_basis), incl_alt, f"incl_Λ{n}"),
        proj_alt=LinearMap.from_function(words, _proj_alt, f"proj_Λ{n}"),
    )


def swap_adjacent(word: Word, i: int, parity: Sequence[int]) -> tuple[int, Word]:
    """tau_i on one word (slots i, i+1 in 1-based numbering)."""

    a, b = word[i - 1], word[i]
    sign = -1 if parity[a] and parity[b] else 1
    return sign, word[: i - 1] + (b, a) + word[i + 1 :]


def half_antisymmetrize(word: Word, i: int, parity: Sequence[int]) -> SparseVector:
    """(1/2)(1 - tau_i) applied to a word."""

    sign, swapped = swap_adjacent(word, i, parity)
    out = SparseVector({word: Fraction(1, 2)})
    out.add_term(swapped, Fraction(-sign, 2))
    return out


def psi_source(space: GradedSpace, n: int) -> list[tuple[int, Word]]:
    """Keys (i, w) of the summands V^{⊗i-1}⊗Λ²V⊗V^{⊗n-i-1}.

    The pair in slots i, i+1 is canonical: a < b, or a == b with a odd.
    """

    parity = space.parities
    keys = []
    for i in range(1, n):
        for word in space.words(n):
            a, b = word[i - 1], word[i]
            if a < b or (a == b and parity[a]):
                keys.append((i, word))
    return keys


def _canonical_pair(i: int, vector: Mapping, parity: Sequence[int], out: SparseVector, scale=1) -> None:
    """Write (1 - tau_i) applied to ``vector`` in Psi_n source coordinates."""

    for word, coeff in vector.items():
        a, b = word[i - 1], word[i]
        if a < b or (a == b and parity[a]):
            out.add_term((i, word), 2 * coeff * scale)
        elif a > b:
            sign, swapped = swap_adjacent(word, i, parity)
            out.add_term((i, swapped), -2 * sign * coeff * scale)


def psi_map(space: GradedSpace, n: int) -> tuple[LinearMap, LinearMap]:
    """(Psi_n, Phi_n) with Psi_n ∘ Phi_n == id - pi_n on V^{⊗n}."""

    if n < 2:
        raise ValueError("Psi_n needs n >= 2")
    parity = space.parities
    psi = LinearMap.from_function(
        psi_source(space, n),
        lambda key: half_antisymmetrize(key[1], key[0], parity),
        f"Psi_{n}",
    )
    parts = ideal_decomposition(n)

    def _phi(word: Word) -> SparseVector:
        out = SparseVector()
        for i, a_i in enumerate(parts, start=1):
            _canonical_pair(i, act_on_vector(a_i, {word: 1}, parity), parity, out)
        return out

    phi = LinearMap.from_function(space.words(n), _phi, f"Phi_{n}")
    return psi, phi


# -- Jacobi criterion -------------------------------------------------------------


def bilinear_apply(alpha: LinearMap, left: Mapping, right: Mapping) -> SparseVector:
    """alpha(u ⊗ v) for vectors u, v of V keyed by basis positions."""

    out = SparseVector()
    for a, x in left.items():
        for b, y in right.items():
            column = alpha.columns.get((a, b))
            if column:
                out.iadd_scaled(column, x * y)
    return out


def _check_antisymmetric(alpha: LinearMap, space: GradedSpace) -> None:
    parity = space.parities
    for a in range(space.dim):
        for b in range(space.dim):
            sign = -1 if parity[a] and parity[b] else 1
            if alpha.column((a, b)) + alpha.column((b, a)).scaled(sign):
                raise NotAntisymmetric(
                    f"alpha({space.names[a]},{space.names[b]}) is not graded antisymmetric",
                    witness=(space.names[a], space.names[b]),
                )


def _left_nested(alpha: LinearMap, word: Word) -> SparseVector:
    """u = alpha ∘ (alpha ⊗ id) on one word of length 3."""

    a, b, c = word
    return bilinear_apply(alpha, alpha.column((a, b)), {c: 1})


def _right_nested(alpha: LinearMap, word: Word) -> SparseVector:
    a, b, c = word
    return bilinear_apply(alpha, {a: 1}, alpha.column((b, c)))


def _apply_word_map(function: Callable[[Word], SparseVector], vector: Mapping) -> SparseVector:
    out = SparseVector()
    for word, coeff in vector.items():
        out.iadd_scaled(function(word), coeff)
    return out


def jacobiator(alpha: LinearMap, space: GradedSpace) -> LinearMap:
    """Classical graded Jacobiator u - u∘tau_2 + u∘tau_2 tau_1 on V^{⊗3}."""

    parity = space.parities
    tau2 = Permutation.transposition(3, 2)
    cycle = tau2 * Permutation.transposition(3, 1)

    def _value(word: Word) -> SparseVector:
        out = _left_nested(alpha, word)
        sign, moved = act_on_word(tau2, word, parity)
        out.iadd_scaled(_left_nested(alpha, moved), -sign)
        sign, moved = act_on_word(cycle, word, parity)
        out.iadd_scaled(_left_nested(alpha, moved), sign)
        return out

    return LinearMap.from_function(space.words(3), _value, "jacobiator")


def first_jacobi_failure(alpha: LinearMap, space: GradedSpace) -> tuple[str, str, str] | None:
    jac = jacobiator(alpha, space)
    for word in space.words(3):
        if jac.column(word):
            return tuple(space.names[letter] for letter in word)
    return None


def jacobi_witness(alpha: LinearMap, space: GradedSpace) -> LinearMap | None:
    """Return beta with beta ∘ Psi_3 == (alpha∘(alpha⊗id), alpha∘(id⊗alpha)), else None."""

    _check_antisymmetric(alpha, space)
    parity = space.parities
    tau2 = Permutation.transposition(3, 2)
    cycle = tau2 * Permutation.transposition(3, 1)
    third = Fraction(1, 3)

    def _beta(word: Word) -> SparseVector:
        out = _left_nested(alpha, word).scaled(3)
        for perm in (tau2, cycle):
            sign, moved = act_on_word(perm, word, parity)
            out.iadd_scaled(_left_nested(alpha, moved), -sign)
        return out.scaled(third)

    beta = LinearMap.from_function(space.words(3), _beta, "beta")
    psi, _ = psi_map(space, 3)
    for key in psi.source:
        i, _word = key
        column = psi.column(key)
        expected = _apply_word_map(
            (lambda w: _left_nested(alpha, w)) if i == 1 else (lambda w: _right_nested(alpha, w)),
            column,
        )
        if beta.apply(column) != expected:
            logger.debug("jacobi witness rejected at %s", key)
            return None
    return beta
