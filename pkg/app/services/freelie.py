"""Free Lie algebras in the Lyndon basis, the BCH series and the multibraces M_{p,q}.

Letters are integers ordered by value; a Lyndon word stands for the bracket
given by its standard factorization w = uv, v the longest proper Lyndon suffix.
Elements of the free associative algebra are SparseVectors keyed by words.
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import factorial
from typing import Iterator, Mapping, Sequence

from app.services.scalar import SparseVector, format_rational, todd_coefficient

logger = logging.getLogger(__name__)

Word = tuple[int, ...]
BCH_ALPHABET = ("x", "y")


def is_lyndon(word: Sequence[int]) -> bool:
    word = tuple(word)
    if not word:
        return False
    return all(word < word[i:] + word[:i] for i in range(1, len(word)))


def lyndon_words_upto(alphabet_size: int, max_length: int) -> Iterator[Word]:
    """Duval's generation of all Lyndon words of length <= max_length, in lex order."""

    word = [-1]
    while word:
        word[-1] += 1
        yield tuple(word)
        period = len(word)
        while len(word) < max_length:
            word.append(word[len(word) - period])
        while word and word[-1] == alphabet_size - 1:
            word.pop()


@lru_cache(maxsize=None)
def standard_factorization(word: Word) -> tuple[Word, Word]:
    if len(word) < 2:
        raise ValueError(f"single letters have no standard factorization: {word}")
    for cut in range(1, len(word)):
        if is_lyndon(word[cut:]):
            return word[:cut], word[cut:]
    raise ValueError(f"{word} is not a Lyndon word")  # unreachable for Lyndon input


@dataclass(frozen=True, slots=True)
class LyndonWord:
    letters: Word

    def __post_init__(self) -> None:
        if not is_lyndon(self.letters):
            raise ValueError(f"{self.letters} is not a Lyndon word")

    @property
    def factorization(self) -> tuple[Word, Word] | None:
        return standard_factorization(self.letters) if len(self.letters) > 1 else None

    def bracketing(self, names: Sequence[str]) -> str:
        return bracket_string(self.letters, names)


def bracket_string(word: Word, names: Sequence[str]) -> str:
    if len(word) == 1:
        return names[word[0]]
    left, right = standard_factorization(word)
    return f"[{bracket_string(left, names)},{bracket_string(right, names)}]"


def word_string(word: Word, names: Sequence[str]) -> str:
    joiner = "" if all(len(name) == 1 for name in names) else " "
    return joiner.join(names[letter] for letter in word)


def lyndon_basis(alphabet_size: int, degree: int) -> list[LyndonWord]:
    if alphabet_size < 1 or degree < 1:
        raise ValueError("alphabet_size and degree must be positive")
    return [LyndonWord(w) for w in lyndon_words_upto(alphabet_size, degree) if len(w) == degree]


@lru_cache(maxsize=None)
def _bracket_lyndon(u: Word, v: Word) -> tuple[tuple[Word, Fraction], ...]:
    """[P_u, P_v] in the Lyndon basis, rewriting with antisymmetry and Jacobi."""

    if u == v:
        return ()
    if u > v:
        return tuple((w, -c) for w, c in _bracket_lyndon(v, u))
    if len(u) == 1 or standard_factorization(u)[1] >= v:
        return ((u + v, Fraction(1)),)
    u1, u2 = standard_factorization(u)
    out = SparseVector()
    # [[u1,u2],v] = [u1,[u2,v]] + [[u1,v],u2]
    for w, c in _bracket_lyndon(u2, v):
        for w2, c2 in _bracket_lyndon(u1, w):
            out.add_term(w2, c * c2)
    for w, c in _bracket_lyndon(u1, v):
        for w2, c2 in _bracket_lyndon(w, u2):
            out.add_term(w2, c * c2)
    return tuple(sorted(out.items()))


@dataclass(slots=True)
class FreeLieElem:
    alphabet: tuple[str, ...]
    terms: SparseVector = field(default_factory=SparseVector)

    def __post_init__(self) -> None:
        self.terms = SparseVector(self.terms)

    @classmethod
    def letter(cls, alphabet: Sequence[str], index: int, coeff=1) -> "FreeLieElem":
        return cls(tuple(alphabet), SparseVector({(index,): coeff}))

    @classmethod
    def zero(cls, alphabet: Sequence[str]) -> "FreeLieElem":
        return cls(tuple(alphabet))

    def _same(self, other: "FreeLieElem") -> None:
        if self.alphabet != other.alphabet:
            raise ValueError(f"alphabets differ: {self.alphabet} vs {other.alphabet}")

    def __add__(self, other: "FreeLieElem") -> "FreeLieElem":
        self._same(other)
        return FreeLieElem(self.alphabet, self.terms + other.terms)

    def __sub__(self, other: "FreeLieElem") -> "FreeLieElem":
        self._same(other)
        return FreeLieElem(self.alphabet, self.terms - other.terms)

    def __neg__(self) -> "FreeLieElem":
        return FreeLieElem(self.alphabet, -self.terms)

    def scaled(self, coeff) -> "FreeLieElem":
        return FreeLieElem(self.alphabet, self.terms.scaled(coeff))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FreeLieElem):
            return NotImplemented
        return self.alphabet == other.alphabet and dict(self.terms) == dict(other.terms)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def degree_part(self, degree: int) -> "FreeLieElem":
        return FreeLieElem(self.alphabet, {w: c for w, c in self.terms.items() if len(w) == degree})

    def truncated(self, max_degree: int) -> "FreeLieElem":
        return FreeLieElem(self.alphabet, {w: c for w, c in self.terms.items() if len(w) <= max_degree})

    def coefficient(self, word: Word) -> Fraction:
        return self.terms.get(tuple(word), Fraction(0))

    def sorted_terms(self) -> list[tuple[Word, Fraction]]:
        return sorted(self.terms.items(), key=lambda item: (len(item[0]), item[0]))

    def to_records(self) -> list[dict[str, str]]:
        return [
            {
                "lyndon_word": word_string(word, self.alphabet),
                "bracket": bracket_string(word, self.alphabet),
                "coefficient": format_rational(coeff),
            }
            for word, coeff in self.sorted_terms()
        ]

    def format(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{format_rational(c)}*{bracket_string(w, self.alphabet)}" for w, c in self.sorted_terms())


def lie_bracket(a: FreeLieElem, b: FreeLieElem) -> FreeLieElem:
    a._same(b)
    out = SparseVector()
    for u, x in a.terms.items():
        for v, y in b.terms.items():
            for w, c in _bracket_lyndon(u, v):
                out.add_term(w, x * y * c)
    return FreeLieElem(a.alphabet, out)


# -- free associative algebra -----------------------------------------------------


def assoc_multiply(left: Mapping, right: Mapping, max_degree: int | None = None) -> SparseVector:
    out = SparseVector()
    for u, x in left.items():
        for v, y in right.items():
            if max_degree is not None and len(u) + len(v) > max_degree:
                continue
            out.add_term(u + v, x * y)
    return out


@lru_cache(maxsize=None)
def _lyndon_polynomial(word: Word) -> tuple[tuple[Word, Fraction], ...]:
    if len(word) == 1:
        return ((word, Fraction(1)),)
    u, v = standard_factorization(word)
    pu, pv = dict(_lyndon_polynomial(u)), dict(_lyndon_polynomial(v))
    out = assoc_multiply(pu, pv) - assoc_multiply(pv, pu)
    return tuple(sorted(out.items()))


def to_associative(element: FreeLieElem) -> SparseVector:
    out = SparseVector()
    for word, coeff in element.terms.items():
        out.iadd_scaled(dict(_lyndon_polynomial(word)), coeff)
    return out


def from_associative(vector: Mapping, alphabet: Sequence[str]) -> FreeLieElem:
    """Re-express a Lie polynomial in the Lyndon basis by triangular elimination.

    P_w = w + (lexicographically larger words of the same length), so the
    smallest remaining word is always the next Lyndon leading term.
    """

    remaining = SparseVector(vector)
    out = SparseVector()
    while remaining:
        word = min(remaining, key=lambda w: (len(w), w))
        if not is_lyndon(word):
            raise ValueError(f"not a Lie polynomial: leading word {word} is not Lyndon")
        coeff = remaining[word]
        out.add_term(word, coeff)
        remaining.iadd_scaled(dict(_lyndon_polynomial(word)), -coeff)
    return FreeLieElem(tuple(alphabet), out)


def left_normed(word: Word, alphabet: Sequence[str]) -> FreeLieElem:
    """[...[[w1,w2],w3],...,wn] in the Lyndon basis."""

    alphabet = tuple(alphabet)
    current = FreeLieElem.letter(alphabet, word[0])
    for letter in word[1:]:
        current = lie_bracket(current, FreeLieElem.letter(alphabet, letter))
    return current


def dynkin_projection(vector: Mapping, alphabet: Sequence[str]) -> FreeLieElem:
    """Dynkin idempotent applied degreewise: (1/n) sum c_w [...[w1,w2],...,wn]."""

    alphabet = tuple(alphabet)
    out = FreeLieElem.zero(alphabet)
    for word, coeff in vector.items():
        if not word:
            continue
        out = out + left_normed(word, alphabet).scaled(Fraction(coeff) / len(word))
    return out


@lru_cache(maxsize=None)
def _log_of_exp_product(max_degree: int) -> tuple[tuple[Word, Fraction], ...]:
    """log(e^x e^y) in the free associative algebra on {x=0, y=1}, degree <= max_degree."""

    z = SparseVector()
    for a in range(max_degree + 1):
        for b in range(max_degree + 1 - a):
            if a + b:
                z.add_term((0,) * a + (1,) * b, Fraction(1, factorial(a) * factorial(b)))
    log = SparseVector()
    power = SparseVector({(): 1})
    for k in range(1, max_degree + 1):
        power = assoc_multiply(power, z, max_degree)
        log.iadd_scaled(power, Fraction((-1) ** (k + 1), k))
    logger.debug("log(e^x e^y) expanded to degree %d with %d words", max_degree, len(log))
    return tuple(sorted(log.items()))


def bch(max_degree: int) -> FreeLieElem:
    """Truncated bch(x, y) through the Dynkin projection of log(e^x e^y)."""

    if max_degree < 1:
        raise ValueError("truncation degree must be >= 1")
    return dynkin_projection(dict(_log_of_exp_product(max_degree)), BCH_ALPHABET)


def bch_oracle(max_degree: int) -> FreeLieElem:
    """Same series re-expressed by triangular elimination instead of Dynkin."""

    if max_degree < 1:
        raise ValueError("truncation degree must be >= 1")
    return from_associative(dict(_log_of_exp_product(max_degree)), BCH_ALPHABET)


def multilinear_part(element: FreeLieElem, multidegree: Sequence[int]) -> FreeLieElem:
    if len(multidegree) != len(element.alphabet):
        raise ValueError("multidegree must have one entry per letter")
    wanted = {i: count for i, count in enumerate(multidegree)}
    out = {}
    for word, coeff in element.terms.items():
        counts = Counter(word)
        if all(counts.get(i, 0) == count for i, count in wanted.items()):
            out[word] = coeff
    return FreeLieElem(element.alphabet, out)


def mbrace_alphabet(p: int, q: int) -> tuple[str, ...]:
    return tuple(f"x{i}" for i in range(1, p + 1)) + tuple(f"y{j}" for j in range(1, q + 1))


@lru_cache(maxsize=None)
def _mbrace_terms(p: int, q: int) -> tuple[tuple[Word, Fraction], ...]:
    n = p + q
    polarized = SparseVector()
    for word, coeff in _log_of_exp_product(n):
        if len(word) != n or word.count(0) != p:
            continue
        x_slots = [i for i, letter in enumerate(word) if letter == 0]
        y_slots = [i for i, letter in enumerate(word) if letter == 1]
        for xs in itertools.permutations(range(p)):
            for ys in itertools.permutations(range(p, n)):
                new = [0] * n
                for slot, letter in zip(x_slots, xs):
                    new[slot] = letter
                for slot, letter in zip(y_slots, ys):
                    new[slot] = letter
                polarized.add_term(tuple(new), coeff)
    element = dynkin_projection(polarized, mbrace_alphabet(p, q))
    logger.debug("M_{%d,%d} has %d Lyndon terms", p, q, len(element.terms))
    return tuple(sorted(element.terms.items()))


def mbrace(p: int, q: int) -> FreeLieElem:
    """Multilinear part of bch(x_1+...+x_p, y_1+...+y_q).

    M_{1,0} = x_1 and M_{0,1} = y_1; M_{p,0} and M_{0,q} vanish otherwise.
    """

    if p < 0 or q < 0 or p + q < 1:
        raise ValueError("need p, q >= 0 and p + q >= 1")
    alphabet = mbrace_alphabet(p, q)
    if q == 0 or p == 0:
        if p + q == 1:
            return FreeLieElem.letter(alphabet, 0)
        return FreeLieElem.zero(alphabet)
    return FreeLieElem(alphabet, dict(_mbrace_terms(p, q)))


def right_nested(word: Sequence[int], alphabet: Sequence[str]) -> FreeLieElem:
    """[w1,[w2,...,[w_{n-1},w_n]...]] in the Lyndon basis."""

    alphabet = tuple(alphabet)
    current = FreeLieElem.letter(alphabet, word[-1])
    for letter in reversed(word[:-1]):
        current = lie_bracket(FreeLieElem.letter(alphabet, letter), current)
    return current


def mbrace_p1_closed(p: int) -> FreeLieElem:
    """M_{p,1} = todd(p) * sum over sigma of [x_s1,[x_s2,...,[x_sp, y]...]].

    todd(1) = 1/2 reproduces M_{1,1} = [x,y]/2.
    """

    if p < 1:
        raise ValueError("p must be >= 1")
    alphabet = mbrace_alphabet(p, 1)
    coeff = todd_coefficient(p)
    total = FreeLieElem.zero(alphabet)
    if not coeff:
        return total
    for order in itertools.permutations(range(p)):
        total = total + right_nested(order + (p,), alphabet)
    return total.scaled(coeff)


def substitute(element: FreeLieElem, images: Sequence[FreeLieElem], max_degree: int) -> FreeLieElem:
    """Evaluate element with letter i replaced by images[i], dropping degrees > max_degree."""

    if len(images) != len(element.alphabet):
        raise ValueError("one image per letter is required")
    target = images[0].alphabet
    memo: dict[Word, FreeLieElem] = {}

    def _value(word: Word) -> FreeLieElem:
        if word in memo:
            return memo[word]
        if len(word) == 1:
            result = images[word[0]].truncated(max_degree)
        else:
            left, right = standard_factorization(word)
            result = lie_bracket(_value(left), _value(right)).truncated(max_degree)
        memo[word] = result
        return result

    total = FreeLieElem.zero(target)
    for word, coeff in element.terms.items():
        total = total + _value(word).scaled(coeff)
    return total


def operad_round_trip() -> bool:
    """M_{1,1}(x,y) - M_{1,1}(y,x) == [x,y]."""

    m11 = mbrace(1, 1)
    alphabet = m11.alphabet
    x, y = FreeLieElem.letter(alphabet, 0), FreeLieElem.letter(alphabet, 1)
    swapped = substitute(m11, [y, x], 2)
    return m11 - swapped == lie_bracket(x, y)


def bch_symmetry_check(max_degree: int) -> bool:
    """bch(x,y) == -bch(-y,-x) through the given degree."""

    series = bch(max_degree)
    x, y = FreeLieElem.letter(BCH_ALPHABET, 0), FreeLieElem.letter(BCH_ALPHABET, 1)
    mirrored = -substitute(series, [-y, -x], max_degree)
    return series == mirrored


def bch_associativity_check(max_degree: int) -> bool:
    """bch(bch(x,y),z) == bch(x,bch(y,z)) through the given degree."""

    series = bch(max_degree)
    alphabet = ("x", "y", "z")
    x, y, z = (FreeLieElem.letter(alphabet, i) for i in range(3))
    left = substitute(series, [substitute(series, [x, y], max_degree), z], max_degree)
    right = substitute(series, [x, substitute(series, [y, z], max_degree)], max_degree)
    return left == right
