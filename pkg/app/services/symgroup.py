"""The group algebra k[S_n]: permutations, the symmetrizer and the ideal decomposition.

Permutations are stored in one-line notation with images in ``1..n``. The
product ``g * h`` is the composite ``g ∘ h`` (apply ``h`` first), which makes the
tensor action of :mod:`app.services.gvs` a left action.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from app.services.models import PBWError
from app.services.scalar import SparseVector

logger = logging.getLogger(__name__)


class ArityMismatch(PBWError):
    """Raised when elements of different symmetric groups are combined."""

    code = "ARITY_MISMATCH"


@dataclass(frozen=True, slots=True)
class Permutation:
    images: tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation of 1..{len(self.images)}: {self.images}")

    @property
    def n(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def transposition(cls, n: int, i: int) -> "Permutation":
        """Adjacent transposition tau_i swapping i and i+1."""

        if not 1 <= i < n:
            raise ValueError(f"tau_{i} does not exist in S_{n}")
        images = list(range(1, n + 1))
        images[i - 1], images[i] = images[i], images[i - 1]
        return cls(tuple(images))

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if self.n != other.n:
            raise ArityMismatch(f"cannot compose S_{self.n} with S_{other.n}")
        return Permutation(tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for i, image in enumerate(self.images, start=1):
            inv[image - 1] = i
        return Permutation(tuple(inv))

    def reduced_word(self) -> tuple[int, ...]:
        """Indices (k_1, ..., k_m) with self = tau_{k_m} ∘ ... ∘ tau_{k_1}.

        Obtained by bubble-sorting the one-line list; swapping list slots k, k+1
        is right multiplication by tau_k.
        """

        current = list(self.images)
        word: list[int] = []
        for end in range(len(current) - 1, 0, -1):
            for k in range(end):
                if current[k] > current[k + 1]:
                    current[k], current[k + 1] = current[k + 1], current[k]
                    word.append(k + 1)
        return tuple(word)

    def __str__(self) -> str:
        return "[" + " ".join(str(i) for i in self.images) + "]"


class GroupAlgElem:
    """Finite Q-linear combination of permutations of a fixed arity."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: SparseVector | dict | None = None) -> None:
        self.n = n
        self.terms = SparseVector(terms or {})
        for perm in self.terms:
            if perm.n != n:
                raise ArityMismatch(f"permutation {perm} does not belong to S_{n}")

    @classmethod
    def from_perm(cls, perm: Permutation, coeff=1) -> "GroupAlgElem":
        return cls(perm.n, {perm: Fraction(coeff)})

    @classmethod
    def one(cls, n: int) -> "GroupAlgElem":
        return cls.from_perm(Permutation.identity(n))

    @classmethod
    def tau(cls, n: int, i: int) -> "GroupAlgElem":
        return cls.from_perm(Permutation.transposition(n, i))

    def _check(self, other: "GroupAlgElem") -> None:
        if self.n != other.n:
            raise ArityMismatch(f"cannot combine S_{self.n} with S_{other.n} elements")

    def __add__(self, other: "GroupAlgElem") -> "GroupAlgElem":
        self._check(other)
        return GroupAlgElem(self.n, self.terms + other.terms)

    def __sub__(self, other: "GroupAlgElem") -> "GroupAlgElem":
        self._check(other)
        return GroupAlgElem(self.n, self.terms - other.terms)

    def __neg__(self) -> "GroupAlgElem":
        return GroupAlgElem(self.n, -self.terms)

    def scaled(self, coeff) -> "GroupAlgElem":
        return GroupAlgElem(self.n, self.terms.scaled(coeff))

    def __mul__(self, other):
        if isinstance(other, GroupAlgElem):
            self._check(other)
            out = SparseVector()
            for g, a in self.terms.items():
                for h, b in other.terms.items():
                    out.add_term(g * h, a * b)
            return GroupAlgElem(self.n, out)
        return self.scaled(other)

    def __rmul__(self, coeff) -> "GroupAlgElem":
        return self.scaled(coeff)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupAlgElem):
            return NotImplemented
        return self.n == other.n and dict(self.terms) == dict(other.terms)

    __hash__ = None

    def __iter__(self):
        return iter(sorted(self.terms.items(), key=lambda item: item[0].images))

    def is_zero(self) -> bool:
        return not self.terms

    def __repr__(self) -> str:
        return f"GroupAlgElem(n={self.n}, terms={len(self.terms)})"

    def format(self) -> str:
        if not self.terms:
            return "0"
        parts = [f"{coeff}*{perm}" for perm, coeff in self]
        return " + ".join(parts)


def all_permutations(n: int) -> list[Permutation]:
    return [Permutation(images) for images in itertools.permutations(range(1, n + 1))]


def symmetrizer(n: int) -> GroupAlgElem:
    """pi_n = (1/n!) sum of all permutations."""

    if n < 1:
        raise ValueError("symmetrizer needs n >= 1")
    weight = Fraction(1, factorial(n))
    return GroupAlgElem(n, {perm: weight for perm in all_permutations(n)})


def ideal_decomposition(n: int) -> list[GroupAlgElem]:
    """Return (a_1, ..., a_{n-1}) with sum (1 - tau_i) a_i == 1 - pi_n.

    Each g is written as t_1 t_2 ... t_d with t_r adjacent transpositions, and
    1 - t_1...t_d telescopes to sum_r (1 - t_r) t_{r+1}...t_d.
    """

    if n < 2:
        raise ValueError("ideal decomposition needs n >= 2")
    weight = Fraction(1, factorial(n))
    parts = [SparseVector() for _ in range(n - 1)]
    taus = [Permutation.transposition(n, i) for i in range(1, n)]
    for g in all_permutations(n):
        factors = list(reversed(g.reduced_word()))
        tail = Permutation.identity(n)
        for r in range(len(factors) - 1, -1, -1):
            parts[factors[r] - 1].add_term(tail, weight)
            tail = taus[factors[r] - 1] * tail
    logger.debug("ideal decomposition of S_%d built", n)
    return [GroupAlgElem(n, part) for part in parts]


def reference_decomposition(n: int = 3) -> list[GroupAlgElem]:
    """Hand-written decomposition for n=3: 6a_1 = 3 + tau_2 + tau_2 tau_1, 3a_2 = 1 + tau_1."""

    if n != 3:
        raise ValueError("only the n=3 reference decomposition is tabulated")
    one = GroupAlgElem.one(3)
    tau1 = GroupAlgElem.tau(3, 1)
    tau2 = GroupAlgElem.tau(3, 2)
    a1 = (one.scaled(3) + tau2 + tau2 * tau1).scaled(Fraction(1, 6))
    a2 = (one + tau1).scaled(Fraction(1, 3))
    return [a1, a2]


def check_decomposition(n: int, parts: list[GroupAlgElem]) -> bool:
    """Re-expand sum (1 - tau_i) a_i and compare with 1 - pi_n."""

    if len(parts) != n - 1:
        raise ArityMismatch(f"expected {n - 1} elements, got {len(parts)}")
    one = GroupAlgElem.one(n)
    total = GroupAlgElem(n)
    for i, a_i in enumerate(parts, start=1):
        total = total + (one - GroupAlgElem.tau(n, i)) * a_i
    return total == one - symmetrizer(n)
