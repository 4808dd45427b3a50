"""Exact rational helpers and the two Bernoulli-type series tables.

Every coefficient in the engine is a :class:`fractions.Fraction`. Sparse
vectors are plain dictionaries keyed by basis labels (words, monomials, pairs)
whose zero entries are dropped eagerly, so equality of vectors is equality of
dictionaries.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Iterable, Mapping

logger = logging.getLogger(__name__)

Rational = Fraction


def parse_rational(value: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"`` / ``"p"`` strings (or ints) into a reduced Fraction."""

    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    text = value.strip()
    if not text:
        raise ValueError("empty rational literal")
    return Fraction(text)


def format_rational(value: Fraction | int) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


class SparseVector(dict):
    """Mapping ``key -> Fraction`` that never stores a zero coefficient."""

    def __init__(self, data: Mapping | Iterable[tuple[Hashable, object]] = ()) -> None:
        super().__init__()
        items = data.items() if isinstance(data, Mapping) else data
        for key, coeff in items:
            self.add_term(key, coeff)

    def add_term(self, key: Hashable, coeff) -> None:
        if not coeff:
            return
        if not isinstance(coeff, Fraction):
            coeff = Fraction(coeff)
        total = self.get(key, 0) + coeff
        if total:
            self[key] = total
        else:
            self.pop(key, None)

    def iadd_scaled(self, other: Mapping, coeff=1) -> "SparseVector":
        if not coeff:
            return self
        for key, value in other.items():
            self.add_term(key, value * coeff)
        return self

    def scaled(self, coeff) -> "SparseVector":
        if not coeff:
            return SparseVector()
        return SparseVector((key, value * coeff) for key, value in self.items())

    def copy(self) -> "SparseVector":
        return SparseVector(self)

    def __add__(self, other: Mapping) -> "SparseVector":
        return self.copy().iadd_scaled(other)

    def __sub__(self, other: Mapping) -> "SparseVector":
        return self.copy().iadd_scaled(other, -1)

    def __neg__(self) -> "SparseVector":
        return self.scaled(-1)

    def __mul__(self, coeff) -> "SparseVector":
        return self.scaled(coeff)

    __rmul__ = __mul__


class SeriesKind(str, Enum):
    TODD = "todd"
    INVERSE_TODD = "inverse_todd"


@dataclass(frozen=True, slots=True)
class SeriesTable:
    """Taylor coefficients of x/(1-e^{-x}) (TODD) or x/(e^x-1) (INVERSE_TODD)."""

    kind: SeriesKind
    coefficients: tuple[Fraction, ...]

    def __getitem__(self, index: int) -> Fraction:
        return self.coefficients[index]

    def __len__(self) -> int:
        return len(self.coefficients)


def _reciprocal(series: list[Fraction]) -> list[Fraction]:
    """Exact inverse of a power series with constant term 1."""

    if series[0] != 1:
        raise ValueError("series must start with 1")
    inverse = [Fraction(1)]
    for n in range(1, len(series)):
        inverse.append(-sum((series[k] * inverse[n - k] for k in range(1, n + 1)), Fraction(0)))
    return inverse


def _factorial(n: int) -> int:
    result = 1
    for k in range(2, n + 1):
        result *= k
    return result


@lru_cache(maxsize=None)
def series_table(kind: SeriesKind, length: int) -> SeriesTable:
    """Return the first ``length`` coefficients of the requested series.

    TODD inverts (1-e^{-x})/x = sum (-1)^i x^i/(i+1)!, INVERSE_TODD inverts
    (e^x-1)/x = sum x^i/(i+1)!. The two are computed independently.
    """

    if length < 1:
        raise ValueError("length must be positive")
    sign = -1 if kind is SeriesKind.TODD else 1
    denominator_series = [Fraction(sign**i, _factorial(i + 1)) for i in range(length)]
    coefficients = tuple(_reciprocal(denominator_series))
    logger.debug("series table %s built up to index %d", kind.value, length - 1)
    return SeriesTable(kind=kind, coefficients=coefficients)


def todd_coefficient(index: int) -> Fraction:
    """i-th Taylor coefficient of x/(1-e^{-x}): 1, 1/2, 1/12, 0, -1/720, ..."""

    if index < 0:
        raise ValueError("index must be non-negative")
    return series_table(SeriesKind.TODD, index + 1)[index]


def inverse_todd_coefficient(index: int) -> Fraction:
    """i-th Taylor coefficient of x/(e^x-1): 1, -1/2, 1/12, 0, -1/720, ..."""

    if index < 0:
        raise ValueError("index must be non-negative")
    return series_table(SeriesKind.INVERSE_TODD, index + 1)[index]


def multiply_series(left: list[Fraction], right: list[Fraction], length: int) -> list[Fraction]:
    """Truncated Cauchy product, used to check a table against its reciprocal."""

    out = [Fraction(0)] * length
    for i, a in enumerate(left[:length]):
        if not a:
            continue
        for j, b in enumerate(right[: length - i]):
            out[i + j] += a * b
    return out


def binomial_half(j: int) -> Fraction:
    """Generalized binomial coefficient (1/2 choose j)."""

    value = Fraction(1)
    for k in range(j):
        value *= (Fraction(1, 2) - k) / (k + 1)
    return value
