from fractions import Fraction

import pytest

from app.services.scalar import (
    SeriesKind,
    SparseVector,
    binomial_half,
    format_rational,
    inverse_todd_coefficient,
    multiply_series,
    parse_rational,
    series_table,
    todd_coefficient,
)


def test_todd_coefficients_match_bernoulli_numbers():
    assert [todd_coefficient(i) for i in range(5)] == [
        Fraction(1),
        Fraction(1, 2),
        Fraction(1, 12),
        Fraction(0),
        Fraction(-1, 720),
    ]
    assert todd_coefficient(6) == Fraction(1, 30240)


def test_inverse_todd_flips_odd_signs():
    assert inverse_todd_coefficient(1) == Fraction(-1, 2)
    assert inverse_todd_coefficient(2) == Fraction(1, 12)
    for i in range(12):
        assert todd_coefficient(i) == (-1) ** i * inverse_todd_coefficient(i)


def test_todd_table_inverts_its_denominator():
    length = 9
    todd = list(series_table(SeriesKind.TODD, length).coefficients)
    denominator = [Fraction((-1) ** i, 1) / _factorial(i + 1) for i in range(length)]
    assert multiply_series(todd, denominator, length) == [Fraction(1)] + [Fraction(0)] * (length - 1)


def _factorial(n):
    out = 1
    for k in range(2, n + 1):
        out *= k
    return out


def test_negative_index_rejected():
    with pytest.raises(ValueError):
        todd_coefficient(-1)


def test_parse_and_format_rational():
    assert parse_rational("3/6") == Fraction(1, 2)
    assert parse_rational(" -4 ") == Fraction(-4)
    assert format_rational(Fraction(4, 2)) == "2"
    assert format_rational(Fraction(-1, 3)) == "-1/3"
    with pytest.raises(ValueError):
        parse_rational("")


def test_sparse_vector_drops_cancelled_terms():
    v = SparseVector({"a": 1, "b": 0})
    assert v == {"a": 1}
    v.add_term("a", -1)
    assert v == {}
    w = SparseVector({"a": Fraction(1, 2)}) + {"b": 2}
    assert w.scaled(2) == {"a": 1, "b": 4}
    assert (w - w) == {}


def test_binomial_half():
    assert [binomial_half(j) for j in range(4)] == [Fraction(1), Fraction(1, 2), Fraction(-1, 8), Fraction(1, 16)]
