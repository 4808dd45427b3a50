from fractions import Fraction

import pytest

from app.services.freelie import (
    BCH_ALPHABET,
    FreeLieElem,
    LyndonWord,
    bch,
    bch_associativity_check,
    bch_oracle,
    bch_symmetry_check,
    from_associative,
    is_lyndon,
    lie_bracket,
    lyndon_basis,
    mbrace,
    mbrace_alphabet,
    mbrace_p1_closed,
    operad_round_trip,
    standard_factorization,
    to_associative,
)


def test_lyndon_words():
    assert is_lyndon((0, 1))
    assert is_lyndon((0, 0, 1))
    assert is_lyndon((0, 1, 1))
    assert not is_lyndon((1, 0))
    assert not is_lyndon((0, 0))
    assert not is_lyndon((0, 1, 0, 1))
    with pytest.raises(ValueError):
        LyndonWord((1, 0))


@pytest.mark.parametrize("degree, count", [(1, 2), (2, 1), (3, 2), (4, 3), (5, 6), (6, 9)])
def test_lyndon_basis_matches_witt_dimensions(degree, count):
    assert len(lyndon_basis(2, degree)) == count


def test_standard_factorization_takes_longest_lyndon_suffix():
    assert standard_factorization((0, 0, 1)) == ((0,), (0, 1))
    assert standard_factorization((0, 1, 1)) == ((0, 1), (1,))
    assert LyndonWord((0, 0, 1)).bracketing(BCH_ALPHABET) == "[x,[x,y]]"


def test_bracket_is_antisymmetric_and_expands_to_commutator():
    x = FreeLieElem.letter(BCH_ALPHABET, 0)
    y = FreeLieElem.letter(BCH_ALPHABET, 1)
    assert lie_bracket(x, y) == -lie_bracket(y, x)
    assert lie_bracket(x, x).is_zero()
    assert to_associative(lie_bracket(x, y)) == {(0, 1): 1, (1, 0): -1}
    yyx = lie_bracket(y, lie_bracket(y, x))
    assert yyx.terms == {(0, 1, 1): 1}


def test_from_associative_inverts_to_associative():
    x = FreeLieElem.letter(BCH_ALPHABET, 0)
    y = FreeLieElem.letter(BCH_ALPHABET, 1)
    element = lie_bracket(x, lie_bracket(x, y)).scaled(3) + lie_bracket(lie_bracket(x, y), y)
    assert from_associative(to_associative(element), BCH_ALPHABET) == element
    with pytest.raises(ValueError):
        from_associative({(0, 1): 1}, BCH_ALPHABET)


def test_bch_low_degrees():
    series = bch(3)
    assert series.coefficient((0,)) == 1
    assert series.coefficient((1,)) == 1
    assert series.coefficient((0, 1)) == Fraction(1, 2)
    assert series.coefficient((0, 0, 1)) == Fraction(1, 12)
    assert series.coefficient((0, 1, 1)) == Fraction(1, 12)
    assert len(series.terms) == 5


def test_bch_degree_four_has_a_single_term():
    quartic = bch(4).degree_part(4)
    assert quartic.terms == {(0, 0, 1, 1): Fraction(1, 24)}


@pytest.mark.parametrize("degree", [3, 5, 6])
def test_dynkin_and_elimination_routes_agree(degree):
    assert bch(degree) == bch_oracle(degree)


def test_bch_identities():
    assert bch_symmetry_check(5)
    assert bch_associativity_check(4)
    assert operad_round_trip()


def test_mbrace_edge_cases():
    assert mbrace(1, 0) == FreeLieElem.letter(mbrace_alphabet(1, 0), 0)
    assert mbrace(0, 1) == FreeLieElem.letter(mbrace_alphabet(0, 1), 0)
    assert mbrace(2, 0).is_zero()
    with pytest.raises(ValueError):
        mbrace(0, 0)


def test_mbrace_values():
    assert mbrace(1, 1).terms == {(0, 1): Fraction(1, 2)}
    assert mbrace(2, 1).terms == {(0, 1, 2): Fraction(1, 12), (0, 2, 1): Fraction(-1, 12)}
    assert mbrace(3, 1).is_zero()


@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_mbrace_linear_in_y_closed_form(p):
    assert mbrace_p1_closed(p) == mbrace(p, 1)


def test_records_carry_bracket_and_coefficient():
    records = mbrace(1, 1).to_records()
    assert records == [{"lyndon_word": "x1 y1", "bracket": "[x1,y1]", "coefficient": "1/2"}]
