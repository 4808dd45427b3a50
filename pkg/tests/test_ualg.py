from fractions import Fraction

import pytest

from app.services import catalog
from app.services.ualg import (
    SymElem,
    TruncationOverflow,
    UEnvElem,
    associativity_check,
    coalgebra_morphism_check,
    contraction,
    deformation_check,
    m0,
    omega,
    omega_power,
    oracle_equivalence_check,
    parse_monomial,
    pbw_oracle_multiply,
    reduced_coproduct_self_test,
    reverse_pbw_check,
    star_multiply,
    step_one_check,
    structure_check,
    structure_coefficients,
    sym_to_uenv,
    todd_formula_check,
    uenv_to_sym,
)


FIXTURES = ["abelian2", "a2", "h3", "sl2", "aff1", "super_heisenberg"]


def _m(g, *names, trunc=4, coeff=1):
    return SymElem.monomial(g, trunc, *names, coeff=coeff)


def test_a2_star_values():
    g = catalog.a2()
    x, y = g.index("x"), g.index("y")
    assert star_multiply(_m(g, "x"), _m(g, "y")) == {(x, y): 1, (y,): Fraction(1, 2)}
    assert star_multiply(_m(g, "y"), _m(g, "x")) == {(x, y): 1, (y,): Fraction(-1, 2)}
    assert star_multiply(_m(g, "x", "x"), _m(g, "y")) == {
        (x, x, y): 1,
        (x, y): 1,
        (y,): Fraction(1, 6),
    }


def test_a2_omega_values():
    g = catalog.a2()
    x, y = g.index("x"), g.index("y")
    assert omega(g, 1).column(((x,), y)) == {((), y): 1}
    assert omega(g, 2).column(((x, x), y)) == {((x,), y): 2}
    assert not omega(g, 2).column(((x, x), x))
    assert omega_power(g, 2, 3).is_zero()


def test_commutators_reproduce_the_bracket():
    g = catalog.sl2()
    e, f, h = _m(g, "e"), _m(g, "f"), _m(g, "h")
    assert star_multiply(e, f) - star_multiply(f, e) == {(g.index("h"),): 1}
    assert star_multiply(h, e) - star_multiply(e, h) == {(g.index("e"),): 2}

    heis = catalog.h3()
    value = star_multiply(_m(heis, "x"), _m(heis, "y"))
    assert value == {(0, 1): 1, (2,): Fraction(1, 2)}


def test_odd_square_is_half_the_bracket():
    g = catalog.super_heisenberg()
    t = _m(g, "t")
    assert star_multiply(t, t) == {(g.index("z"),): Fraction(1, 2)}


def test_abelian_star_is_the_commutative_product():
    g = catalog.abelian(2)
    a = _m(g, "v1", "v2") + _m(g, "v1", coeff=3)
    b = _m(g, "v2") + SymElem.one(g, 4)
    assert star_multiply(a, b) == m0(a, b)


def test_unit_is_neutral():
    g = catalog.sl2()
    one = SymElem.one(g, 4)
    a = _m(g, "e", "f") + _m(g, "h", coeff=Fraction(2, 3))
    assert star_multiply(one, a) == a
    assert star_multiply(a, one) == a


def test_truncation_overflow():
    g = catalog.a2()
    with pytest.raises(TruncationOverflow):
        SymElem.monomial(g, 2, "x", "x", "y")
    with pytest.raises(TruncationOverflow):
        star_multiply(_m(g, "x", "y", trunc=3), _m(g, "x", "y", trunc=3))
    with pytest.raises(ValueError):
        star_multiply(_m(g, "x", trunc=3), _m(g, "y", trunc=4))


def test_parse_monomial():
    g = catalog.a2()
    assert parse_monomial(g, "x^2*y") == (1, (0, 0, 1))
    assert parse_monomial(g, "1") == (1, ())
    assert parse_monomial(g, "y*x") == (1, (0, 1))
    odd = catalog.super_heisenberg()
    assert parse_monomial(odd, "t^2")[0] == 0


def test_universal_envelope_normal_form():
    g = catalog.sl2()
    e, h, f = (UEnvElem(g, {(g.index(n),): 1}) for n in "ehf")
    assert e * f - f * e == h
    assert (f * e).terms == {(0, 2): 1, (1,): -1}


def test_symmetrization_round_trip():
    g = catalog.sl2()
    vector = {(0, 1, 2): Fraction(1, 3), (1, 1): 2, (2,): -1, (): 5}
    assert uenv_to_sym(g, sym_to_uenv(g, vector)) == vector


@pytest.mark.parametrize("name", FIXTURES)
def test_star_matches_the_pbw_oracle(name):
    g = catalog.VALID[name]()
    assert oracle_equivalence_check(g, 4).ok


def test_oracle_multiply_on_elements():
    g = catalog.sl2()
    a = _m(g, "e", "h") + _m(g, "f", coeff=-2)
    b = _m(g, "f") + _m(g, "h", coeff=Fraction(1, 2))
    assert pbw_oracle_multiply(a, b) == star_multiply(a, b)


@pytest.mark.parametrize("name", FIXTURES)
def test_star_is_associative_and_deforms_m0(name):
    g = catalog.VALID[name]()
    assert associativity_check(g, 3).ok
    assert deformation_check(g, 4).ok


@pytest.mark.slow
@pytest.mark.parametrize("name", FIXTURES)
def test_star_is_associative_through_degree_four(name):
    assert associativity_check(catalog.VALID[name](), 4).ok


@pytest.mark.parametrize("name", FIXTURES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_todd_formula(name, n):
    assert todd_formula_check(catalog.VALID[name](), n).ok


@pytest.mark.parametrize("name", FIXTURES)
def test_structure_coefficients(name):
    g = catalog.VALID[name]()
    for p in (2, 3, 4):
        failures = [r for r in structure_check(g, p) if not r.ok]
        assert failures == []


def test_structure_coefficient_names_and_range():
    g = catalog.a2()
    assert structure_coefficients(g, 2, 1).map.name == "c_2^1"
    with pytest.raises(ValueError):
        structure_coefficients(g, 2, 3)


@pytest.mark.parametrize("name", FIXTURES)
def test_coalgebra_and_step_one(name):
    g = catalog.VALID[name]()
    assert coalgebra_morphism_check(g, 4).ok
    for k in (1, 2):
        assert step_one_check(g, 3, k).ok


@pytest.mark.parametrize("name", FIXTURES)
def test_reverse_pbw(name):
    assert reverse_pbw_check(catalog.VALID[name](), 4).ok


def test_reduced_coproduct_and_contraction():
    g = catalog.super_heisenberg()
    for n in (1, 2, 3):
        assert reduced_coproduct_self_test(g, n).ok
    c = contraction(catalog.a2(), 2, 1)
    assert c.column(((0, 0), (0,))) == {(0,): 2}
    with pytest.raises(ValueError):
        contraction(g, 1, 2)

