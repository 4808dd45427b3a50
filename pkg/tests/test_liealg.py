from fractions import Fraction
from pathlib import Path

import pytest

from app.models import AlgebraFile
from app.services import catalog
from app.services.liealg import (
    AntisymmetryViolation,
    BracketDegreeViolation,
    JacobiViolation,
    SpecError,
    bullet_epsilon_check,
    contraction_composition_check,
    corollary_check,
    from_brackets,
    from_spec,
    invariance_check,
    load_algebra,
    nu,
    polarized_value,
    snake_check,
    to_spec,
    trace_identity_check,
    validate,
)

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.mark.parametrize("name", sorted(catalog.VALID))
def test_catalog_algebras_validate(name):
    g = catalog.VALID[name]()
    assert validate(g) is g


@pytest.mark.parametrize("name", sorted(catalog.VALID))
def test_spec_round_trip(name):
    g = catalog.VALID[name]()
    assert from_spec(to_spec(g)) == g
    again = AlgebraFile.model_validate_json(to_spec(g).model_dump_json())
    assert from_spec(again) == g


def test_data_files_match_catalog():
    assert load_algebra(DATA / "sl2.json") == catalog.sl2()
    assert load_algebra(DATA / "super_heisenberg.json") == catalog.super_heisenberg()


@pytest.mark.parametrize("build", [catalog.invalid_jacobi, catalog.invalid_super])
def test_jacobi_violation_carries_a_witness(build):
    with pytest.raises(JacobiViolation) as excinfo:
        validate(build())
    assert excinfo.value.witness is not None
    assert len(excinfo.value.witness) == 3


def test_invalid_files_raise():
    with pytest.raises(JacobiViolation):
        load_algebra(DATA / "invalid_jacobi.json")
    with pytest.raises(SpecError):
        load_algebra(DATA / "missing.json")


def test_bracket_degree_and_antisymmetry_violations():
    with pytest.raises(BracketDegreeViolation):
        from_brackets("bad", [("x", 0), ("y", 1)], {("x", "y"): {"x": 1}})
    with pytest.raises(AntisymmetryViolation):
        from_brackets("bad", [("x", 0), ("y", 0)], {("x", "x"): {"y": 1}})
    with pytest.raises(SpecError):
        from_brackets(
            "bad",
            [("x", 0), ("y", 0)],
            {("x", "y"): {"y": 1}, ("y", "x"): {"y": 1}},
        )


def test_nu_for_sl2_is_the_killing_form():
    g = catalog.sl2()
    e, h, f = (g.index(name) for name in "ehf")
    assert nu(g, 2) == {(h, h): 8, (e, f): 8}
    assert polarized_value(g, nu(g, 2), ["h", "h"]) == 8
    assert polarized_value(g, nu(g, 2), ["e", "f"]) == 4
    assert polarized_value(g, nu(g, 2), ["e", "e"]) == 0


def test_nu_for_a2():
    g = catalog.a2()
    x = g.index("x")
    assert nu(g, 1) == {(x,): 1}
    assert nu(g, 2) == {(x, x): 1}
    assert polarized_value(g, nu(g, 1), ["x"]) == Fraction(1)


def test_nu_vanishes_on_nilpotent_algebras():
    assert nu(catalog.h3(), 2).is_zero()
    assert nu(catalog.abelian(3), 1).is_zero()


@pytest.mark.parametrize("name", ["sl2", "a2", "h3", "super_heisenberg", "semidirect_h3"])
def test_nu_is_invariant(name):
    g = catalog.VALID[name]()
    for k in (1, 2, 3):
        assert invariance_check(g, nu(g, k), f"nu_{k}").ok


def test_non_invariant_form_is_caught():
    g = catalog.sl2()
    result = invariance_check(g, {(g.index("h"), g.index("h")): 1}, "h_squared")
    assert not result.ok
    assert result.name == "h_squared_invariance"


@pytest.mark.parametrize("name", ["sl2", "a2", "super_heisenberg"])
def test_coaction_identities(name):
    g = catalog.VALID[name]()
    assert snake_check(g).ok
    assert bullet_epsilon_check(g, 1)
    assert bullet_epsilon_check(g, 2)
    assert contraction_composition_check(g, 3, 1, 1).ok


@pytest.mark.parametrize("name", ["sl2", "a2", "super_heisenberg"])
def test_omega_powers_factor_through_bullets(name):
    g = catalog.VALID[name]()
    assert corollary_check(g, 2, 1).ok
    assert corollary_check(g, 3, 2).ok


@pytest.mark.parametrize("name", ["sl2", "a2", "h3"])
def test_trace_identity(name):
    g = catalog.VALID[name]()
    assert trace_identity_check(g, 2, 1)
    assert trace_identity_check(g, 3, 2)


def test_trace_identity_needs_n_at_least_p():
    with pytest.raises(ValueError):
        trace_identity_check(catalog.a2(), 1, 2)


@pytest.mark.parametrize("name", ["sl2", "super_heisenberg"])
def test_omega_powers_factor_through_bullets_at_three(name):
    g = catalog.VALID[name]()
    assert corollary_check(g, 3, 3).ok
    assert contraction_composition_check(g, 3, 1, 2).ok
    assert contraction_composition_check(g, 3, 2, 1).ok
