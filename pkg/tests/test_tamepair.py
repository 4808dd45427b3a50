from pathlib import Path

import pytest

from app.services import catalog
from app.services.tamepair import (
    MalformedPartition,
    ReductiveRequired,
    TamenessRequired,
    TripleSpec,
    antimorphism_check,
    check_reductive,
    check_tame,
    checks_for,
    delta_section_check,
    g_module_on_Un,
    induced_bracket,
    invariants,
    kernel_dimensions,
    load_triple,
    module_axiom_report,
    tame_report,
)
from app.services.ualg import TruncationOverflow

DATA = Path(__file__).resolve().parent.parent / "data"
TAME = ["h3_center", "aff1_line", "semidirect", "abelian_split"]


@pytest.mark.parametrize("name", sorted(catalog.TRIPLES))
def test_catalog_triples_are_reductive(name):
    assert check_reductive(catalog.TRIPLES[name]()).ok


def test_non_reductive_split_names_the_offending_pair():
    t = TripleSpec.from_names(catalog.sl2(), ["e"], ["h", "f"])
    result = check_reductive(t)
    assert not result.ok
    assert result.witness == ("e", "h")
    with pytest.raises(ReductiveRequired):
        check_tame(t)
    with pytest.raises(ReductiveRequired):
        module_axiom_report(t, 3)
    assert tame_report(t, 3) == {"reductive": False, "witness": ("e", "h")}


@pytest.mark.parametrize("name", TAME)
def test_tame_triples(name):
    assert check_tame(catalog.TRIPLES[name]()).ok


def test_cartan_split_of_sl2_is_not_tame():
    t = catalog.sl2_cartan()
    result = check_tame(t)
    assert not result.ok
    assert result.witness == ("e", "f", "e")
    with pytest.raises(TamenessRequired):
        induced_bracket(t)
    with pytest.raises(TamenessRequired):
        g_module_on_Un(t, 3)


def test_induced_brackets():
    assert induced_bracket(catalog.h3_center()).is_abelian()
    assert induced_bracket(catalog.aff1_line()).is_abelian()
    recovered = induced_bracket(catalog.semidirect())
    h3 = catalog.h3()
    assert recovered.space == h3.space
    assert recovered.constants == h3.constants


@pytest.mark.parametrize("name", TAME)
def test_module_axioms_hold_for_tame_triples(name):
    results = module_axiom_report(catalog.TRIPLES[name](), 3)
    assert [r.name for r in results] == ["module_axiom_nn", "module_axiom_nh", "module_axiom_hh"]
    assert all(r.ok for r in results)


def test_module_axioms_fail_on_the_n_block_when_not_tame():
    results = {r.name: r for r in module_axiom_report(catalog.sl2_cartan(), 3)}
    assert not results["module_axiom_nn"].ok
    assert results["module_axiom_nn"].witness[:2] == ("e", "f")
    assert results["module_axiom_nh"].ok
    assert results["module_axiom_hh"].ok


def test_tame_report_for_a_non_tame_triple():
    report = tame_report(catalog.sl2_cartan(), 3)
    assert report == {
        "reductive": True,
        "tame": False,
        "module_axioms": False,
        "witness": ("e", "f", "e"),
        "failing_axioms": ["module_axiom_nn"],
    }


def test_tame_report_for_a_tame_triple():
    report = tame_report(catalog.semidirect(), 3)
    assert report == {
        "reductive": True,
        "tame": True,
        "module_axioms": True,
        "section": True,
        "antimorphism": True,
    }


def test_module_action_on_the_unit():
    t = catalog.h3_center()
    module = g_module_on_Un(t, 3)
    x, y, z = (t.ambient.index(n) for n in "xyz")
    assert module.act_word((x, y), {(): 1}) == {(0, 1): 1}
    assert module.act(z, {(0,): 1}) == {}


def test_module_action_respects_truncation():
    t = catalog.aff1_line()
    module = g_module_on_Un(t, 2)
    with pytest.raises(TruncationOverflow):
        module.act(t.ambient.index("x"), {(0, 0): 1})
    assert module.act(t.ambient.index("h"), {(0, 0): 1}) == {(0, 0): 2}


def test_kernel_dimensions_and_section():
    t = catalog.aff1_line()
    assert kernel_dimensions(t, 3) == [0, 1, 3, 6]
    for name in TAME:
        assert delta_section_check(catalog.TRIPLES[name](), 3).ok


def test_invariants():
    assert len(invariants(catalog.h3_center(), 2)) == 6
    assert len(invariants(catalog.semidirect(), 2)) == 4
    assert len(invariants(catalog.aff1_line(), 3)) == 1


@pytest.mark.parametrize("name", TAME)
def test_antimorphism(name):
    assert antimorphism_check(catalog.TRIPLES[name](), 3).ok


def test_checks_for_stops_after_failed_tameness():
    names = [r.name for r in checks_for(catalog.sl2_cartan(), 3)]
    assert names == ["reductive", "tame", "module_axiom_nn", "module_axiom_nh", "module_axiom_hh"]
    full = [r for r in checks_for(catalog.semidirect(), 3)]
    assert [r.name for r in full][-3:] == ["induced_bracket_jacobi", "delta_section", "antimorphism"]
    assert all(r.ok for r in full)


def test_malformed_partitions():
    g = catalog.sl2()
    with pytest.raises(MalformedPartition):
        TripleSpec.from_names(g, ["h"], ["e"])
    with pytest.raises(MalformedPartition):
        TripleSpec.from_names(g, ["h", "e"], ["e", "f"])
    with pytest.raises(MalformedPartition):
        TripleSpec.from_names(g, ["q"], ["e", "f", "h"])


def test_triple_files():
    t = load_triple(DATA / "sl2_cartan.json")
    assert t.sub_names == ("h",)
    assert t.complement_names == ("e", "f")
    assert t.ambient.constants == catalog.sl2().constants
    assert t.name == "sl2_cartan"


def test_antimorphism_rejects_a_non_invariant_element():
    t = catalog.semidirect()
    x = t.complement_names.index("x")
    result = antimorphism_check(t, 3, candidates=[{(x,): 1}])
    assert not result.ok
    assert result.witness[:2] == ("not equivariant", "d")


def test_antimorphism_accepts_weight_zero_elements():
    t = catalog.semidirect()
    x, y, z = (t.complement_names.index(n) for n in "xyz")
    assert antimorphism_check(t, 3, candidates=[{(z,): 1}, {(x, y): 1}]).ok


@pytest.mark.parametrize("name", ["h3_center", "aff1_line"])
def test_tame_suite_at_four(name):
    t = catalog.TRIPLES[name]()
    assert all(r.ok for r in module_axiom_report(t, 4))
    assert delta_section_check(t, 4).ok
    assert antimorphism_check(t, 4).ok


def test_invariants_and_kernel_at_four():
    assert len(invariants(catalog.h3_center(), 4)) == 15
    assert len(invariants(catalog.aff1_line(), 4)) == 1
    assert kernel_dimensions(catalog.aff1_line(), 4) == [0, 1, 3, 6, 10]
