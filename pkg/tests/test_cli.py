from pathlib import Path

import pytest

from app.core.config import get_settings
from app.main import main, run, verify_suite
from app.services import catalog

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(autouse=True)
def reset_env(monkeypatch):
    for key in ("PBW_DEFAULT_TRUNC", "PBW_TRUNC_CEILING", "PBW_LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("PBW_DATA_DIR", str(DATA))
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def _statuses(report):
    return {record.check_name: record.status for record in report.results}


def test_validate_accepts_sl2():
    report = run(["validate", "--algebra", "sl2"])
    assert report.exit_status == 0
    assert _statuses(report) == {"lie_algebra": "PASS", "round_trip": "PASS"}
    assert report.data["name"] == "sl2"


def test_validate_reports_the_jacobi_witness():
    report = run(["validate", "--algebra", "invalid_jacobi"])
    assert report.exit_status == 1
    record = report.results[0]
    assert record.status == "FAIL"
    assert record.witness is not None


def test_validate_accepts_a_file_path():
    report = run(["validate", "--algebra", str(DATA / "super_heisenberg.json")])
    assert report.exit_status == 0


def test_unknown_algebra_is_an_input_error():
    report = run(["validate", "--algebra", "no_such_algebra"])
    assert report.exit_status == 2
    assert report.data["error"] == "SPEC_ERROR"


def test_usage_errors():
    assert run(["frobnicate"]).exit_status == 2
    report = run(["star"])
    assert report.exit_status == 2
    assert report.data["error"] == "USAGE"


def test_truncation_ceiling(monkeypatch):
    report = run(["star", "--algebra", "a2", "--trunc", "9"])
    assert report.exit_status == 2
    assert report.data["error"] == "USAGE"

    monkeypatch.setenv("PBW_TRUNC_CEILING", "2")
    get_settings.cache_clear()
    assert run(["star", "--algebra", "a2", "--trunc", "3"]).exit_status == 2
    assert run(["star", "--algebra", "a2", "--trunc", "2"]).exit_status == 0


def test_star_table_matches_oracle_table():
    star = run(["star", "--algebra", "a2", "--trunc", "2"])
    oracle = run(["star", "--algebra", "a2", "--trunc", "2", "--oracle"])
    assert star.data == oracle.data
    row = next(r for r in star.data if r["left"] == "x" and r["right"] == "y")
    assert row["product"] == {"y": "1/2", "x*y": "1"}


def test_default_trunc_comes_from_settings(monkeypatch):
    monkeypatch.setenv("PBW_DEFAULT_TRUNC", "2")
    get_settings.cache_clear()
    report = run(["duflo", "--algebra", "a2"])
    assert report.inputs["trunc"] == 2
    assert report.data["2"] == {"x*^2": "1/12"}


def test_verify_all_on_an_abelian_algebra():
    report = run(["verify", "--algebra", "abelian2", "--trunc", "3"])
    assert report.exit_status == 0
    statuses = _statuses(report)
    assert statuses["tame"] == "SKIP"
    assert statuses["oracle_equivalence"] == "PASS"
    assert statuses["torsion_property_l2"] == "PASS"


def test_verify_tame_suite_with_a_triple():
    report = run(["verify", "--algebra", "abelian2", "--suite", "tame", "--triple", "abelian_split", "--trunc", "3"])
    assert report.exit_status == 0
    assert "antimorphism" in _statuses(report)


def test_verify_flags_the_torsion_recursion_on_sl2():
    results = {r.name: r for r in verify_suite(catalog.sl2(), "duflo", 3)}
    assert results["torsion_closed_form_l2"].ok
    assert not results["torsion_property_l2"].ok
    assert results["duflo_central"].ok


def test_torsion_with_a_top_file():
    report = run(["torsion", "--algebra", "sl2", "--ell", "2", "--top", "sl2_casimir_top", "--trunc", "3"])
    assert report.exit_status == 1
    assert _statuses(report) == {
        "torsion_closed_form": "PASS",
        "torsion_property": "FAIL",
        "torsion_exact_solver": "PASS",
    }
    assert report.data["recursion"]["0"]["casimir"] == {"1": "-1/4"}
    assert report.data["exact"]["0"]["casimir"] == {"1": "-1/6"}


def test_torsion_level_mismatch_is_a_usage_error():
    report = run(["torsion", "--algebra", "sl2", "--ell", "1", "--top", "sl2_casimir_top", "--trunc", "3"])
    assert report.exit_status == 2


def test_tame_reports_the_cartan_witness():
    report = run(["tame", "--triple", "sl2_cartan", "--trunc", "3"])
    assert report.exit_status == 1
    assert report.data["tame"] is False
    assert report.data["witness"] == ("e", "f", "e")
    assert _statuses(report)["tame"] == "FAIL"


def test_bch_and_mbrace_commands():
    report = run(["bch", "--degree", "3"])
    assert report.exit_status == 0
    assert {"lyndon_word": "xy", "bracket": "[x,y]", "coefficient": "1/2"} in report.data
    assert run(["mbrace", "--p", "2", "--q", "1"]).exit_status == 0


def test_decompose():
    report = run(["decompose", "--n", "3"])
    assert report.exit_status == 0
    assert set(report.data) == {"a_1", "a_2"}
    assert run(["decompose", "--n", "1"]).exit_status == 2


def test_main_prints_and_exits(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--pretty", "decompose", "--n", "2"])
    assert excinfo.value.code == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "exit status: 0" in out


def test_pretty_flag_comes_from_parsed_arguments(capsys, monkeypatch):
    monkeypatch.setattr("sys.argv", ["pbw", "--pretty"])
    report = run(["--pretty", "decompose", "--n", "2"])
    assert report.pretty is True
    assert "pretty" not in report.model_dump()
    assert run(["decompose", "--n", "2"]).pretty is False

    with pytest.raises(SystemExit):
        main(["decompose", "--n", "2"])
    assert capsys.readouterr().out.lstrip().startswith("{")
