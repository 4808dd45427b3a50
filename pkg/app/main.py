"""Command-line entry point: parse arguments, run a module operation, print a report.

``run`` never exits and never lets a domain error escape; it always returns a
:class:`~app.models.RunReport`. ``main`` configures logging, prints the report
(JSON on stdout, or a text table with ``--pretty``) and exits with its status.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from pydantic import ValidationError

from app.core.config import get_settings
from app.core.logging_config import configure_logging
from app.models import AlgebraFile, CheckRecord, RunReport, TopFile
from app.services import catalog, duflo, freelie, liealg, tamepair, ualg
from app.services.models import CheckResult, PBWError
from app.services.scalar import format_rational
from app.services.symgroup import check_decomposition, ideal_decomposition

logger = logging.getLogger(__name__)

SUITES = ("all", "oracle", "assoc", "todd", "structure", "trace", "duflo", "tame")


class UsageError(PBWError):
    """Raised for malformed command lines."""

    code = "USAGE"


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


# -- input resolution ----------------------------------------------------------------


def _resolve_path(arg: str) -> Path | None:
    candidates = [Path(arg), Path(get_settings().data_dir) / arg, Path(get_settings().data_dir) / f"{arg}.json"]
    return next((path for path in candidates if path.is_file()), None)


def _read_algebra_file(arg: str) -> AlgebraFile:
    """A JSON file, a file under the data directory, or a built-in fixture name."""

    path = _resolve_path(arg)
    if path is not None:
        try:
            return AlgebraFile.model_validate_json(path.read_text(encoding="utf-8"))
        except (OSError, ValidationError, json.JSONDecodeError) as exc:
            raise liealg.SpecError(f"cannot read algebra file {path}: {exc}") from exc
    factory = catalog.VALID.get(arg) or catalog.INVALID.get(arg)
    if factory is None:
        raise liealg.SpecError(f"no algebra file or fixture named {arg!r}")
    return liealg.to_spec(factory())


def _load_algebra(arg: str) -> liealg.LieAlg:
    return liealg.validate(liealg.from_spec(_read_algebra_file(arg)))


def _load_triple(arg: str) -> tamepair.TripleSpec:
    path = _resolve_path(arg)
    if path is not None:
        return tamepair.load_triple(path)
    factory = catalog.TRIPLES.get(arg)
    if factory is None:
        raise liealg.SpecError(f"no triple file or fixture named {arg!r}")
    return factory()


def _resolve_trunc(args: argparse.Namespace) -> int:
    settings = get_settings()
    trunc = args.trunc if args.trunc is not None else settings.default_trunc
    if trunc < 1:
        raise UsageError(f"--trunc must be >= 1, got {trunc}")
    if trunc > settings.trunc_ceiling and not args.allow_large_trunc:
        raise UsageError(f"--trunc {trunc} exceeds the ceiling {settings.trunc_ceiling}; pass --allow-large-trunc")
    return trunc


# -- reporting helpers ---------------------------------------------------------------


def _record(result: CheckResult) -> CheckRecord:
    return CheckRecord(
        check_name=result.name,
        status="PASS" if result.ok else "FAIL",
        detail=result.detail,
        witness=result.witness,
    )


def _add_all(report: RunReport, results: Iterable[CheckResult]) -> None:
    for result in results:
        report.add(_record(result))


def _skip(report: RunReport, name: str, detail: str) -> None:
    report.add(CheckRecord(check_name=name, status="SKIP", detail=detail))


def _flag(name: str, ok: bool, detail: str = "", witness: Any = None) -> CheckResult:
    return CheckResult.passed(name, detail) if ok else CheckResult.failed(name, witness, detail)


def _sym_records(g: liealg.LieAlg, vector) -> dict[str, str]:
    return {g.space.format_monomial(m): format_rational(c) for m, c in sorted(vector.items(), key=lambda i: (len(i[0]), i[0]))}


# -- subcommands ---------------------------------------------------------------------


def _cmd_validate(args: argparse.Namespace, report: RunReport) -> None:
    spec = _read_algebra_file(args.algebra)
    try:
        g = liealg.validate(liealg.from_spec(spec))
    except (liealg.AntisymmetryViolation, liealg.BracketDegreeViolation, liealg.JacobiViolation) as exc:
        report.add(CheckRecord(check_name="lie_algebra", status="FAIL", detail=str(exc), witness=exc.witness))
        return
    report.add(CheckRecord(check_name="lie_algebra", status="PASS", detail=f"dim {g.dim}"))
    _add_all(report, [_flag("round_trip", liealg.from_spec(liealg.to_spec(g)) == g)])
    report.data = liealg.to_spec(g).model_dump(mode="json")


def _cmd_bch(args: argparse.Namespace, report: RunReport) -> None:
    series = freelie.bch(args.degree)
    report.data = series.to_records()
    _add_all(
        report,
        [
            _flag("bch_two_routes", series == freelie.bch_oracle(args.degree)),
            _flag("bch_symmetry", freelie.bch_symmetry_check(args.degree)),
            _flag("mbrace_round_trip", freelie.operad_round_trip()),
        ],
    )


def _cmd_mbrace(args: argparse.Namespace, report: RunReport) -> None:
    element = freelie.mbrace(args.p, args.q)
    report.data = element.to_records()
    if args.q == 1:
        _add_all(report, [_flag("mbrace_p1_closed", element == freelie.mbrace_p1_closed(args.p))])


def _cmd_star(args: argparse.Namespace, report: RunReport) -> None:
    g = _load_algebra(args.algebra)
    trunc = _resolve_trunc(args)
    product: Callable = ualg.pbw_product_vectors if args.oracle else ualg.star_vectors
    rows = []
    for a, b in ualg.monomial_pairs(g, trunc):
        rows.append(
            {
                "left": g.space.format_monomial(a),
                "right": g.space.format_monomial(b),
                "product": _sym_records(g, product(g, {a: 1}, {b: 1})),
            }
        )
    report.data = rows
    report.inputs["trunc"] = trunc


def _cmd_pbw_coeffs(args: argparse.Namespace, report: RunReport) -> None:
    g = _load_algebra(args.algebra)
    matrices = {}
    for k in range(1, args.p + 1):
        c = ualg.structure_coefficients(g, args.p, k).map
        matrices[str(k)] = {g.space.format_word(w): _sym_records(g, c.column(w)) for w in c.source if c.column(w)}
    report.data = matrices
    _add_all(report, ualg.structure_check(g, args.p))


def _cmd_duflo(args: argparse.Namespace, report: RunReport) -> None:
    g = _load_algebra(args.algebra)
    trunc = _resolve_trunc(args)
    element = duflo.duflo_element(g, trunc)
    report.data = element.to_records()
    report.inputs["trunc"] = trunc
    _add_all(report, duflo.duflo_invariance_check(g, trunc))


def _top_component(g: liealg.LieAlg, args: argparse.Namespace):
    if args.top == "projection":
        return duflo.projection_top(g, args.ell)
    path = _resolve_path(args.top)
    if path is None:
        raise liealg.SpecError(f"no top component file {args.top!r}")
    try:
        top = TopFile.model_validate_json(path.read_text(encoding="utf-8"))
    except (OSError, ValidationError, json.JSONDecodeError) as exc:
        raise liealg.SpecError(f"cannot read top component file {path}: {exc}") from exc
    if top.ell != args.ell:
        raise UsageError(f"--ell {args.ell} does not match the file's ell {top.ell}")
    return duflo.top_from_file(g, top)


def _torsion_results(g: liealg.LieAlg, ell: int, top, trunc: int) -> tuple[list[CheckResult], dict]:
    solved = duflo.torsion_solve(g, ell, top, trunc)
    exact = duflo.exact_torsion_solve(g, ell, top, trunc)
    first_defect = next(iter(solved.defects.items()), None)
    results = [
        _flag("torsion_closed_form", solved.closed_form_matches, f"level {ell}"),
        _flag("torsion_property", solved.is_torsion, f"level {ell}", witness=first_defect),
        _flag(
            "torsion_exact_solver",
            exact is not None and exact.is_torsion,
            "an l-torsion extension of the top component exists" if exact else "no l-torsion extension",
        ),
    ]
    data = {"recursion": solved.to_records(), "exact": exact.to_records() if exact else None}
    return results, data


def _cmd_torsion(args: argparse.Namespace, report: RunReport) -> None:
    g = _load_algebra(args.algebra)
    trunc = _resolve_trunc(args)
    results, data = _torsion_results(g, args.ell, _top_component(g, args), trunc)
    report.inputs["trunc"] = trunc
    report.data = data
    _add_all(report, results)


def _cmd_tame(args: argparse.Namespace, report: RunReport) -> None:
    t = _load_triple(args.triple)
    trunc = _resolve_trunc(args)
    report.inputs["trunc"] = trunc
    report.data = tamepair.tame_report(t, trunc)
    _add_all(report, tamepair.checks_for(t, trunc))


def _cmd_decompose(args: argparse.Namespace, report: RunReport) -> None:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    parts = ideal_decomposition(args.n)
    report.data = {f"a_{i}": part.format() for i, part in enumerate(parts, start=1)}
    _add_all(report, [_flag("decomposition", check_decomposition(args.n, parts), f"n={args.n}")])


def _even(g: liealg.LieAlg) -> bool:
    return not any(g.parity)


def verify_suite(g: liealg.LieAlg, suite: str, trunc: int, triple: tamepair.TripleSpec | None = None) -> list[CheckResult]:
    """The invariant battery behind ``verify``; returns results in a fixed order."""

    wanted = SUITES[1:] if suite == "all" else (suite,)
    results: list[CheckResult] = []
    low = min(trunc, 3)
    if "oracle" in wanted:
        results.append(ualg.oracle_equivalence_check(g, trunc))
    if "assoc" in wanted:
        results.append(ualg.associativity_check(g, low))
        results.append(ualg.deformation_check(g, trunc))
        results.append(ualg.coalgebra_morphism_check(g, trunc))
        results.append(ualg.reverse_pbw_check(g, trunc))
    if "todd" in wanted:
        for n in range(1, min(trunc - 1, 3) + 1):
            results.append(ualg.todd_formula_check(g, n))
        for k in (1, 2):
            results.append(ualg.step_one_check(g, low, k))
    if "structure" in wanted:
        for p in range(2, trunc + 1):
            results.extend(ualg.structure_check(g, p))
        for n in range(1, low + 1):
            results.append(ualg.reduced_coproduct_self_test(g, n))
    if "trace" in wanted:
        results.append(liealg.snake_check(g))
        for p in (1, 2):
            results.append(_flag(f"bullet_epsilon_p{p}", liealg.bullet_epsilon_check(g, p)))
            results.append(liealg.invariance_check(g, liealg.nu(g, p), f"nu_{p}"))
            for n in range(p, low + 1):
                results.append(_flag(f"trace_identity_n{n}_p{p}", liealg.trace_identity_check(g, n, p)))
        for p in range(1, low + 1):
            results.append(liealg.corollary_check(g, low, p))
        results.append(liealg.contraction_composition_check(g, low, 1, 1))
    if "duflo" in wanted:
        for k in range(1, 7):
            results.append(_flag(f"bernoulli_recursion_k{k}", duflo.bernoulli_recursion_check(k)))
        results.extend(duflo.duflo_invariance_check(g, low))
        if _even(g):
            results.append(duflo.central_image_check(g, 2))
        for ell in range(1, min(trunc - 1, 3) + 1):
            torsion, _ = _torsion_results(g, ell, duflo.projection_top(g, ell), trunc)
            for result in torsion:
                result.name = f"{result.name}_l{ell}"
            results.extend(torsion)
    if "tame" in wanted and triple is not None:
        results.extend(tamepair.checks_for(triple, trunc))
    return results


def _cmd_verify(args: argparse.Namespace, report: RunReport) -> None:
    g = _load_algebra(args.algebra)
    trunc = _resolve_trunc(args)
    triple = _load_triple(args.triple) if args.triple else None
    report.inputs["trunc"] = trunc
    _add_all(report, verify_suite(g, args.suite, trunc, triple))
    if args.suite in ("all", "tame") and triple is None:
        _skip(report, "tame", "no --triple given")
    if args.suite in ("all", "duflo") and not _even(g):
        _skip(report, "duflo_central", "centrality spot check needs an even algebra")


# -- parser --------------------------------------------------------------------------


def _with_trunc(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--trunc", type=int, default=None)
    parser.add_argument("--allow-large-trunc", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pbw", description="Exact categorical PBW engine")
    parser.add_argument("--pretty", action="store_true", help="텍스트 표로 출력 (반올림 없음)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate")
    p.add_argument("--algebra", required=True)
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("bch")
    p.add_argument("--degree", type=int, default=4)
    p.set_defaults(handler=_cmd_bch)

    p = sub.add_parser("mbrace")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.set_defaults(handler=_cmd_mbrace)

    p = sub.add_parser("star")
    p.add_argument("--algebra", required=True)
    p.add_argument("--oracle", action="store_true")
    _with_trunc(p)
    p.set_defaults(handler=_cmd_star)

    p = sub.add_parser("pbw-coeffs")
    p.add_argument("--algebra", required=True)
    p.add_argument("--p", type=int, required=True)
    p.set_defaults(handler=_cmd_pbw_coeffs)

    p = sub.add_parser("duflo")
    p.add_argument("--algebra", required=True)
    _with_trunc(p)
    p.set_defaults(handler=_cmd_duflo)

    p = sub.add_parser("torsion")
    p.add_argument("--algebra", required=True)
    p.add_argument("--ell", type=int, required=True)
    p.add_argument("--top", default="projection")
    _with_trunc(p)
    p.set_defaults(handler=_cmd_torsion)

    p = sub.add_parser("tame")
    p.add_argument("--triple", required=True)
    _with_trunc(p)
    p.set_defaults(handler=_cmd_tame)

    p = sub.add_parser("verify")
    p.add_argument("--algebra", required=True)
    p.add_argument("--suite", choices=SUITES, default="all")
    p.add_argument("--triple", default=None)
    _with_trunc(p)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("decompose")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(handler=_cmd_decompose)
    return parser


def run(argv: Sequence[str] | None = None) -> RunReport:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        return RunReport(command=" ".join(argv), data={"error": exc.code, "message": str(exc)}, exit_status=2)
    inputs = {key: value for key, value in vars(args).items() if key not in ("handler", "command", "pretty")}
    report = RunReport(command=args.command, inputs=inputs, pretty=args.pretty)
    try:
        args.handler(args, report)
    except PBWError as exc:
        logger.error("%s failed: %s", args.command, exc)
        report.data = {"error": exc.code, "message": str(exc), "witness": exc.witness}
        report.exit_status = 2
    return report.finalize()


def render_text(report: RunReport) -> str:
    lines = [f"command: {report.command}"]
    for key, value in report.inputs.items():
        lines.append(f"  {key} = {value}")
    width = max((len(r.check_name) for r in report.results), default=0)
    for record in report.results:
        line = f"{record.status:<4}  {record.check_name:<{width}}"
        if record.detail:
            line += f"  {record.detail}"
        if record.witness is not None:
            line += f"  witness={record.witness}"
        lines.append(line)
    if report.data is not None:
        lines.append(json.dumps(report.data, ensure_ascii=False, indent=2, default=str))
    lines.append(f"exit status: {report.exit_status}")
    return "\n".join(lines)


def main(argv: Sequence[str] | None = None) -> None:
    configure_logging()
    report = run(argv)
    if report.pretty:
        print(render_text(report))
    else:
        print(json.dumps(report.model_dump(mode="json"), ensure_ascii=False, indent=2, default=str))
    sys.exit(report.exit_status)


if __name__ == "__main__":
    main()
