"""
Command-line front door: one subcommand per pipeline stage, JSON in and out.

Exit codes: 0 pass, 1 verification failure, 2 input error, 3 precision exhausted.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Callable, Iterable, Optional

import numpy as np
import polars as pl

from sym_workbench.errors import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_PRECISION,
    EXIT_VERIFICATION,
    InputError,
    WorkbenchError,
    exit_code_for,
)
from sym_workbench.harness import io
from sym_workbench.harness.config import RunConfig, SweepRanges, read_payload, validated
from sym_workbench.harness.sweep import enumerate_instances, run_sweep, summarize
from sym_workbench.local_model.charts import ChartSpec, chart_presentation, equivalence_report
from sym_workbench.semilinear.slopes import graded_polygon, ungraded_slopes
from sym_workbench.structures.connection import solve_connection, verify_connection
from sym_workbench.structures.deformation import check_suff, deform_M, deform_N, find_deformation_sequence
from sym_workbench.structures.dwork import check_velf, dwork_theta, verify_dwork
from sym_workbench.structures.sym_structure import SymSpec, build_sym, verify_sym
from sym_workbench.windows.base_verifier import CheckStatus, VerificationReport, worst_status
from sym_workbench.windows.ext_powers import exterior_power, independence_check
from sym_workbench.windows.window import Window, window_from_dieudonne
from sym_workbench.windows.window_verifier import verify_window

logger = logging.getLogger(__name__)


def configure_logging(verbose: bool = False) -> None:
    root = logging.getLogger()
    if root.handlers:
        root.setLevel(logging.DEBUG if verbose else logging.WARNING)
        return
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _exit_code(reports: Iterable[VerificationReport]) -> int:
    status = worst_status([report.calculate_status() for report in reports])
    if status == CheckStatus.FAIL:
        return EXIT_VERIFICATION
    if status == CheckStatus.PRECISION:
        return EXIT_PRECISION
    return EXIT_OK


def _stamp(config: RunConfig, *reports: VerificationReport) -> None:
    for report in reports:
        report.provenance = config.provenance()
        report.calculate_status()


def _dump(report: VerificationReport) -> dict:
    return report.model_dump(mode="json")


def _sym_spec(config: RunConfig) -> SymSpec:
    payload = read_payload(config.input_path) if config.input_path is not None else None
    if payload is not None:
        spec = dict(payload.get("spec", payload))
        spec.pop("ring", None)
    else:
        if config.options.get("b") is None or config.options.get("z") is None or config.options.get("a") is None:
            raise InputError("sym-build needs --input or all of --b, --z and --a")
        spec = {"b": config.options["b"], "z": config.options["z"], "a": config.options["a"]}
    spec.setdefault("r", config.params.r)
    return validated(SymSpec, spec, "Sym spec")


def cmd_ring_info(config: RunConfig) -> int:
    ctx = config.context()
    payload = {"provenance": config.provenance(), "ring": ctx.describe()}
    io.write_json(config.out / "ring.json", payload)
    print(json.dumps(payload["ring"], indent=2))
    return EXIT_OK


def cmd_sym_build(config: RunConfig) -> int:
    spec = _sym_spec(config)
    if spec.r != config.params.r:
        config = config.model_copy(update={"params": config.params.model_copy(update={"r": spec.r})})
    structure = build_sym(spec, config.context())
    report = verify_sym(structure)
    _stamp(config, report)
    io.write_json(config.out / "structure.json", io.structure_payload(structure, config.params))
    io.write_json(config.out / "verify_report.json", report)
    report.print_results()
    return _exit_code([report])


def cmd_deform(config: RunConfig) -> int:
    payload = io.artifact(config.input_path, "deform")
    ctx = config.context()
    structure = io.load_structure(ctx, payload)
    start = int(config.options.get("start") or 0)
    sequence = find_deformation_sequence(structure.N, start=start)
    N_def = deform_N(structure.N, sequence)
    M_def = deform_M(structure, sequence)
    report = check_suff(N_def, M_def, structure, max_truncation=config.options.get("truncation_limit"))
    _stamp(config, report)
    io.write_json(config.out / "deform.json",
                  io.deformation_payload(structure, config.params, sequence, start, N_def, M_def))
    io.write_json(config.out / "suff_report.json", report)
    report.print_results()
    return _exit_code([report])


def cmd_connection(config: RunConfig) -> int:
    payload = io.artifact(config.input_path, "connection")
    ctx = config.context()
    _, N_def, M_def = io.load_deformation(ctx, payload)
    rng = np.random.default_rng(config.seed)
    result = dict(payload)
    reports = {}
    for key, deformed in (("N", N_def), ("M", M_def)):
        connection = solve_connection(deformed)
        report = verify_connection(deformed, connection, rng=rng)
        report.title = f"Connection on {key}"
        _stamp(config, report)
        result[f"connection_{key}"] = connection.to_json()
        reports[key] = report
        report.print_results()
    result["reports"] = {key: _dump(report) for key, report in reports.items()}
    result["provenance"] = config.provenance()
    io.write_json(config.out / "connection.json", result)
    return _exit_code(reports.values())


def cmd_dwork(config: RunConfig) -> int:
    payload = io.artifact(config.input_path, "dwork")
    ctx = config.context()
    structure, N_def, M_def = io.load_deformation(ctx, payload)
    data, reports = {}, {}
    for key, deformed in (("N", N_def), ("M", M_def)):
        connection = io.load_connection(ctx, payload, f"connection_{key}")
        data[key] = dwork_theta(deformed, connection)
        reports[key] = verify_dwork(deformed, connection, data[key])
        reports[key].title = f"Dwork trivialization of {key}"
    velf = check_velf(data["N"], data["M"], structure)
    _stamp(config, velf, *reports.values())
    for report in (*reports.values(), velf):
        report.print_results()
    io.write_json(config.out / "dwork_report.json", {
        "provenance": config.provenance(),
        "dwork": {key: _dump(report) for key, report in reports.items()},
        "theta": {key: value.to_json() for key, value in data.items()},
        "velf": _dump(velf),
    })
    return _exit_code([*reports.values(), velf])


def cmd_slopes(config: RunConfig) -> int:
    payload = io.artifact(config.input_path, "slopes")
    phi = io.load_sigma_map(config.context(), payload)
    degrees = []
    for degree, rank in enumerate(phi.module.ranks):
        if rank == 0:
            continue
        polygon = graded_polygon(phi, degree)
        degrees.append({
            "degree": degree,
            "slopes": [str(s) for s in polygon.slopes().values],
            "vertices": [list(v) for v in polygon.vertices],
        })
    result = {
        "provenance": config.provenance(),
        "ranks": phi.module.ranks,
        "graded": degrees,
        "ungraded": [str(s) for s in ungraded_slopes(phi).values],
    }
    io.write_json(config.out / "slopes.json", result)
    for entry in degrees:
        print(f"degree {entry['degree']}: slopes {{{', '.join(entry['slopes'])}}} vertices {entry['vertices']}")
    return EXIT_OK


def _load_window(config: RunConfig, payload: dict) -> Window:
    ctx = config.context()
    if "decomposition" in payload:
        return Window.from_json(ctx, payload)
    return window_from_dieudonne(io.load_sigma_map(ctx, payload))


def cmd_extpow(config: RunConfig) -> int:
    payload = io.artifact(config.input_path, "extpow")
    window = _load_window(config, payload)
    k = int(config.options.get("k") or 1)
    power = exterior_power(window, k)
    rng = np.random.default_rng(config.seed)
    independence = independence_check(window, k, rng=rng, trials=int(config.options.get("trials") or 20))
    axioms = verify_window(power)
    _stamp(config, independence, axioms)
    io.write_json(config.out / "extpow.json", power.to_json())
    io.write_json(config.out / "extpow_report.json", {
        "provenance": config.provenance(),
        "k": k,
        "ranks": power.phi.module.ranks,
        "window": _dump(axioms),
        "independence": _dump(independence),
    })
    axioms.print_results()
    independence.print_results()
    return _exit_code([axioms, independence])


def cmd_localmodel(config: RunConfig) -> int:
    options = {key: config.options.get(key) for key in ("n", "k", "nu", "mu")}
    spec = validated(ChartSpec, {k: v for k, v in options.items() if v is not None}, "chart")
    presentation = chart_presentation(spec, config.params.p)
    report = equivalence_report(spec, config.params.p, config.params.N,
                                samples=int(config.options.get("samples") or 200),
                                rng=np.random.default_rng(config.seed))
    _stamp(config, report)
    io.write_json(config.out / "localmodel_report.json", {
        "provenance": config.provenance(),
        "presentation": presentation.model_dump(mode="json"),
        "report": _dump(report),
    })
    presentation.print_results()
    report.print_results()
    return _exit_code([report])


def cmd_sweep(config: RunConfig) -> int:
    payload = read_payload(config.input_path) if config.input_path is not None else {}
    ranges = validated(SweepRanges, payload.get("sweep", payload), "sweep ranges")
    instances = enumerate_instances(ranges)
    corrupt = config.options.get("corrupt")
    if corrupt is not None:
        keys = [instance.key for instance in instances]
        if corrupt not in keys:
            raise InputError(f"no sweep instance with key {corrupt}")
        instances = [instance.model_copy(update={"corrupt": instance.key == corrupt}) for instance in instances]
    logger.info("sweeping %d instances", len(instances))
    table = run_sweep(instances, workers=int(config.options.get("workers") or 4))
    counts = summarize(table)
    config.out.mkdir(parents=True, exist_ok=True)
    table.write_csv(config.out / "sweep.csv")
    io.write_json(config.out / "sweep.json", {
        "provenance": config.provenance(),
        "ranges": ranges.model_dump(),
        "rows": table.to_dicts(),
        "counts": counts.to_dicts(),
    })
    print(table)
    print(counts)
    failed = table.filter(pl.col("status") == CheckStatus.FAIL.value).height
    return EXIT_VERIFICATION if failed else EXIT_OK


COMMANDS: dict[str, tuple[Callable[[RunConfig], int], str]] = {
    "ring-info": (cmd_ring_info, "Describe the coefficient ring"),
    "sym-build": (cmd_sym_build, "Build and verify a formal Sym-structure"),
    "deform": (cmd_deform, "Sufficiently deform a structure.json artifact"),
    "slopes": (cmd_slopes, "Graded and ungraded slopes of a sigma-linear map"),
    "connection": (cmd_connection, "Solve the Dieudonne connection of a deformation"),
    "dwork": (cmd_dwork, "Dwork trivialization and descent data"),
    "extpow": (cmd_extpow, "Normalized exterior power of a window"),
    "localmodel": (cmd_localmodel, "Compare the two chart formulations of the local model"),
    "sweep": (cmd_sweep, "Run the property suite over a parameter range"),
}


def _common_arguments() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, default=None, help="odd prime")
    common.add_argument("--r", type=int, default=None, help="grading period")
    common.add_argument("--precision", dest="N", type=int, default=None, help="p-adic precision N")
    common.add_argument("--truncation", dest="T", type=int, default=None, help="t-adic truncation T")
    common.add_argument("--denominator-budget", dest="D", type=int, default=None,
                        help="largest power of p allowed in denominators")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", type=Path, default=None, help="output directory")
    common.add_argument("--input", dest="input_path", type=Path, default=None, help="JSON input file")
    common.add_argument("--verbose", action="store_true")
    return common


def _add_options(name: str, parser: argparse.ArgumentParser) -> None:
    if name == "sym-build":
        parser.add_argument("--b", type=int, nargs="+", default=None)
        parser.add_argument("--z", type=int, default=None)
        parser.add_argument("--a", default=None, help="half-integer slope, e.g. 2 or 3/2")
    elif name == "deform":
        parser.add_argument("--start", type=int, default=None, help="starting degree of the sequence")
        parser.add_argument("--truncation-limit", dest="truncation_limit", type=int, default=None,
                            help="largest truncation used for the generic slopes")
    elif name == "extpow":
        parser.add_argument("--k", type=int, default=None)
        parser.add_argument("--trials", type=int, default=None)
    elif name == "localmodel":
        for option in ("n", "k", "nu", "mu"):
            parser.add_argument(f"--{option}", type=int, default=None)
        parser.add_argument("--samples", type=int, default=None)
    elif name == "sweep":
        parser.add_argument("--workers", type=int, default=None)
        parser.add_argument("--corrupt", default=None, help="instance key whose M is corrupted")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sym-workbench", description=__doc__.strip().splitlines()[0])
    subparsers = parser.add_subparsers(dest="command", required=True)
    common = _common_arguments()
    for name, (handler, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, parents=[common], help=help_text)
        _add_options(name, sub)
        sub.set_defaults(func=handler)
    return parser


_COMMON = {"command", "func", "p", "r", "N", "T", "D", "seed", "out", "input_path", "verbose"}


def _error_payload(error: BaseException) -> dict[str, Any]:
    return {"error": type(error).__name__, "message": str(error), "exit_code": exit_code_for(error)}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    configure_logging(args.verbose)
    flags = vars(args)
    flags["options"] = {key: value for key, value in flags.items() if key not in _COMMON}
    try:
        file_payload = read_payload(args.input_path)
        config = RunConfig.from_flags(flags, file_payload if isinstance(file_payload, dict) else None)
        return args.func(config)
    except (WorkbenchError, ValueError, FileNotFoundError) as exc:
        logger.debug("%s failed", args.command, exc_info=True)
        print(f"[error] {json.dumps(_error_payload(exc))}", file=sys.stderr)
        return exit_code_for(exc)


__all__ = ["COMMANDS", "build_parser", "configure_logging", "main"]
