"""Command-line front end: batch analyses over manifold-spec JSON files.

    finslerlab analyze      SPEC [--tol-killing --tol-length --probes --seed]
    finslerlab s-curvature  SPEC --point P --vector V [--measure K --oracle ...]
    finslerlab geodesic     SPEC --from P --dir V --time T [--steps N --csv]
    finslerlab validate     SPEC [--probes --seed --mc-samples ...]
    finslerlab bh           SPEC --point P [--samples N --seed S]
    finslerlab catalog      [NAME]

Reports are JSON on stdout; re-running with identical inputs and seed
reproduces the report byte for byte except the wall_time_s field.  Exit
codes: 0 success (analyze: measure admitted), 1 invalid spec or failed
validation, 2 usage error, 3 no admissible measure, 4 runtime domain
warning.  FINSLERLAB_SEED sets the default seed; an explicit --seed wins.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time

from . import __version__, catalog, checks, manifest, randers, scurvature
from .core import DomainExitError, NonFiniteStateError, geodesic, probe_points
from .expr import ExprError
from .manifest import SpecValidationError
from .randers import InvalidSpaceError

EXIT_OK = 0
EXIT_INVALID_SPEC = 1
EXIT_USAGE = 2
EXIT_NO_MEASURE = 3
EXIT_RUNTIME_WARNING = 4


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (SpecValidationError, InvalidSpaceError, ExprError, FileNotFoundError) as exc:
        _emit_error(type(exc).__name__, str(exc))
        return EXIT_INVALID_SPEC


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="finslerlab",
        description="Finsler-geometric analyses of Randers spaces given as JSON specs",
    )
    parser.add_argument("--version", action="version", version=f"finslerlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="decide the vanishing-S-measure verdict")
    p.add_argument("spec", help="manifold spec JSON path")
    p.add_argument("--tol-killing", type=float, default=1e-9)
    p.add_argument("--tol-length", type=float, default=1e-8)
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("s-curvature", help="S-curvature at one (point, vector)")
    p.add_argument("spec")
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    p.add_argument("--vector", required=True, help="comma-separated components")
    p.add_argument(
        "--measure",
        choices=scurvature.MEASURE_KINDS,
        default=None,
        help="defaults to the spec's measure, else busemann-hausdorff",
    )
    p.add_argument("--oracle", action="store_true", help="also run the transport oracle")
    p.add_argument("--h", type=float, default=1e-3, help="oracle half-step")
    p.add_argument("--steps", type=int, default=100, help="oracle integrator steps")
    p.add_argument("--no-richardson", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_s_curvature)

    p = sub.add_parser("geodesic", help="integrate a geodesic, JSON or CSV output")
    p.add_argument("spec")
    p.add_argument("--from", dest="start", required=True)
    p.add_argument("--dir", dest="direction", required=True)
    p.add_argument("--time", type=float, required=True)
    p.add_argument("--steps", type=int, default=1000)
    p.add_argument("--csv", action="store_true")
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_geodesic)

    p = sub.add_parser("validate", help="run the full invariant battery")
    p.add_argument("spec")
    p.add_argument("--probes", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--transport-probes", type=int, default=50)
    p.add_argument("--mc-samples", type=int, default=1_000_000)
    p.add_argument("--tol-killing", type=float, default=1e-9)
    p.add_argument("--tol-length", type=float, default=1e-8)
    p.add_argument("--tol-s", type=float, default=1e-8)
    p.set_defaults(handler=cmd_validate)

    p = sub.add_parser("bh", help="Busemann-Hausdorff density: closed form vs Monte Carlo")
    p.add_argument("spec")
    p.add_argument("--point", required=True)
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(handler=cmd_bh)

    p = sub.add_parser("catalog", help="list built-in spaces or dump one as JSON")
    p.add_argument("name", nargs="?")
    p.set_defaults(handler=cmd_catalog)
    return parser


# -- helpers ------------------------------------------------------------------


def _resolve_seed(flag_value) -> int:
    if flag_value is not None:
        return flag_value
    env = os.environ.get("FINSLERLAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise SpecValidationError(f"FINSLERLAB_SEED must be an integer, got {env!r}")
    return 0


def _emit(report: dict) -> None:
    print(json.dumps(report, sort_keys=True, indent=2))


def _emit_error(kind: str, message: str, **extra) -> None:
    _emit({"error": {"type": kind, "message": message, **extra}})


def _parse_vector(text: str, dimension: int, label: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(","))
    except ValueError:
        _emit_error("UsageError", f"{label} must be comma-separated numbers, got {text!r}")
        raise SystemExit(EXIT_USAGE)
    if len(values) != dimension:
        _emit_error("UsageError", f"{label} needs {dimension} components, got {len(values)}")
        raise SystemExit(EXIT_USAGE)
    return values


def _base_report(command: str, digest: str, data: dict, seed) -> dict:
    return {
        "tool_version": __version__,
        "report_schema": 1,
        "command": command,
        "spec_digest": digest,
        "spec_name": data.get("name"),
        "seed": seed,
    }


# -- commands -----------------------------------------------------------------


def cmd_analyze(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    data, digest = manifest.load_spec(args.spec)
    space = manifest.space_from_spec(data, args.probes, seed)
    points = probe_points(space.chart, args.probes, seed)
    verdict = randers.theorem_verdict(
        space, points, tol_killing=args.tol_killing, tol_length=args.tol_length
    )
    analysis = verdict.analysis
    per_probe = []
    for x, cov in zip(analysis.probes, analysis.covariant):
        n = space.dimension
        per_probe.append(
            {
                "x": list(x),
                "beta_length": randers.beta_length(space, x),
                "killing_defect": max(
                    abs(cov[i][j] + cov[j][i]) for i in range(n) for j in range(n)
                ),
                "parallel_defect": max(
                    abs(cov[i][j]) for i in range(n) for j in range(n)
                ),
            }
        )
    report = _base_report("analyze", digest, data, seed)
    report["tolerances"] = {
        "killing": args.tol_killing,
        "length": args.tol_length,
    }
    report["results"] = {
        "admits_vanishing_s_measure": verdict.admits,
        "reason": verdict.reason,
        "berwald": analysis.parallel_defect_sup <= args.tol_killing,
        "killing_defect_sup": analysis.killing_defect_sup,
        "parallel_defect_sup": analysis.parallel_defect_sup,
        "length_min": analysis.length_min,
        "length_max": analysis.length_max,
        "length_gradient_sup": analysis.length_gradient_sup,
        "bh_density_probe_values": verdict.bh_density_probe_values,
        "probe_count": len(points),
        "per_probe": per_probe,
    }
    report["wall_time_s"] = time.perf_counter() - started
    _emit(report)
    return EXIT_OK if verdict.admits else EXIT_NO_MEASURE


def cmd_s_curvature(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    data, digest = manifest.load_spec(args.spec)
    space = manifest.space_from_spec(data, seed=seed)
    point = _parse_vector(args.point, space.dimension, "--point")
    vector = _parse_vector(args.vector, space.dimension, "--vector")
    if not space.chart.contains(point):
        _emit_error("UsageError", f"point {point} is outside the chart domain")
        return EXIT_USAGE
    measure = manifest.measure_from_spec(space, data, args.measure)
    F = randers.finsler(space)
    s_formula = scurvature.s_curvature(F, measure, point, vector)
    s_transport = None
    warning = None
    if args.oracle and any(c != 0.0 for c in vector):
        try:
            s_transport = scurvature.s_curvature_transport(
                F,
                measure,
                point,
                vector,
                h=args.h,
                steps=args.steps,
                richardson=not args.no_richardson,
            )
        except DomainExitError as exc:
            warning = {"type": "DomainExitError", "message": str(exc), "exit_time": exc.time}
    sample = scurvature.SCurvatureSample(
        x=point,
        v=vector,
        s_formula=s_formula,
        s_transport=s_transport,
        measure_kind=measure.kind,
    )
    report = _base_report("s-curvature", digest, data, seed)
    report["results"] = {
        "x": list(sample.x),
        "v": list(sample.v),
        "measure": sample.measure_kind,
        "s_formula": sample.s_formula,
        "s_transport": sample.s_transport,
        "oracle": {
            "h": args.h,
            "steps": args.steps,
            "richardson": not args.no_richardson,
        }
        if args.oracle
        else None,
    }
    if warning:
        report["warning"] = warning
    report["wall_time_s"] = time.perf_counter() - started
    _emit(report)
    return EXIT_RUNTIME_WARNING if warning else EXIT_OK


def cmd_geodesic(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    data, digest = manifest.load_spec(args.spec)
    space = manifest.space_from_spec(data, seed=seed)
    start = _parse_vector(args.start, space.dimension, "--from")
    direction = _parse_vector(args.direction, space.dimension, "--dir")
    if args.steps < 1:
        _emit_error("UsageError", "--steps must be >= 1")
        return EXIT_USAGE
    F = randers.finsler(space)
    warning = None
    try:
        path = geodesic(F, start, direction, args.time, args.steps)
    except DomainExitError as exc:
        path = exc.path
        warning = {"type": "DomainExitError", "message": str(exc), "exit_time": exc.time}
    except NonFiniteStateError as exc:
        _emit_error("NonFiniteStateError", str(exc), time=exc.time)
        return EXIT_RUNTIME_WARNING
    speeds = [float(F(x, v)) for x, v in zip(path.points, path.velocities)]
    if args.csv:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(
            ["t", *space.chart.names, *[f"v{i + 1}" for i in range(space.dimension)], "F"]
        )
        for t, x, v, f in zip(path.times, path.points, path.velocities, speeds):
            writer.writerow([repr(t), *map(repr, x), *map(repr, v), repr(f)])
        if warning:
            print(f"warning: {warning['message']}", file=sys.stderr)
        return EXIT_RUNTIME_WARNING if warning else EXIT_OK
    report = _base_report("geodesic", digest, data, seed)
    report["results"] = {
        "times": path.times,
        "points": [list(x) for x in path.points],
        "velocities": [list(v) for v in path.velocities],
        "speeds": speeds,
        "status": "domain-exit" if warning else "complete",
    }
    if warning:
        report["warning"] = warning
    report["wall_time_s"] = time.perf_counter() - started
    _emit(report)
    return EXIT_RUNTIME_WARNING if warning else EXIT_OK


def cmd_validate(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    data, digest = manifest.load_spec(args.spec)
    space = manifest.space_from_spec(data, args.probes, seed)
    results = checks.run_checks(
        space,
        probe_count=args.probes,
        seed=seed,
        transport_probes=args.transport_probes,
        mc_samples=args.mc_samples,
        tol_killing=args.tol_killing,
        tol_length=args.tol_length,
        tol_s=args.tol_s,
    )
    all_pass = all(r.passed or r.skipped for r in results)
    report = _base_report("validate", digest, data, seed)
    report["tolerances"] = {
        "killing": args.tol_killing,
        "length": args.tol_length,
        "s": args.tol_s,
    }
    report["results"] = {
        "all_pass": all_pass,
        "probe_count": args.probes,
        "checks": [
            {
                "name": r.name,
                "observed": r.observed,
                "tolerance": r.tolerance,
                "passed": r.passed,
                "skipped": r.skipped,
                "note": r.note,
            }
            for r in results
        ],
    }
    report["wall_time_s"] = time.perf_counter() - started
    _emit(report)
    for r in results:
        print(r.line(), file=sys.stderr)
    return EXIT_OK if all_pass else EXIT_INVALID_SPEC


def cmd_bh(args) -> int:
    started = time.perf_counter()
    seed = _resolve_seed(args.seed)
    data, digest = manifest.load_spec(args.spec)
    space = manifest.space_from_spec(data, seed=seed)
    point = _parse_vector(args.point, space.dimension, "--point")
    if args.samples < 10_000:
        _emit_error("UsageError", f"--samples must be at least 10000, got {args.samples}")
        return EXIT_USAGE
    closed = float(randers.bh_density_closed_form(space, point))
    estimate, std_error = scurvature.bh_density_monte_carlo(
        space, point, args.samples, seed
    )
    gate = max(0.01 * closed, 3.0 * std_error)
    report = _base_report("bh", digest, data, seed)
    report["results"] = {
        "x": list(point),
        "closed_form": closed,
        "monte_carlo": estimate,
        "std_error": std_error,
        "samples": args.samples,
        "agreement_gate": gate,
        "agree": abs(estimate - closed) <= gate,
    }
    report["wall_time_s"] = time.perf_counter() - started
    _emit(report)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.name is None:
        _emit(
            {
                "tool_version": __version__,
                "spaces": [
                    {"name": name, "description": desc}
                    for name, desc in catalog.descriptions()
                ],
            }
        )
        return EXIT_OK
    if args.name not in catalog.CATALOG:
        _emit_error(
            "UsageError",
            f"unknown catalog space '{args.name}'",
            known=sorted(catalog.CATALOG),
        )
        return EXIT_USAGE
    _emit(catalog.spec(args.name))
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
