"""Command-line surface.

Subcommands: ``ray trace``, ``classify``, ``diag appendix-a``,
``diag invariant-set``, ``homotopy word``, ``tracts inspect``.

Exit codes: 0 success, 2 usage or bad input, 3 numeric non-convergence,
4 target rejection.  Outputs are JSON (or CSV where noted), embed the
schema string and the resolved run configuration, and are byte-identical
for identical arguments and seed.  RAYFORGE_THREADS overrides --threads.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import os
import sys

import numpy as np

from . import config, polyexp, rays, serialize, thurston, tracts
from .errors import (
    AmbiguousTractError,
    BranchSelectionError,
    DegenerateCurveError,
    DomainError,
    FitError,
    InvariantViolationError,
    NotConvergedError,
    NotEscapingError,
    OverflowSignal,
    RayforgeError,
    RootSolveError,
    SpecRejectionError,
    TractConfigError,
    UnsupportedHomotopyError,
)
from .homotopy import word_of_curve

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_REJECTED = 4

_NUMERIC_ERRORS = (
    NotConvergedError,
    RootSolveError,
    FitError,
    NotEscapingError,
    OverflowSignal,
    TractConfigError,
    BranchSelectionError,
    AmbiguousTractError,
)
_REJECTION_ERRORS = (
    SpecRejectionError,
    UnsupportedHomotopyError,
    InvariantViolationError,
)


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return serialize.loads(fh.read())
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _threads(args) -> int:
    env = os.environ.get("RAYFORGE_THREADS")
    if env:
        return max(1, int(env))
    return max(1, getattr(args, "threads", 1))


def _run_config(args, **extra) -> dict:
    cfg = {
        "command": args.command_path,
        "seed": getattr(args, "seed", None),
        "threads": _threads(args),
        "cap": getattr(args, "cap", config.CAP),
        "tol": getattr(args, "tol", None),
    }
    cfg.update(extra)
    return cfg


def _cmd_ray_trace(args) -> int:
    map_ = serialize.map_from_json(_read_json(args.map))
    address = serialize.address_from_json(_read_json(args.address))
    cfg = tracts.make_tract_config(map_)
    segment = rays.trace_segment(
        map_,
        cfg,
        address,
        args.t_lo,
        args.t_hi,
        args.samples,
        cap=args.cap,
        tol=args.tol,
        max_depth=args.max_depth,
    )
    run_cfg = _run_config(
        args, t_lo=args.t_lo, t_hi=args.t_hi, samples=args.samples, format=args.out
    )
    if args.out == "csv":
        buf = io.StringIO()
        cfg_line = json.dumps(run_cfg, sort_keys=True)
        buf.write(f"# {serialize.SCHEMA} config={cfg_line}\n")
        buf.write("t,re,im,depth,err\n")
        for p in segment.samples:
            buf.write(f"{p.t!r},{p.z.real!r},{p.z.imag!r},{p.depth_used},{p.error_estimate!r}\n")
        _emit(buf.getvalue(), args.output)
    else:
        payload = {
            "schema": serialize.SCHEMA,
            "config": run_cfg,
            "samples": [
                {
                    "t": p.t,
                    "re": p.z.real,
                    "im": p.z.imag,
                    "depth": p.depth_used,
                    "err": p.error_estimate,
                }
                for p in segment.samples
            ],
        }
        _emit(serialize.dumps(payload), args.output)
    return EXIT_OK


def _finite(x: float):
    """JSON-safe float: certificate fields may be nan/inf on failed orbits."""
    return x if math.isfinite(x) else None


def _cmd_classify(args) -> int:
    spec = serialize.spec_from_json(_read_json(args.spec))
    result = thurston.classify(
        spec, max_iter=args.max_iter, tol=args.tol, cap=args.cap,
        log_iterates=args.log_iterates,
    )
    cert = result.certificate
    payload = {
        "schema": serialize.SCHEMA,
        "config": _run_config(args, max_iter=args.max_iter, spec=serialize.spec_to_json(spec)),
        "d": result.map.d,
        "coeffs": [serialize.complex_to_json(c) for c in result.map.coeffs],
        "grid": [
            [serialize.complex_to_json(complex(v)) for v in row]
            for row in result.grid.z
        ],
        "delta_history": list(result.deltas),
        "iterations": result.iterations,
        "converged": result.converged,
        "certificate": {
            "passed": cert.passed,
            "notes": list(cert.notes),
            "orbits": [
                {
                    "orbit": c.orbit,
                    "singular_value": serialize.complex_to_json(c.singular_value),
                    "potential": _finite(c.potential),
                    "potential_error": _finite(c.potential_error),
                    "prefix_match_length": c.prefix_match_length,
                    "prefix_length": c.prefix_length,
                    "residual": _finite(c.residual),
                    "escaped": c.escaped,
                }
                for c in cert.checks
            ],
        },
    }
    if args.log_iterates:
        payload["iterates"] = [
            [[serialize.complex_to_json(complex(v)) for v in row] for row in grid]
            for grid in result.iterate_log
        ]
    _emit(serialize.dumps(payload), args.out)
    return EXIT_OK if cert.passed else EXIT_NUMERIC


def _cmd_diag_appendix(args) -> int:
    report = polyexp.appendix_report(
        args.d,
        args.rho,
        samples=args.samples,
        seed=args.seed,
        threads=_threads(args),
    )
    payload = {
        "schema": serialize.SCHEMA,
        "config": _run_config(args, d=args.d, rho=args.rho, samples=args.samples),
        "max_critical_point_ratio": report.max_critical_point_ratio,
        "max_coefficient_ratio": report.max_coefficient_ratio,
        "containment_maps": report.containment_maps,
        "containment_failures": report.containment_failures,
        "worst_case": report.worst_case,
    }
    _emit(serialize.dumps(payload), args.output)
    return EXIT_OK


def _cmd_diag_invariant(args) -> int:
    run = _read_json(args.run)
    try:
        spec = serialize.spec_from_json(run["config"]["spec"])
        grids = run.get("iterates")
        if grids is None:
            grids = [run["grid"]]
    except (KeyError, TypeError) as exc:
        raise DomainError(f"run file lacks spec/grid data: {exc}") from exc
    rows = []
    for it, grid_json in enumerate(grids):
        grid = np.array(
            [[complex(v["re"], v["im"]) for v in row] for row in grid_json],
            dtype=complex,
        )
        rep = thurston.invariant_set_diagnostics(grid, spec)
        rows.append(
            {
                "iteration": it,
                "rho": rep.rho,
                "inside_disk": rep.inside_disk,
                "tail_asymptotics": rep.tail_asymptotics,
                "separation": rep.separation,
                "homotopy_budget": rep.homotopy_budget,
                "pullback_real_parts": rep.pullback_real_parts,
                "derivative_domain": rep.derivative_domain,
            }
        )
    payload = {
        "schema": serialize.SCHEMA,
        "config": _run_config(args, run=args.run),
        "iterations": rows,
    }
    _emit(serialize.dumps(payload), args.output)
    return EXIT_OK


def _cmd_homotopy_word(args) -> int:
    marked = serialize.marked_from_json(_read_json(args.marked))
    curve = serialize.curve_from_json(_read_json(args.curve))
    word = word_of_curve(marked, curve)
    payload = {
        "schema": serialize.SCHEMA,
        "config": _run_config(args),
        "word": [[idx, sign] for idx, sign in word.letters],
    }
    _emit(serialize.dumps(payload), args.output)
    return EXIT_OK


def _cmd_tracts_inspect(args) -> int:
    map_ = serialize.map_from_json(_read_json(args.map))
    cfg = tracts.make_tract_config(map_, eps=args.epsilon)
    payload = {
        "schema": serialize.SCHEMA,
        "config": _run_config(args, epsilon=args.epsilon),
        "d": cfg.d,
        "r": cfg.r,
        "r_min": cfg.r_min,
        "t_up": cfg.t_up,
        "t_lo": cfg.t_lo,
        "eps": cfg.eps,
        "strips": [
            {
                "n": n,
                "center": cfg.strip_center(n),
                "half_width": cfg.strip_half_width(),
            }
            for n in range(-args.strips, args.strips + 1)
        ],
    }
    _emit(serialize.dumps(payload), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rayforge",
        description="Escaping dynamics of polynomial-exponential maps",
    )
    sub = parser.add_subparsers(dest="group", required=True)

    ray = sub.add_parser("ray", help="dynamic-ray operations")
    ray_sub = ray.add_subparsers(dest="action", required=True)
    trace = ray_sub.add_parser("trace", help="trace a ray segment")
    trace.add_argument("--map", required=True, help="map JSON file")
    trace.add_argument("--address", required=True, help="address JSON file")
    trace.add_argument("--t-lo", dest="t_lo", type=float, required=True)
    trace.add_argument("--t-hi", dest="t_hi", type=float, required=True)
    trace.add_argument("--samples", type=int, required=True)
    trace.add_argument("--out", choices=("csv", "json"), default="csv",
                       help="output format (default csv)")
    trace.add_argument("--output", default=None, help="output file (default stdout)")
    trace.add_argument("--cap", type=float, default=config.CAP)
    trace.add_argument("--tol", type=float, default=config.TRACER_TOL)
    trace.add_argument("--max-depth", dest="max_depth", type=int,
                       default=config.TRACER_MAX_DEPTH)
    trace.add_argument("--seed", type=int, default=0)
    trace.add_argument("--threads", type=int, default=1)
    trace.set_defaults(handler=_cmd_ray_trace, command_path="ray trace")

    classify = sub.add_parser("classify", help="solve for a map with the target escape data")
    classify.add_argument("--spec", required=True, help="target spec JSON file")
    classify.add_argument("--out", default=None, help="result JSON file (default stdout)")
    classify.add_argument("--log-iterates", action="store_true")
    classify.add_argument("--max-iter", dest="max_iter", type=int,
                          default=config.CLASSIFY_MAX_ITER)
    classify.add_argument("--tol", type=float, default=config.CLASSIFY_TOL)
    classify.add_argument("--cap", type=float, default=config.CAP)
    classify.add_argument("--seed", type=int, default=0)
    classify.add_argument("--threads", type=int, default=1)
    classify.set_defaults(handler=_cmd_classify, command_path="classify")

    diag = sub.add_parser("diag", help="diagnostic reports")
    diag_sub = diag.add_subparsers(dest="action", required=True)
    app = diag_sub.add_parser("appendix-a", help="Monte-Carlo bound checkers")
    app.add_argument("--d", type=int, required=True)
    app.add_argument("--rho", type=float, required=True)
    app.add_argument("--samples", type=int, default=1000)
    app.add_argument("--seed", type=int, default=0)
    app.add_argument("--threads", type=int, default=1)
    app.add_argument("--output", default=None)
    app.set_defaults(handler=_cmd_diag_appendix, command_path="diag appendix-a")

    inv = diag_sub.add_parser("invariant-set", help="invariant-region conditions per iteration")
    inv.add_argument("--run", required=True, help="classify result JSON")
    inv.add_argument("--output", default=None)
    inv.add_argument("--seed", type=int, default=0)
    inv.add_argument("--threads", type=int, default=1)
    inv.set_defaults(handler=_cmd_diag_invariant, command_path="diag invariant-set")

    hom = sub.add_parser("homotopy", help="curve words relative marked points")
    hom_sub = hom.add_subparsers(dest="action", required=True)
    word = hom_sub.add_parser("word", help="crossing word of a curve")
    word.add_argument("--marked", required=True, help="marked points JSON file")
    word.add_argument("--curve", required=True, help="curve JSON file")
    word.add_argument("--output", default=None)
    word.add_argument("--seed", type=int, default=0)
    word.add_argument("--threads", type=int, default=1)
    word.set_defaults(handler=_cmd_homotopy_word, command_path="homotopy word")

    tr = sub.add_parser("tracts", help="strip geometry")
    tr_sub = tr.add_subparsers(dest="action", required=True)
    inspect = tr_sub.add_parser("inspect", help="dump certified strip bounds")
    inspect.add_argument("--map", required=True, help="map JSON file")
    inspect.add_argument("--epsilon", type=float, default=None)
    inspect.add_argument("--strips", type=int, default=3)
    inspect.add_argument("--output", default=None)
    inspect.add_argument("--seed", type=int, default=0)
    inspect.add_argument("--threads", type=int, default=1)
    inspect.set_defaults(handler=_cmd_tracts_inspect, command_path="tracts inspect")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.handler(args)
    except _REJECTION_ERRORS as exc:
        diag = {"schema": serialize.SCHEMA, "error": {"kind": type(exc).__name__, "message": str(exc)}}
        sys.stdout.write(serialize.dumps(diag))
        return EXIT_REJECTED
    except _NUMERIC_ERRORS as exc:
        diag = {"schema": serialize.SCHEMA, "error": {"kind": type(exc).__name__, "message": str(exc)}}
        sys.stdout.write(serialize.dumps(diag))
        return EXIT_NUMERIC
    except (DomainError, DegenerateCurveError, RayforgeError) as exc:
        sys.stderr.write(f"rayforge: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
