"""Command-line front end: ``uct analyze | minimize | curve | verify | schema``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Sequence

from . import __version__
from .curve import build_curve, enumerate_nests, export_curve, min_enclosing_circle
from .errors import FormatError, UctError, VerificationFailed
from .measures import (
    AtomicMeasure,
    Order,
    lindelof_defect,
    measure_from_obj,
    measure_to_obj,
    parse_measure,
)
from .minimizer import (
    MINIMAX_TOL,
    SURGERY_TOL,
    AnalyzeOptions,
    analyze,
    verify_type_minimizing,
)
from .trigfun import h_from_measure

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "uct measure",
    "description": (
        "A finite atomic angular density and its order. Each atom gives exactly one of angle "
        "(radians) or angle_over_pi, and exactly one of mass or mass_times_2pi. Angles are reduced "
        "mod 2 pi and atoms closer than 1e-12 are merged."
    ),
    "type": "object",
    "additionalProperties": False,
    "required": ["rho", "atoms"],
    "properties": {
        "rho": {
            "description": "order rho > 1/2, as a number or an exact fraction",
            "oneOf": [
                {"type": "number", "exclusiveMinimum": 0.5},
                {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["num", "den"],
                    "properties": {"num": {"type": "integer"}, "den": {"type": "integer", "minimum": 1}},
                },
            ],
        },
        "atoms": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "angle": {"type": "number"},
                    "angle_over_pi": {"type": "number"},
                    "mass": {"type": "number", "minimum": 0},
                    "mass_times_2pi": {"type": "number", "minimum": 0},
                },
                "oneOf": [{"required": ["angle"]}, {"required": ["angle_over_pi"]}],
            },
        },
    },
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage errors through the normal error path."""

    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _dump(obj) -> bytes:
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from None


def _read_json(path: str):
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _load_measure(path: str) -> tuple[Order, AtomicMeasure]:
    try:
        return parse_measure(_read_text(path))
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def _readable_atoms(measure: AtomicMeasure) -> list[dict]:
    return [
        {"angle": a, "angle_over_pi": a / math.pi, "mass": m, "mass_times_2pi": m * 2 * math.pi}
        for a, m in measure
    ]


def _options(args) -> AnalyzeOptions:
    return AnalyzeOptions(
        seed=args.seed,
        restarts=args.restarts,
        tol=MINIMAX_TOL if args.tol is None else args.tol,
        cross_check=args.cross_check,
    )


def _cmd_analyze(args) -> bytes:
    order, measure = _load_measure(args.input)
    return _dump(analyze(measure, order, _options(args)).to_obj())


def _cmd_minimize(args) -> bytes:
    order, measure = _load_measure(args.input)
    report = analyze(measure, order, _options(args))
    res = report.result
    tol = SURGERY_TOL if res.method != "minimax" else _options(args).tol
    check = verify_type_minimizing(measure, res.delta_star, order, tol)
    obj = {
        "measure": measure_to_obj(order, measure),
        "delta_star": measure_to_obj(order, res.delta_star),
        "delta_star_atoms": _readable_atoms(res.delta_star),
        "method": res.method,
        "achieved": res.achieved,
        "target": res.target,
        "seed": args.seed,
        "restarts": args.restarts,
        "verification": check.to_obj(),
    }
    return _dump(obj)


def _cmd_verify(args) -> bytes:
    recorded_tol = None
    if args.star is None:
        obj = _read_json(args.input)
        if not isinstance(obj, dict) or "measure" not in obj or "delta_star" not in obj:
            raise FormatError(f"{args.input}: expected the output of 'uct minimize', or give two measure files")
        order, measure = measure_from_obj(obj["measure"])
        order_star, star = measure_from_obj(obj["delta_star"])
        recorded_tol = (obj.get("verification") or {}).get("tolerance")
    else:
        order, measure = _load_measure(args.input)
        order_star, star = _load_measure(args.star)
    if abs(order.value - order_star.value) > 1e-12:
        raise FormatError(f"orders differ: {order.value!r} and {order_star.value!r}")
    tol = args.tol if args.tol is not None else (recorded_tol if recorded_tol is not None else SURGERY_TOL)
    report = verify_type_minimizing(measure, star, order, tol)
    out = report.to_obj()
    if not report.passed:
        raise VerificationFailed(
            f"sigma_U = {report.sigma_U_base!r}, but the sum has sigma_Z = {report.sigma_Z_total!r} "
            f"and sigma_U = {report.sigma_U_total!r} (tolerance {tol!r})"
        )
    return _dump(out)


def _cmd_curve(args) -> bytes:
    order, measure = _load_measure(args.input)
    d = lindelof_defect(measure, order)
    if not d.regular:
        from .errors import NotRegular

        raise NotRegular(f"rho-th moment is {d.value:.3e}; integer order needs a regular measure")
    h = h_from_measure(measure, order)
    poly = build_curve(h)
    circle = None
    if order.is_integer and poly.vertices:
        circle = min_enclosing_circle([(v.x, v.y) for v in poly.vertices])
    return export_curve(poly, enumerate_nests(h), args.format, circle)


def _cmd_schema(args) -> bytes:
    return _dump(SCHEMA)


def _build_parser() -> _Parser:
    p = _Parser(prog="uct", description="Critical types of entire functions with a prescribed angular density.")
    p.add_argument("--version", action="version", version=f"uct {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, search=True):
        sp.add_argument("--out", default=None, help="write output to this path instead of stdout")
        if search:
            sp.add_argument("--seed", type=int, default=0)
            sp.add_argument("--restarts", type=int, default=8)
            sp.add_argument("--tol", type=float, default=None)
            sp.add_argument("--cross-check", action="store_true", help="also run the numerical search")

    sp = sub.add_parser("analyze", help="types, nests and a type-minimizing measure")
    sp.add_argument("input", help="measure file, or - for stdin")
    common(sp)
    sp.set_defaults(func=_cmd_analyze)

    sp = sub.add_parser("minimize", help="type-minimizing measure with a verification block")
    sp.add_argument("input")
    common(sp)
    sp.set_defaults(func=_cmd_minimize)

    sp = sub.add_parser("curve", help="export the locally convex polygon")
    sp.add_argument("input")
    sp.add_argument("--format", choices=("svg", "csv", "json"), default="svg")
    common(sp, search=False)
    sp.set_defaults(func=_cmd_curve)

    sp = sub.add_parser("verify", help="check a measure pair, or the output of minimize")
    sp.add_argument("input")
    sp.add_argument("star", nargs="?", default=None)
    sp.add_argument("--tol", type=float, default=None)
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_verify)

    sp = sub.add_parser("schema", help="print the input format as JSON Schema")
    sp.add_argument("--out", default=None)
    sp.set_defaults(func=_cmd_schema)
    return p


def _diagnostic(kind: str, message: str, stream) -> None:
    color = not os.environ.get("UCT_NO_COLOR") and hasattr(stream, "isatty") and stream.isatty()
    label = f"\x1b[31m{kind}\x1b[0m" if color else kind
    print(f"uct: {label}: {message}", file=stream)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    """Execute one command and return its exit code."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        _diagnostic("usage error", str(exc), stderr)
        return 2
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    try:
        data = args.func(args)
        if args.out:
            with open(args.out, "wb") as fh:
                fh.write(data)
        else:
            buf = getattr(stdout, "buffer", None)
            if buf is not None:
                buf.write(data)
                buf.flush()
            else:
                stdout.write(data.decode("utf-8"))
    except UctError as exc:
        _diagnostic(type(exc).__name__, str(exc), stderr)
        return exc.exit_code
    except OSError as exc:
        _diagnostic("IOError", str(exc), stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())
