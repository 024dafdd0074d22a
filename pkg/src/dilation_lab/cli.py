"""Command-line front end; every command prints CSV or JSON.

Exit status: 0 on success, 1 on a numerical failure or a failed
verification (a JSON error object is printed), 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from typing import Sequence

import numpy as np

from .density import parse_measure
from .errors import DilationLabError
from .intervals import IntervalUnion
from .model import CurvatureTriple
from .report import json_safe

__all__ = ["main", "build_parser", "parse_grid", "parse_number"]


class UsageError(Exception):
    """Malformed command-line input (exit status 2)."""


def parse_number(text: str) -> float:
    t = str(text).strip().lower()
    table = {"inf": math.inf, "+inf": math.inf, "infinity": math.inf, "-inf": -math.inf,
             "-infinity": -math.inf, "pi": math.pi}
    if t in table:
        return table[t]
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def parse_grid(text: str) -> np.ndarray:
    """``a:b:n`` (n evenly spaced points) or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"grid must look like a:b:n, got {text!r}")
        a, b = parse_number(parts[0]), parse_number(parts[1])
        try:
            n = int(parts[2])
        except ValueError:
            raise UsageError(f"grid size must be an integer, got {parts[2]!r}") from None
        if n < 1 or not (math.isfinite(a) and math.isfinite(b)):
            raise UsageError("grid needs finite ends and at least one point")
        return np.linspace(a, b, n)
    values = [parse_number(v) for v in text.split(",") if v.strip()]
    if not values:
        raise UsageError("empty grid")
    return np.array(values)


def _fmt(v: float) -> str:
    return f"{float(v):.9g}"


def _json_text(obj) -> str:
    return json.dumps(json_safe(obj), sort_keys=True, indent=2) + "\n"


def _union(text: str) -> IntervalUnion:
    # JSON has no inf literal; accept inf/-inf and map them to Infinity
    fixed = re.sub(r"(?<![A-Za-z])(-?)inf(inity)?(?![A-Za-z])", r"\1Infinity", text.strip(), flags=re.I)
    try:
        return IntervalUnion.from_json(fixed)
    except (ValueError, DilationLabError) as exc:
        raise UsageError(f"bad interval union {text!r}: {exc}") from None


def _measure(text: str):
    try:
        return parse_measure(text)
    except DilationLabError as exc:
        raise UsageError(str(exc)) from None


def _triple(K: str, N: str, D: str) -> CurvatureTriple:
    try:
        return CurvatureTriple(parse_number(K), parse_number(N), parse_number(D))
    except DilationLabError as exc:
        raise UsageError(str(exc)) from None


def _test_function(expr: str, structure: str, breakpoints: str | None):
    from .entropy import TestFunction

    bps = [parse_number(b) for b in breakpoints.split(",")] if breakpoints else []
    try:
        return TestFunction.from_expression(expr, structure, bps)
    except DilationLabError as exc:
        raise UsageError(str(exc)) from None


def _csv(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def _table(fmt: str, header: Sequence[str], rows) -> str:
    rows = [list(r) for r in rows]
    if fmt == "json":
        return _json_text([dict(zip(header, r)) for r in rows])
    return _csv(header, rows)


# ---------------------------------------------------------------------------
# commands


def cmd_profile(args) -> tuple[str, int]:
    from .profiles import profile_table

    triple = _triple(args.K, args.N, args.D)
    thetas = parse_grid(args.grid)
    case = profile_table(triple, thetas, "cdd-case")
    general = profile_table(triple, thetas, "cdd-general")
    rows = [(t, v, "cdd-case", g) for t, v, g in zip(case.thetas, case.values, general.values)]
    return _table(args.format, ["theta", "value", "method", "general"], rows), 0


def cmd_flat(args) -> tuple[str, int]:
    from .profiles import flat_profile

    mu = _measure(args.measure)
    text = args.interval.strip()
    if text.startswith("[") and not text[1:].lstrip().startswith("["):
        text = f"[{text}]"  # a bare [a, b] pair
    comps = _union(text).components
    if len(comps) != 1:
        raise UsageError("flat profiles take a single interval")
    a, b = comps[0]
    thetas = parse_grid(args.grid)
    values = flat_profile(mu.pdf, (a, b), thetas)
    return _table(args.format, ["theta", "value", "method"], [(t, v, "flat") for t, v in zip(thetas, values)]), 0


def cmd_dilate(args) -> tuple[str, int]:
    from .measure1d import epsilon_dilate, measure

    mu = _measure(args.measure)
    A = _union(args.union)
    eps = parse_number(args.eps)
    res = epsilon_dilate(A, eps)
    out = {
        "eps": eps,
        "set": A.to_list(),
        "dilated": res.dilated.to_list(),
        "measure": measure(mu, A),
        "dilated_measure": measure(mu, res.dilated),
    }
    return _json_text(out), 0


def cmd_bound(args) -> tuple[str, int]:
    from .epsbounds import build_pipeline

    triple = _triple(args.K, args.N, args.D)
    theta, eps = parse_number(args.theta), parse_number(args.eps)
    pipe = build_pipeline(triple)
    value = pipe.epsilon_bound(theta, eps)
    out = {"triple": str(triple), "theta": theta, "eps": eps, "value": value,
           "threshold": pipe.threshold(eps), "admissible": True}
    return _json_text(out), 0


def cmd_entropy(args) -> tuple[str, int]:
    from .entropy import entropy_bound_check, remez_derivative_at_one

    mu = _measure(args.measure)
    rho = _test_function(args.rho, args.structure, args.breakpoints)
    N = parse_number(args.N)
    uprime = remez_derivative_at_one(mu, rho)
    rep = entropy_bound_check(mu, rho, N, uprime=uprime)
    out = {"entropy": rep.lhs, "uprime": uprime, "pass": rep.passed, "report": rep.to_dict()}
    return _json_text(out), 0 if rep.passed else 1


def cmd_remez(args) -> tuple[str, int]:
    from .entropy import measured_remez

    mu = _measure(args.measure)
    f = _test_function(args.f, args.structure, args.breakpoints)
    s_grid = parse_grid(args.s_grid)
    if np.any(s_grid < 1):
        raise UsageError("s values must be at least 1")
    rows = []
    for s in s_grid:
        est = measured_remez(mu, f, float(s))
        rows.append((float(s), est.C, est.worst_lambda))
    return _table(args.format, ["s", "value", "worst_lambda"], rows), 0


def cmd_verify(args) -> tuple[str, int]:
    from .acceptance import SUITES, run_suite

    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = {}
    ok = True
    for name in names:
        rep, _ = run_suite(name)
        rep.details.pop("seconds", None)  # keep the output reproducible
        results[name] = rep.to_dict()
        ok = ok and rep.passed
    return _json_text({"suite": args.suite, "pass": ok, "results": results}), 0 if ok else 1


# ---------------------------------------------------------------------------
# parser


def _add_format(p) -> None:
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _add_function_flags(p) -> None:
    p.add_argument("--structure", choices=("monotone", "unimodal", "piecewise-monotone"), default="monotone",
                   help="how the function is monotone on the support")
    p.add_argument("--breakpoints", help="comma-separated breakpoints (mode or piece ends)")


def build_parser() -> argparse.ArgumentParser:
    from .acceptance import suite_names

    parser = argparse.ArgumentParser(prog="dilation-lab", description=__doc__.splitlines()[0])
    parser.add_argument("--output", "-o", help="write to this file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("profile", help="CDD profile from the case formulas and the general formula")
    for name in ("K", "N", "D"):
        p.add_argument(name)
    p.add_argument("--grid", default="0.1:0.9:9", help="theta grid a:b:n or a,b,c")
    _add_format(p)
    p.set_defaults(run=cmd_profile)

    p = sub.add_parser("flat", help="flat profile of a preset density on an interval")
    p.add_argument("measure", help="preset such as gaussian:1, or psi:<expr>@lo,hi")
    p.add_argument("interval", help='JSON interval such as "[[0, inf]]" or "[0, 2]"')
    p.add_argument("--grid", default="0.1:0.9:9")
    _add_format(p)
    p.set_defaults(run=cmd_flat)

    p = sub.add_parser("dilate", help="eps-dilation of an interval union and both measures")
    p.add_argument("measure")
    p.add_argument("union", help='JSON array of [lo, hi] pairs')
    p.add_argument("eps")
    p.set_defaults(run=cmd_dilate)

    p = sub.add_parser("bound", help="lower bound for the measure of an eps-dilation")
    for name in ("K", "N", "D", "theta", "eps"):
        p.add_argument(name)
    p.set_defaults(run=cmd_bound)

    p = sub.add_parser("entropy", help="entropy of rho against u'_rho(1)")
    p.add_argument("measure")
    p.add_argument("rho", help="density with respect to the measure, a formula in x")
    p.add_argument("N", help="dimension parameter: inf for the relative entropy")
    _add_function_flags(p)
    p.set_defaults(run=cmd_entropy)

    p = sub.add_parser("remez", help="measured Remez function on a grid of s")
    p.add_argument("measure")
    p.add_argument("f", help="nonnegative function, a formula in x")
    p.add_argument("--s-grid", default="1:4:7")
    _add_function_flags(p)
    _add_format(p)
    p.set_defaults(run=cmd_remez)

    p = sub.add_parser("verify", help="run a named verification suite")
    p.add_argument("suite", choices=suite_names())
    p.set_defaults(run=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        text, status = args.run(args)
    except UsageError as exc:
        sys.stdout.write(_json_text({"error": "UsageError", "message": str(exc)}))
        return 2
    except DilationLabError as exc:
        sys.stdout.write(_json_text({"error": type(exc).__name__, "message": str(exc)}))
        return 1
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
