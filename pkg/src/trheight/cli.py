"""Command-line front end: ``trheight <command> [options]``.

Commands: height, bound, optimize, sweep, az, corpus, verify.  Every command
accepts ``--json`` and ``--config FILE`` (flat ``key = value`` lines, with
command-line flags taking precedence).  Environment variables are ignored.

Exit status: 0 on success, 1 on a computation failure, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Optional, Sequence

import numpy as np

from . import __version__
from .algebra import (
    PolynomialSyntaxError,
    RootFindingError,
    cyclotomic,
    height_from_roots,
    parse_polynomial,
    roots,
)
from .bounds import lower_bound, optimize_exponent, sweep, sweep_grid
from .equidist import (
    SMYTH_LIMIT,
    Family,
    empirical_c,
    family_polynomial,
    smyth_height_sequence,
)
from .geometry import TestFunction, eval_test_function
from .quadrature import QuadratureConfig, circle_integral

DEFAULT_PRECISION = 128
DEFAULT_TOL = 1e-9
SWEEP_CSV_HEADER = ["p", "circle_integral", "energy", "main_term", "bound", "err"]


class UsageError(ValueError):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict
    results: dict
    error_estimates: dict = field(default_factory=dict)
    wall_time_ms: float = 0.0

    def to_json(self, **kwargs) -> str:
        return json.dumps(asdict(self), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        data = json.loads(text)
        missing = {"command", "inputs", "results", "error_estimates", "wall_time_ms"} - set(data)
        if missing:
            raise ValueError(f"report is missing keys {sorted(missing)}")
        return cls(**data)


def _quad_config(tol: float, precision: int) -> QuadratureConfig:
    return QuadratureConfig(abs_tol=tol * 1e-3, rel_tol=tol, working_precision=precision)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        report = fn(*args, **kwargs)
        report.wall_time_ms = (time.perf_counter() - t0) * 1e3
        return report
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


@_timed
def cmd_height(poly_text: str, precision: int = DEFAULT_PRECISION, show_roots: bool = False) -> RunReport:
    poly = parse_polynomial(poly_text)
    if poly.degree < 1:
        raise UsageError("polynomial must have degree >= 1")
    rs = roots(poly, precision)
    h = height_from_roots(rs)
    results: dict[str, Any] = {
        "polynomial": str(poly),
        "degree": poly.degree,
        "height": h.value,
        "mahler_measure": math.exp(h.value * poly.degree),
        "totally_real": rs.all_real(),
    }
    if show_roots:
        results["roots"] = [[float(z.real), float(z.imag)] for z in rs.roots]
    return RunReport("height", {"poly": poly_text, "precision": precision}, results,
                     {"height": h.error, "max_root_radius": rs.max_radius})


def _check_p(p: float) -> TestFunction:
    try:
        return TestFunction(p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


@_timed
def cmd_bound(p: float, tol: float = DEFAULT_TOL, precision: int = DEFAULT_PRECISION) -> RunReport:
    _check_p(p)
    rep = lower_bound(p, _quad_config(tol, precision))
    return RunReport(
        "bound", {"p": p, "tol": tol},
        {
            "p": rep.p,
            "bound": rep.bound,
            "circle_integral": rep.circle_integral,
            "energy": rep.energy,
            "main_term": rep.main_term,
            "lipschitz_lower": rep.lipschitz_bracket[0],
            "lipschitz_upper": rep.lipschitz_bracket[1],
        },
        {"bound": rep.bound_error, "circle_integral": rep.circle_error, "energy": rep.energy_error},
    )


@_timed
def cmd_optimize(lo: float, hi: float, xtol: float = 1e-4, tol: float = DEFAULT_TOL,
                 precision: int = DEFAULT_PRECISION) -> RunReport:
    if not (1 < lo < hi):
        raise UsageError("need 1 < lo < hi")
    if not xtol > 0:
        raise UsageError("xtol must be positive")
    p_star, rep = optimize_exponent(lo, hi, xtol, _quad_config(tol, precision))
    return RunReport(
        "optimize", {"lo": lo, "hi": hi, "xtol": xtol, "tol": tol},
        {"p_star": p_star, "bound": rep.bound, "circle_integral": rep.circle_integral,
         "energy": rep.energy, "main_term": rep.main_term},
        {"bound": rep.bound_error, "p_star": xtol},
    )


def write_sweep_csv(path: str, reports) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_CSV_HEADER)
        for r in reports:
            w.writerow([repr(float(v)) for v in
                        (r.p, r.circle_integral, r.energy, r.main_term, r.bound, r.bound_error)])


@_timed
def cmd_sweep(lo: float, hi: float, step: float, out: Optional[str] = None,
              tol: float = DEFAULT_TOL, precision: int = DEFAULT_PRECISION) -> RunReport:
    try:
        sweep_grid(lo, hi, step)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    reps = sweep(lo, hi, step, _quad_config(tol, precision))
    if out:
        write_sweep_csv(out, reps)
    rows = [{k: getattr(r, k) for k in ("p", "circle_integral", "energy", "main_term", "bound")}
            | {"failure": r.failure} for r in reps]
    ok = [r for r in reps if r.ok]
    best = max(ok, key=lambda r: r.bound) if ok else None
    return RunReport(
        "sweep", {"lo": lo, "hi": hi, "step": step, "out": out, "tol": tol},
        {"rows": rows, "best_p": best.p if best else None, "best_bound": best.bound if best else None},
        {"bound": [r.bound_error for r in reps]},
    )


@_timed
def cmd_az(depth: int, seed: str = "1") -> RunReport:
    if depth < 0:
        raise UsageError("depth must be >= 0")
    try:
        seq = smyth_height_sequence(depth, Fraction(seed))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    gaps = [abs(seq[k][1] - seq[k - 1][1]) for k in range(1, len(seq))]
    return RunReport(
        "az", {"depth": depth, "seed": seed},
        {"estimate": seq[-1][1], "reference": SMYTH_LIMIT,
         "table": [{"depth": k, "height": v} for k, v in seq]},
        {"last_gap": gaps[-1] if gaps else None},
    )


def _corpus_members(family: str, max_n: int, base: int, max_depth: int, seed: str):
    if family == "cyclotomic":
        return [(n, cyclotomic(n)) for n in range(1, max_n + 1)]
    if family == "radical":
        return [(n, family_polynomial(Family.radical(base, n))) for n in range(1, max_n + 1)]
    return [(k, family_polynomial(Family.smyth_preimages(k, Fraction(seed)))) for k in range(0, max_depth + 1)]


@_timed
def cmd_corpus(family: str, max_n: int = 64, p: float = 3.0, base: int = 2, max_depth: int = 5,
               seed: str = "1", tol: float = DEFAULT_TOL, precision: int = DEFAULT_PRECISION) -> RunReport:
    tf = _check_p(p)
    if max_n < 1 or max_depth < 0:
        raise UsageError("max-n must be >= 1 and max-depth >= 0")
    try:
        members = _corpus_members(family, max_n, base, max_depth, seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    cfg = _quad_config(tol, precision)
    circ = circle_integral(tf, cfg).value
    rows = []
    for n, poly in members:
        rs = roots(poly, precision)
        avg = float(np.mean(eval_test_function(tf, rs.as_complex())))
        rows.append({
            "n": n,
            "degree": poly.degree,
            "height": height_from_roots(rs).value,
            "average": avg,
            "discrepancy": abs(avg - circ),
        })
    fit = [poly for _, poly in members if poly.degree >= 2]
    c_fit = empirical_c(fit, tf, cfg) if fit else None
    return RunReport(
        "corpus",
        {"family": family, "max_n": max_n, "p": p, "base": base, "max_depth": max_depth, "seed": seed},
        {"circle_integral": circ, "table": rows,
         "empirical_c": c_fit.value if c_fit else None},
        {},
    )


@_timed
def cmd_verify(quick: bool = False) -> RunReport:
    from .acceptance import run_all

    outcomes = run_all(quick=quick)
    return RunReport(
        "verify", {"quick": quick},
        {"criteria": [o.to_dict() for o in outcomes], "all_passed": all(o.passed for o in outcomes)},
        {},
    )


# --- rendering ---------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def _print_table(rows: list[dict], out) -> None:
    if not rows:
        return
    keys = list(rows[0])
    cells = [[_fmt(r[k]) for k in keys] for r in rows]
    widths = [max(len(k), *(len(c[i]) for c in cells)) for i, k in enumerate(keys)]
    print("  ".join(k.rjust(w) for k, w in zip(keys, widths)), file=out)
    for c in cells:
        print("  ".join(v.rjust(w) for v, w in zip(c, widths)), file=out)


def render(report: RunReport, out=None) -> None:
    out = out or sys.stdout
    if report.command == "verify":
        for c in report.results["criteria"]:
            status = "PASS" if c["passed"] else "FAIL"
            print(f"[{status}] {c['number']:>2}. {c['name']}: {c['detail']} ({c['seconds']:.2f} s)", file=out)
        print("all criteria passed" if report.results["all_passed"] else "some criteria FAILED", file=out)
        return
    for key, val in report.results.items():
        if isinstance(val, list) and val and isinstance(val[0], dict):
            print(f"{key}:", file=out)
            _print_table(val, out)
        else:
            err = report.error_estimates.get(key)
            suffix = f"  (+/- {err:.2e})" if isinstance(err, float) else ""
            print(f"{key}: {_fmt(val)}{suffix}", file=out)


# --- argument parsing --------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the report as JSON")
    common.add_argument("--config", metavar="FILE", help="flat key=value defaults")
    common.add_argument("--precision", type=int, default=DEFAULT_PRECISION, help="working precision in bits")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="relative quadrature tolerance")
    return common


def build_parser() -> tuple[argparse.ArgumentParser, dict]:
    parser = argparse.ArgumentParser(prog="trheight", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common()
    subs = {}

    s = subs["height"] = sub.add_parser("height", parents=[common], help="Weil height of a polynomial's roots")
    s.add_argument("--poly",
                   help='e.g. "x^2 - x - 1", or a coefficient list as --poly=-1,-1,1')
    s.add_argument("--roots", action="store_true", help="list the roots")

    s = subs["bound"] = sub.add_parser("bound", parents=[common], help="height lower bound for one exponent")
    s.add_argument("--p", type=float, default=3.0)

    s = subs["optimize"] = sub.add_parser("optimize", parents=[common], help="golden-section search over p")
    s.add_argument("--lo", type=float, default=2.0)
    s.add_argument("--hi", type=float, default=5.0)
    s.add_argument("--xtol", type=float, default=1e-4, help="final bracket width in p")

    s = subs["sweep"] = sub.add_parser("sweep", parents=[common], help="bound on a grid of exponents")
    s.add_argument("--lo", type=float, default=2.0)
    s.add_argument("--hi", type=float, default=5.0)
    s.add_argument("--step", type=float, default=0.25)
    s.add_argument("--out", help="write CSV here")

    s = subs["az"] = sub.add_parser("az", parents=[common], help="Smyth backward-orbit height table")
    s.add_argument("--depth", type=int, default=12)
    s.add_argument("--seed", default="1", help="preperiodic rational seed")

    s = subs["corpus"] = sub.add_parser("corpus", parents=[common], help="equidistribution table for a family")
    s.add_argument("--family", choices=["cyclotomic", "radical", "smyth"], default="cyclotomic")
    s.add_argument("--max-n", type=int, default=64)
    s.add_argument("--base", type=int, default=2)
    s.add_argument("--max-depth", type=int, default=5)
    s.add_argument("--seed", default="1")
    s.add_argument("--p", type=float, default=3.0)

    s = subs["verify"] = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    s.add_argument("--quick", action="store_true", help="smaller sample sizes")
    return parser, subs


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def load_config(path: str) -> dict[str, str]:
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def _apply_config(sub: argparse.ArgumentParser, values: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    typed = {}
    for key, raw in values.items():
        if key in ("config", "help") or key not in actions:
            continue  # keys for other commands are ignored
        action = actions[key]
        if isinstance(action, argparse._StoreTrueAction):
            low = raw.lower()
            if low not in _TRUE | _FALSE:
                raise UsageError(f"config key {key}: expected a boolean, got {raw!r}")
            typed[key] = low in _TRUE
        else:
            try:
                typed[key] = action.type(raw) if action.type else raw
            except ValueError:
                raise UsageError(f"config key {key}: bad value {raw!r}") from None
    sub.set_defaults(**typed)


def dispatch(args: argparse.Namespace) -> RunReport:
    c = args.command
    if c == "height":
        if args.poly is None:
            raise UsageError("--poly is required (on the command line or in the config file)")
        return cmd_height(args.poly, args.precision, args.roots)
    if c == "bound":
        return cmd_bound(args.p, args.tol, args.precision)
    if c == "optimize":
        return cmd_optimize(args.lo, args.hi, args.xtol, args.tol, args.precision)
    if c == "sweep":
        return cmd_sweep(args.lo, args.hi, args.step, args.out, args.tol, args.precision)
    if c == "az":
        return cmd_az(args.depth, args.seed)
    if c == "corpus":
        return cmd_corpus(args.family, args.max_n, args.p, args.base, args.max_depth, args.seed,
                          args.tol, args.precision)
    return cmd_verify(args.quick)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser, subs = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.config:
            # config values become subcommand defaults; explicit flags still win
            _apply_config(subs[args.command], load_config(args.config))
            args = parser.parse_args(argv)
        if args.tol <= 0 or args.precision < 53:
            raise UsageError("tol must be positive and precision at least 53 bits")
        report = dispatch(args)
    except (UsageError, PolynomialSyntaxError, OSError) as exc:
        print(f"trheight {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (RootFindingError, ArithmeticError, ValueError, RuntimeError) as exc:
        print(f"trheight {args.command}: computation failed: {exc}", file=sys.stderr)
        return 1

    if args.json:
        print(report.to_json(indent=2))
    else:
        render(report)
    if report.command == "verify" and not report.results["all_passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
