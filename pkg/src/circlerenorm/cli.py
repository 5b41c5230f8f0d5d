"""Command-line front end: one subcommand per module, CSV data plus JSON metadata.

Exit status is 0 on success, 1 on a domain error (reported as JSON on
stderr) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import __version__
from .cf_arith import brjuno, parse_alpha
from .circle_maps import arnold, arnold_mu, load_map
from .errors import CircleMapError, InconclusiveReport

DEFAULT_GOLDEN_TOL = 1e-12


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- parsing

def parse_range(text: str):
    """'LO:HI:N' -> N equally spaced values including both ends."""
    try:
        lo, hi, n = text.split(":")
        lo, hi, n = float(lo), float(hi), int(n)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected LO:HI:N, got {text!r}") from exc
    if n < 1:
        raise argparse.ArgumentTypeError("N must be at least 1")
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _alpha(text: str):
    try:
        return parse_alpha(text)
    except (ValueError, CircleMapError) as exc:
        raise argparse.ArgumentTypeError(f"bad alpha spec {text!r}: {exc}") from exc


def _add_map_args(p: argparse.ArgumentParser, required: bool = True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--map", help="JSON map spec file")
    g.add_argument("--arnold", nargs=2, type=float, metavar=("A", "B"),
                   help="inline Arnold map x + A - (B/2pi) sin 2pi x")
    g.add_argument("--tongue", type=_alpha, metavar="ALPHA",
                   help="Arnold map on the ALPHA tongue at --b (default 1)")
    p.add_argument("--b", type=float, default=1.0, help="b for --tongue (default 1)")


def _resolve_map(args):
    if args.map:
        path = Path(args.map)
        if not path.exists():
            raise UsageError(f"map file {path} does not exist")
        try:
            return load_map(path)
        except (ValueError, KeyError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read map file {path}: {exc}") from exc
    if args.arnold:
        return arnold(*args.arnold)
    from .tongues import tongue_point
    return arnold(tongue_point(args.tongue, args.b, DEFAULT_GOLDEN_TOL), args.b)


# ---------------------------------------------------------------- output

def _header(args) -> dict:
    echo = {k: _jsonable(v) for k, v in vars(args).items() if k not in ("func",)}
    return {"tool_version": __version__, "subcommand": args.command, "config_echo": echo}


def _jsonable(v):
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if hasattr(v, "digits") and hasattr(v, "periodic_tail"):
        return {"digits": list(v.digits), "periodic_tail": v.periodic_tail}
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, float) and not math.isfinite(v):
        return None if math.isnan(v) else ("inf" if v > 0 else "-inf")
    return v


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return v


def _emit(args, header: list, rows: list, meta: Optional[dict] = None):
    """CSV to --out (or stdout); JSON metadata next to it (or to --sidecar)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(v) for v in row])
    doc = dict(_header(args), **{k: _jsonable(v) for k, v in (meta or {}).items()})
    if args.out:
        out = Path(args.out)
        out.write_text(buf.getvalue())
        sidecar = Path(args.sidecar) if args.sidecar else out.with_suffix(".json")
        sidecar.write_text(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(buf.getvalue())
        if args.sidecar:
            Path(args.sidecar).write_text(json.dumps(doc, indent=2) + "\n")


def _emit_json(args, payload: dict):
    doc = dict(_header(args), **{k: _jsonable(v) for k, v in payload.items()})
    text = json.dumps(doc, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------- commands

def cmd_staircase(args):
    from .tongues import staircase
    rows = [(a, float(r.lower), float(r.upper)) for a, r in staircase(args.b, args.a_range, args.qcap)]
    _emit(args, ["a", "rot_lo", "rot_hi"], rows)


def cmd_tongue(args):
    from .tongues import tongue_curve
    curve = tongue_curve(args.alpha, args.b_grid, args.tol)
    _emit(args, ["b", "a", "residual"], curve.samples)


def cmd_boundary(args):
    from .tongues import rational_boundary
    lo, hi = rational_boundary(args.p, args.q, args.b)
    _emit(args, ["b", "a_left", "a_right"], [(args.b, lo, hi)])


def cmd_rot(args):
    from .rotation import farey_search
    res = farey_search(_resolve_map(args), depth=args.depth, q_cap=args.qcap)
    _emit_json(args, {"estimate": res.estimate, "lower": res.lower, "upper": res.upper,
                      "digits": list(res.digits), "exact": res.exact})


def cmd_brjuno(args):
    val = brjuno(args.alpha, args.depth)
    _emit_json(args, {"value": val.value, "depth": val.depth, "tail_bound": val.tail_bound})


def cmd_measure(args):
    from .measures import invariance_residual, minus_one_density
    f = _resolve_map(args)
    dens = minus_one_density(f, grid_n=args.grid, max_iter=args.iters, tol=args.tol,
                             method=args.method)
    rows = list(zip(dens.midpoints.tolist(), dens.normalized().weights.tolist()))
    _emit(args, ["cell_midpoint", "weight"], rows,
          {"residual": dens.residual, "iterations": dens.iterations, "method": dens.method,
           "invariance_residual": invariance_residual(f, dens)})


def cmd_partition(args):
    from .partitions import build_partition, partition_stats
    f = _resolve_map(args)
    part = build_partition(f, args.level)
    stats = partition_stats(part, f)
    rows = [(iv.label, iv.l, iv.left, iv.right, iv.length) for iv in part.intervals]
    _emit(args, ["label", "l", "left", "right", "length"], rows,
          {"level": part.level, "q_n": part.q_n, "q_next": part.q_next, "M_n": part.M_n,
           "J_n": part.J_n, "J_index": part.J_index, "n_long": part.n_long,
           "n_short": part.n_short, "max_adjacent_ratio": stats.max_adjacent_ratio,
           "max_len": stats.max_len, "cube_ratio": stats.cube_ratio})


def cmd_renorm(args):
    from .renorm import expansion_lower_bound, expansion_rates
    f = _resolve_map(args)
    est = expansion_rates(f, args.levels)
    from .partitions import closest_returns
    qs = [r.q for r in closest_returns(f)][:len(est.levels)]
    rows = []
    for n, q, mn, inv_j in zip(est.levels, qs, est.Mn, est.inv_Jn):
        try:
            pmin = expansion_lower_bound(f, n).min_P_prime
        except CircleMapError:
            pmin = math.nan
        rows.append((n, q, mn, 1.0 / inv_j if inv_j else math.nan, pmin))
    _emit(args, ["n", "q_n", "M_n", "J_n", "min_P_prime"], rows,
          {"s": est.s, "lambda1_proxy": est.lambda1_proxy, "lambda2_proxy": est.lambda2_proxy,
           "k": est.k})


def cmd_triple(args):
    from .triples import conjugacy_residual, lift_family
    if args.mu1 is not None:
        if args.mu2 is not None:
            mu2 = args.mu2
        else:
            from .tongues import tongue_point
            mu2 = tongue_point(args.alpha, 1.0 + 2.0 * math.pi * args.mu1, DEFAULT_GOLDEN_TOL)
        f = arnold_mu(args.mu1, mu2)
    elif args.map or args.arnold or args.tongue:
        f = _resolve_map(args)
    else:
        raise UsageError("triple lift needs a map (--map/--arnold/--tongue) or --mu1")
    triple = lift_family(f)
    _emit_json(args, dict(triple.to_dict(), residual=conjugacy_residual(f, triple)))


def cmd_smoothness(args):
    from .smoothness_probe import probe
    try:
        report = probe(args.alpha, args.jmax, args.tol, q_cap=args.qcap, workers=args.workers)
        failure = None
    except InconclusiveReport as exc:
        report, failure = exc.report, exc
    rows = list(zip(report.b_samples, report.a_values, report.residuals))
    _emit(args, ["b", "a", "residual"], rows, report.to_dict())
    if failure is not None:
        raise failure


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circlerenorm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, csv_output=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        p.add_argument("--out", help="output file (default stdout)")
        if csv_output:
            p.add_argument("--sidecar", help="JSON metadata file (default: --out with .json)")
        return p

    p = add("staircase", cmd_staircase, "rotation brackets along a at fixed b")
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--a-range", type=parse_range, required=True, metavar="LO:HI:N")
    p.add_argument("--qcap", type=int, default=200)

    p = add("tongue", cmd_tongue, "irrational tongue a*(b) on a b grid")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--b-grid", type=parse_range, required=True, metavar="LO:HI:N")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("boundary", cmd_boundary, "edges of the p/q plateau at fixed b")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--b", type=float, required=True)

    p = add("rot", cmd_rot, "certified rotation-number bracket", csv_output=False)
    _add_map_args(p)
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--qcap", type=int, default=10 ** 5)

    p = add("brjuno", cmd_brjuno, "truncated Brjuno sum", csv_output=False)
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--depth", type=int, default=40)

    p = add("measure", cmd_measure, "(-1)-measure density on a grid")
    _add_map_args(p)
    p.add_argument("--grid", type=int, default=2048)
    p.add_argument("--iters", type=int, default=5000)
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--method", choices=["auto", "grid", "orbit"], default="auto")

    p = add("partition", cmd_partition, "dynamical partition at level n")
    _add_map_args(p)
    p.add_argument("--level", type=int, required=True)

    p = add("renorm", cmd_renorm, "expansion observables of the return maps")
    _add_map_args(p)
    p.add_argument("--levels", type=int, default=12)

    p = add("triple", cmd_triple, "triple lifts", csv_output=False)
    p.add_argument("action", choices=["lift"])
    _add_map_args(p, required=False)
    p.add_argument("--mu1", type=float, default=None)
    p.add_argument("--mu2", type=float, default=None,
                   help="default: the --alpha tongue point at b = 1 + 2 pi mu1")
    p.add_argument("--alpha", type=_alpha, default=parse_alpha("golden"))

    p = add("smoothness", cmd_smoothness, "divided-difference smoothness probe of a tongue")
    p.add_argument("--alpha", type=_alpha, required=True)
    p.add_argument("--jmax", type=int, default=14)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--qcap", type=int, default=10 ** 8,
                   help="largest convergent denominator used by the bisection")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2
    except CircleMapError as exc:
        print(json.dumps({k: _jsonable(v) for k, v in exc.to_dict().items()}), file=sys.stderr)
        return 1
    except ValueError as exc:
        print(json.dumps({"error": "ValueError", "message": str(exc)}), file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
