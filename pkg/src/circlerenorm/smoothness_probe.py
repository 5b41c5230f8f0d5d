"""Numerical smoothness of an irrational tongue at its critical end b = 1.

Samples a*(b) at b_j = 1 - 2^-j and reads the order of smoothness off
sliding-window Newton divided differences: an order whose differences stay
bounded while the next order keeps growing marks the last derivative that
exists.

Order-3 differences on nodes 2^-14 apart amplify errors in a by roughly
2^40, so every tongue point is bisected down to adjacent floats using
convergents up to ``PROBE_QCAP``; ``tol`` bounds the certified
rotation-number bracket of each sample.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from .cf_arith import ContinuedFraction
from .errors import BracketFailure, DegenerateNodes, InconclusiveReport
from .tongues import AlphaSpec, as_continued_fraction, tongue_sample

J_MIN = 3
J_MAX_CAP = 16
MAX_ORDER = 4
BOUND_WINDOWS = 6
GROWTH_WINDOWS = 4
BOUND_FACTOR = 5.0
NOISE_FACTOR = 4.0
MIN_SPACING = 1e-13
PROBE_QCAP = 10 ** 8


def _check_nodes(xs: np.ndarray, order: int):
    if xs.size < order + 1:
        raise ValueError(f"need at least {order + 1} nodes for order {order}")
    gaps = np.diff(xs)
    if np.any(gaps <= 0):
        raise ValueError("nodes must be strictly increasing")
    if np.any(gaps < MIN_SPACING):
        i = int(np.argmin(gaps))
        raise DegenerateNodes(f"nodes {i} and {i + 1} are {gaps[i]:.2e} apart", index=i)


def _window_weights(xs: np.ndarray) -> np.ndarray:
    """w_i with f[x_0..x_k] = sum_i w_i f(x_i)."""
    diff = xs[:, None] - xs[None, :]
    np.fill_diagonal(diff, 1.0)
    return 1.0 / np.prod(diff, axis=1)


def divided_differences(xs: Sequence[float], ys: Sequence[float], order: int) -> np.ndarray:
    """Newton divided differences of the given order on each window of order+1 nodes."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if order < 0:
        raise ValueError("order must be non-negative")
    if xs.shape != ys.shape:
        raise ValueError("xs and ys differ in length")
    _check_nodes(xs, order)
    table = ys.copy()
    for k in range(1, order + 1):
        table = (table[1:] - table[:-1]) / (xs[k:] - xs[:-k])
    return table


def _noise_floor(xs: np.ndarray, errs: np.ndarray, order: int) -> np.ndarray:
    """Worst-case propagation of the sample errors into each window."""
    m = order + 1
    return np.array([np.abs(_window_weights(xs[i:i + m])) @ errs[i:i + m]
                     for i in range(xs.size - order)])


@dataclass(frozen=True)
class OrderSummary:
    order: int
    values: tuple
    noise: tuple
    bounded: bool
    growing: bool
    growth_exponent: float


def _summarize(xs: np.ndarray, ys: np.ndarray, errs: np.ndarray, order: int) -> OrderSummary:
    d = divided_differences(xs, ys, order)
    floor = NOISE_FACTOR * _noise_floor(xs, errs, order)
    mag = np.abs(d)
    bounded = growing = False
    if d.size >= BOUND_WINDOWS:
        tail, tail_floor = mag[-BOUND_WINDOWS:], floor[-BOUND_WINDOWS:]
        if np.all(tail <= tail_floor):
            bounded = True  # indistinguishable from zero
        else:
            ref = max(tail[0], tail_floor[0])
            bounded = bool(np.max(tail) < BOUND_FACTOR * ref)
    if d.size >= GROWTH_WINDOWS:
        tail, tail_floor = mag[-GROWTH_WINDOWS:], floor[-GROWTH_WINDOWS:]
        same_sign = np.all(np.sign(d[-GROWTH_WINDOWS:]) == np.sign(d[-1]))
        growing = bool(same_sign and np.all(np.diff(tail) > 0) and np.all(tail > tail_floor))
    exponent = _growth_exponent(xs, mag, order)
    return OrderSummary(order, tuple(float(v) for v in d), tuple(float(v) for v in floor),
                        bounded, growing, exponent)


def _growth_exponent(xs: np.ndarray, mag: np.ndarray, order: int) -> float:
    """g in |d| ~ (1 - b)^-g, fitted over the last windows (anchored at their largest b)."""
    n = min(BOUND_WINDOWS, mag.size)
    if n < 2:
        return float("nan")
    dist = 1.0 - xs[order:][-n:]
    vals = mag[-n:]
    if np.any(vals <= 0) or np.any(dist <= 0):
        return float("nan")
    slope = np.polyfit(np.log(dist), np.log(vals), 1)[0]
    return float(-slope)


@dataclass(frozen=True)
class SmoothnessReport:
    b_samples: tuple
    a_values: tuple
    residuals: tuple
    divided_diffs: Dict[int, tuple]
    estimated_k: Optional[int]
    growth_exponents: Dict[int, float]
    bounded: Dict[int, bool] = field(default_factory=dict)
    growing: Dict[int, bool] = field(default_factory=dict)
    noise_floors: Dict[int, tuple] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "b_samples": list(self.b_samples), "a_values": list(self.a_values),
            "residuals": list(self.residuals),
            "divided_diffs": {str(k): list(v) for k, v in self.divided_diffs.items()},
            "noise_floors": {str(k): list(v) for k, v in self.noise_floors.items()},
            "bounded": {str(k): v for k, v in self.bounded.items()},
            "growing": {str(k): v for k, v in self.growing.items()},
            "growth_exponents": {str(k): v for k, v in self.growth_exponents.items()},
            "estimated_k": self.estimated_k,
        }


def analyze(bs: Sequence[float], avals: Sequence[float], errors: Optional[Sequence[float]] = None,
            residuals: Optional[Sequence[float]] = None) -> SmoothnessReport:
    """Classify a sampled curve a(b).

    ``errors`` are absolute uncertainties of the a values (default: float
    rounding).  The estimate is the largest order that is bounded while the
    next one grows; if all four orders are bounded it is capped at 4.
    Raises InconclusiveReport, carrying the report, when neither applies.
    """
    xs = np.asarray(bs, dtype=float)
    ys = np.asarray(avals, dtype=float)
    if errors is None:
        errs = np.finfo(float).eps * np.maximum(np.abs(ys), 1e-300)
    else:
        errs = np.asarray(errors, dtype=float)
    summaries = {k: _summarize(xs, ys, errs, k) for k in range(1, MAX_ORDER + 1)}
    candidates = [k for k in range(1, MAX_ORDER)
                  if summaries[k].bounded and summaries[k + 1].growing]
    if candidates:
        k_est = max(candidates)
    elif all(s.bounded for s in summaries.values()):
        k_est = MAX_ORDER
    else:
        k_est = None
    report = SmoothnessReport(
        b_samples=tuple(float(v) for v in xs), a_values=tuple(float(v) for v in ys),
        residuals=tuple(float(v) for v in (residuals if residuals is not None else errs)),
        divided_diffs={k: s.values for k, s in summaries.items()},
        estimated_k=k_est,
        growth_exponents={k: s.growth_exponent for k, s in summaries.items()},
        bounded={k: s.bounded for k, s in summaries.items()},
        growing={k: s.growing for k, s in summaries.items()},
        noise_floors={k: s.noise for k, s in summaries.items()},
    )
    if k_est is None:
        err = InconclusiveReport("no order is bounded with a growing successor")
        err.report = report
        raise err
    return report


def dyadic_b(j_max: int, j_min: int = J_MIN) -> np.ndarray:
    return np.array([1.0 - 2.0 ** -j for j in range(j_min, j_max + 1)])


def _sample(args):
    cf, b, tol, q_cap = args
    # the tiny bisection tolerance drives the bracket down to adjacent floats
    pt = tongue_sample(cf, b, tol=1e-300, q_cap=q_cap)
    if pt.residual > tol:
        raise BracketFailure(f"b = {b}: certified residual {pt.residual:.2e} exceeds tol {tol:.2e}",
                             b=b, residual=pt.residual, tol=tol)
    return pt


def probe(alpha: AlphaSpec, j_max: int = 14, tol: float = 1e-10, q_cap: int = PROBE_QCAP,
          workers: int = 1) -> SmoothnessReport:
    """Sample a*(1 - 2^-j), j = 3..j_max, and classify the divided differences."""
    cf: ContinuedFraction = as_continued_fraction(alpha)
    if not cf.is_periodic:
        raise ValueError("the probe needs a bounded-type alpha given by a periodic continued fraction")
    if not J_MIN + 2 * MAX_ORDER <= j_max <= J_MAX_CAP:
        raise ValueError(f"j_max must lie in [{J_MIN + 2 * MAX_ORDER}, {J_MAX_CAP}]")
    bs = dyadic_b(j_max)
    jobs = [(cf, float(b), tol, q_cap) for b in bs]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            points = list(pool.map(_sample, jobs))
    else:
        points = [_sample(job) for job in jobs]
    avals = [p.a for p in points]
    eps = np.finfo(float).eps
    errors = [0.5 * (p.a_hi - p.a_lo) + eps * abs(p.a) for p in points]
    return analyze(bs, avals, errors, residuals=[p.residual for p in points])


def synthetic_curve(s: float, j_max: int = 14) -> tuple:
    """(b, a) with a(b) = b / 2 pi + (1 - b)^s on the dyadic grid."""
    bs = dyadic_b(j_max)
    return bs, bs / (2.0 * math.pi) + (1.0 - bs) ** s
