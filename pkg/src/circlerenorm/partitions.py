"""Closest returns of the critical orbit and the dynamical partitions P_n.

Indexing follows the convergents: ``q_0 = 1`` with ``p_0 = floor F(0)``, so
that ``I_n`` is the arc between 0 and ``F^{q_n}(0) - p_n``, and for the
rotation by alpha ``|I_n| = |q_n alpha - p_n|``.  P_n consists of the
``q_{n+1}`` long arcs ``f^l(I_n)`` and the ``q_n`` short arcs ``f^l(I_{n+1})``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from . import _kernels
from .circle_maps import CircleMapLift
from .errors import CoverFailure, PeriodicOrbit

COVER_TOL = 1e-9
OVERLAP_TOL = 1e-12
PERIODIC_TOL = 1e-13
MAX_Q = 10 ** 5


@dataclass(frozen=True)
class ClosestReturn:
    q: int
    p: int
    displacement: float  # F^q(0) - p, alternating in sign


def closest_returns(f: CircleMapLift, max_q: int = MAX_Q) -> List[ClosestReturn]:
    """q_0 = 1, q_1, q_2, ... <= max_q read off the orbit of 0.

    One-sided records (new closest approaches to 0 from the right, or from
    the left) come in runs on alternating sides; the last record of each run
    is a closest return.  A run is only accepted once the next run starts, so
    the orbit is followed past max_q (in chunks) until that happens.
    """
    f.require_monotone()
    c0, r, s = f._arrays
    hard_cap = 20 * max_q + 100
    w1, y1 = _kernels.iterate(0.0, 1, c0, r, s)
    if y1 < PERIODIC_TOL or 1.0 - y1 < PERIODIC_TOL:
        raise PeriodicOrbit(1)
    runs = [["R", 1, int(w1), y1], ["L", 1, int(w1) + 1, y1 - 1.0]]
    best_right, best_left = y1, 1.0 - y1
    start_k, start_w, start_y = 1, w1, y1
    chunk = max(2 * max_q, 1024)
    while start_k < hard_cap:
        n = min(chunk, hard_cap - start_k)
        whole, frac = _kernels.orbit(start_y, n, c0, r, s)
        whole, frac = whole[1:] + start_w, frac[1:]
        ks = np.arange(start_k + 1, start_k + n + 1)
        near = np.flatnonzero((frac < PERIODIC_TOL) | (1.0 - frac < PERIODIC_TOL))
        if near.size:
            raise PeriodicOrbit(int(ks[near[0]]))
        right = np.minimum.accumulate(np.concatenate([[best_right], frac]))[:-1]
        left = np.minimum.accumulate(np.concatenate([[best_left], 1.0 - frac]))[:-1]
        idx = np.flatnonzero((frac < right) | (1.0 - frac < left))
        for i in idx:
            k, y, wk = int(ks[i]), float(frac[i]), int(whole[i])
            if y < best_right:
                best_right = y
                rec = ["R", k, wk, y]
            else:
                best_left = 1.0 - y
                rec = ["L", k, wk + 1, y - 1.0]
            if runs[-1][0] == rec[0]:
                runs[-1] = rec
            elif k > max_q:
                return [ClosestReturn(q, p, d) for _, q, p, d in runs if q <= max_q]
            else:
                runs.append(rec)
        start_k += n
        start_w, start_y = float(whole[-1]), float(frac[-1])
    # the final run never closed
    return [ClosestReturn(q, p, d) for _, q, p, d in runs[:-1] if q <= max_q]


@dataclass(frozen=True)
class PartitionInterval:
    label: str  # "long" for f^l(I_n), "short" for f^l(I_{n+1})
    l: int
    left: float
    right: float
    length: float


@dataclass(frozen=True)
class DynamicalPartition:
    level: int
    q_n: int
    q_next: int
    intervals: tuple
    M_n: float
    J_n: float
    J_index: int

    @property
    def n_long(self) -> int:
        return sum(1 for iv in self.intervals if iv.label == "long")

    @property
    def n_short(self) -> int:
        return sum(1 for iv in self.intervals if iv.label == "short")

    def lengths(self) -> np.ndarray:
        return np.array([iv.length for iv in self.intervals])


def _arcs(whole, frac, start: int, q: int, p: int, count: int, label: str):
    """Arcs between F^l(0) and F^{l+q}(0) - p for l < count."""
    out = []
    for l in range(count):
        # difference in integer/fraction form keeps tiny arcs accurate
        d = (whole[l + q] - whole[l] - p) + (frac[l + q] - frac[l])
        a = frac[l]
        left, right = (a, a + d) if d > 0 else (a + d, a)
        shift = math.floor(left)
        out.append(PartitionInterval(label, l, left - shift, right - shift, abs(d)))
    return out


def _check_cover(intervals) -> None:
    ivs = sorted(intervals, key=lambda iv: iv.left)
    total = sum(iv.length for iv in ivs)
    if abs(total - 1.0) > COVER_TOL:
        raise CoverFailure(f"total length {total!r} differs from 1", total=total)
    for a, b in zip(ivs, ivs[1:] + [ivs[0]]):
        nxt = b.left if b is not ivs[0] else b.left + 1.0
        gap = nxt - a.right
        if gap > COVER_TOL or gap < -max(OVERLAP_TOL, COVER_TOL):
            raise CoverFailure(f"{'gap' if gap > 0 else 'overlap'} of {abs(gap):.3e} at {a.right:.12f}",
                               location=a.right, size=gap)


def build_partition(f: CircleMapLift, n: int, returns: Optional[list] = None) -> DynamicalPartition:
    """The dynamical partition P_n, checked to cover the circle."""
    if n < 0:
        raise ValueError("level must be nonnegative")
    if returns is None or len(returns) < n + 2:
        returns = _returns_through(f, n + 1)
    rn, rn1 = returns[n], returns[n + 1]
    qn, qn1 = rn.q, rn1.q
    c0, r, s = f._arrays
    whole, frac = _kernels.orbit(0.0, qn + qn1, c0, r, s)
    longs = _arcs(whole, frac, 0, qn, rn.p, qn1, "long")
    shorts = _arcs(whole, frac, 0, qn1, rn1.p, qn, "short")
    intervals = longs + shorts
    _check_cover(intervals)
    candidates = [iv for iv in longs if 0 < iv.l < qn1]
    if candidates:
        j = min(candidates, key=lambda iv: iv.length)
        J_n, J_index = j.length, j.l
    else:
        J_n, J_index = longs[0].length, 0
    ordered = tuple(sorted(intervals, key=lambda iv: iv.left))
    return DynamicalPartition(n, qn, qn1, ordered, abs(rn.displacement), J_n, J_index)


def _returns_through(f: CircleMapLift, n: int) -> list:
    """Closest returns q_0..q_n, growing the search window as needed."""
    cap = 64
    while True:
        rets = closest_returns(f, cap)
        if len(rets) > n:
            return rets
        if cap > MAX_Q:
            raise CoverFailure(f"level {n} needs return times beyond {MAX_Q}", level=n)
        cap *= 4


@dataclass(frozen=True)
class PartitionStats:
    max_adjacent_ratio: float
    max_len: float
    shortest_long: tuple  # (l, |J_n|)
    cube_ratio: float


def partition_stats(partition: DynamicalPartition, f: CircleMapLift) -> PartitionStats:
    lengths = partition.lengths()
    nxt = np.roll(lengths, -1)
    ratios = np.maximum(lengths / nxt, nxt / lengths)
    c0, r, s = f._arrays
    # f(I_n) is the arc between F(0) and F^{q_n + 1}(0) - p_n
    w1, y1 = _kernels.iterate(0.0, 1, c0, r, s)
    w2, y2 = _kernels.iterate(0.0, partition.q_n + 1, c0, r, s)
    p_n = _returns_through(f, partition.level)[partition.level].p
    f_In = abs((w2 - w1 - p_n) + (y2 - y1))
    return PartitionStats(float(ratios.max()), float(lengths.max()),
                          (partition.J_index, partition.J_n), f_In / partition.M_n ** 3)


def distortion(f: CircleMapLift, partition: DynamicalPartition) -> float:
    """max over 0 < i < q_{n+1} of the derivative spread of f^{q_{n+1}-i} on f^i(I_n).

    The spread is max/min of the derivative at the two endpoints and the
    midpoint of the arc.
    """
    c0, r, s = f._arrays
    worst = 1.0
    q1 = partition.q_next
    for iv in partition.intervals:
        if iv.label != "long" or iv.l == 0:
            continue
        m = q1 - iv.l
        ds = [abs(_kernels.iterate_with_derivative(x, m, c0, r, s)[2])
              for x in (iv.left, 0.5 * (iv.left + iv.right), iv.right)]
        if min(ds) == 0.0:
            return math.inf
        worst = max(worst, max(ds) / min(ds))
    return worst
