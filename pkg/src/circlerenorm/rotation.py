"""Rotation numbers of monotone lifts.

The comparison oracle rests on one fact about degree-one monotone lifts:
``rot(F) > p/q`` iff ``F^q(x) - x - p > 0`` for every x, ``rot(F) < p/q`` iff
it is negative everywhere, and ``rot(F) = p/q`` otherwise.  A single orbit
already gives the non-strict versions, which is enough to steer a Farey
(Stern-Brocot) search; the full oracle is reserved for detecting exact
rational rotation numbers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .cf_arith import rational_digits
from .circle_maps import CircleMapLift
from .errors import RationalRotation

GRID_POINTS = 512
REFINE_WIDTH = 1e-12
DEFAULT_QCAP = 10 ** 5
RUN_CHECK = 8


def zero_band(q: int) -> float:
    """Values of F^q(x) - x - p inside this band count as zero (round-off)."""
    return max(1e-12, 64.0 * q * np.finfo(float).eps)


@dataclass(frozen=True)
class RotationResult:
    estimate: float
    lower: Fraction
    upper: Fraction
    digits: tuple
    exact: bool = False

    @property
    def width(self) -> float:
        return float(self.upper - self.lower)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return float(self.lower) - slack <= x <= float(self.upper) + slack


def _displacements(f, xs: np.ndarray, q: int, p: int) -> np.ndarray:
    """F^q(x) - x - p, compiled for trig lifts and by plain iteration otherwise."""
    if hasattr(f, "_arrays"):
        c0, r, s = f._arrays
        return _kernels.displacements(xs, q, p, c0, r, s)
    y = np.array(xs, dtype=float)
    shift = np.zeros_like(y)
    for _ in range(q):
        # keep the iterate in [0, 1) and carry the integer part separately
        y = f(y)
        k = np.floor(y)
        shift += k
        y -= k
    return (shift - p) + (y - xs)


def rot_birkhoff(f, n_iter: int) -> float:
    """(F^n(0) - 0) / n."""
    f.require_monotone()
    v = _displacements(f, np.zeros(1), int(n_iter), 0)
    return float(v[0]) / n_iter


def _refine(f: CircleMapLift, q: int, p: int, x: float, h: float, sign: float) -> float:
    """Zoom in on a local extremum of sign * (F^q(x) - x - p) near x."""
    best_x, best_v = x, None
    while h > REFINE_WIDTH:
        xs = np.linspace(best_x - h, best_x + h, 33)
        v = sign * _displacements(f, xs, q, p)
        i = int(np.argmax(v))
        best_x, best_v = float(xs[i]), float(v[i])
        h *= 2.0 / 32.0
    return sign * best_v


def displacement_range(f: CircleMapLift, p: int, q: int, refine: bool = True):
    """(min, max) of F^q(x) - x - p over the circle."""
    xs = np.arange(GRID_POINTS) / GRID_POINTS
    v = _displacements(f, xs, q, p)
    lo, hi = float(v.min()), float(v.max())
    band = zero_band(q)
    h = 1.0 / GRID_POINTS
    # refinement can only push min down / max up, so it matters only
    # when the grid has not already straddled zero
    if refine and lo > band:
        lo = min(lo, _refine(f, q, p, float(xs[int(np.argmin(v))]), h, -1.0))
    if refine and hi < -band:
        hi = max(hi, _refine(f, q, p, float(xs[int(np.argmax(v))]), h, 1.0))
    return lo, hi


def rot_compare(f: CircleMapLift, p: int, q: int) -> int:
    """Sign of rot(F) - p/q: +1, -1, or 0 when F has a p/q-periodic orbit."""
    if q < 1:
        raise ValueError("q must be positive")
    f.require_monotone()
    lo, hi = displacement_range(f, p, q)
    band = zero_band(q)
    if lo > band:
        return 1
    if hi < -band:
        return -1
    return 0


def rot_ge(f: CircleMapLift, p: int, q: int) -> bool:
    """True iff max_x (F^q(x) - x - p) >= 0, i.e. rot(F) >= p/q."""
    return rot_compare(f, p, q) >= 0


def _integer_part(f: CircleMapLift):
    """(n, exact): n <= rot < n + 1, or rot == n exactly."""
    n = math.floor(float(f(0.0)))
    while True:
        c = rot_compare(f, n, 1)
        if c == 0:
            return n, True
        if c < 0:
            n -= 1
            continue
        c1 = rot_compare(f, n + 1, 1)
        if c1 == 0:
            return n + 1, True
        if c1 > 0:
            n += 1
            continue
        return n, False


def _digits_from_moves(moves: list, complete_only: bool = True) -> list:
    """CF digits of the fractional part from Stern-Brocot moves in [0/1, 1/1].

    The start bracket already embodies one 'left' move, so the first run is
    credited with one extra step.  Only runs terminated by a direction change
    are complete digits.
    """
    runs = []
    current, count = "L", 1
    for m in moves:
        if m == current:
            count += 1
        else:
            runs.append(count)
            current, count = m, 1
    if not complete_only:
        runs.append(count)
    return runs


def _gap_sign(f: CircleMapLift, p: int, q: int) -> int:
    """One-orbit test: F^q(0) >= p certifies rot >= p/q and <= certifies <=.

    Falls back to the full comparison when the orbit of 0 is (nearly)
    periodic, so a returned 0 always means rot == p/q.
    """
    v = float(_displacements(f, np.zeros(1), q, p)[0])
    if abs(v) <= zero_band(q):
        return rot_compare(f, p, q)
    return 1 if v > 0 else -1


def farey_search(f: CircleMapLift, depth: Optional[int] = None, q_cap: int = DEFAULT_QCAP,
                 n_birkhoff: Optional[int] = None) -> RotationResult:
    """Certified Farey bracket of rot(F); exact rational results are flagged.

    Each mediant is steered by the orbit of 0 alone, which certifies a closed
    bracket.  An exact rational rotation number shows up as a long run of
    identical moves against a fixed endpoint; that endpoint is then tested
    with the full oracle at run lengths 8, 16, 32, ... and at termination.
    """
    f.require_monotone()
    n0, exact = _integer_part(f)
    if exact:
        return RotationResult(float(n0), Fraction(n0), Fraction(n0), (), True)
    lp, lq, up, uq = 0, 1, 1, 1
    moves = []
    run, next_check = 0, RUN_CHECK

    def exact_result(mp, mq):
        val = Fraction(n0 * mq + mp, mq)
        return RotationResult(float(val), val, val, tuple(rational_cf(mp, mq)), True)

    def fixed_endpoint():
        # the endpoint that stayed put during the current run
        return (up, uq) if moves[-1] == "R" else (lp, lq)

    while True:
        mp, mq = lp + up, lq + uq
        if mq > q_cap:
            break
        c = _gap_sign(f, n0 * mq + mp, mq)
        if c == 0:
            return exact_result(mp, mq)
        move = "R" if c > 0 else "L"
        if c > 0:
            lp, lq = mp, mq
        else:
            up, uq = mp, mq
        if moves and moves[-1] == move:
            run += 1
        else:
            run, next_check = 1, RUN_CHECK
        moves.append(move)
        if run == next_check:
            next_check *= 2
            ep, eq = fixed_endpoint()
            if 0 < ep < eq and rot_compare(f, n0 * eq + ep, eq) == 0:
                return exact_result(ep, eq)
        if depth is not None and len(_digits_from_moves(moves)) >= depth:
            break
    if moves and run >= 2:
        ep, eq = fixed_endpoint()
        if 0 < ep < eq and rot_compare(f, n0 * eq + ep, eq) == 0:
            return exact_result(ep, eq)
    lower = Fraction(n0 * lq + lp, lq)
    upper = Fraction(n0 * uq + up, uq)
    digits = _digits_from_moves(moves)
    if depth is not None:
        digits = digits[:depth]
    n = n_birkhoff or max(uq, lq, 1000)
    est = min(max(rot_birkhoff(f, n), float(lower)), float(upper))
    return RotationResult(est, lower, upper, tuple(digits), False)


def rational_cf(p: int, q: int) -> list:
    return rational_digits(p, q) if p else []


def rot_digits(f: CircleMapLift, depth: int = 30, q_cap: int = DEFAULT_QCAP) -> RotationResult:
    """CF digits of rot(F) with a certified bracket; raises on rational plateaus."""
    res = farey_search(f, depth=depth, q_cap=q_cap)
    if res.exact:
        raise RationalRotation(res.lower.numerator, res.lower.denominator)
    return res


def rot_bracket(f: CircleMapLift, q_cap: int = DEFAULT_QCAP) -> RotationResult:
    """Like rot_digits but returns exact rationals as a zero-width bracket."""
    return farey_search(f, depth=None, q_cap=q_cap)
