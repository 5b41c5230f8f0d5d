"""Arnold tongues of the family ``x + a - (b / 2 pi) sin 2 pi x``.

Irrational tongues are followed as graphs ``a*(b)`` by bisection in ``a``;
rational tongues are bounded by the two saddle-node parameters where a
``p/q`` periodic orbit has multiplier one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

from . import _kernels
from .cf_arith import ContinuedFraction, convergents_up_to, from_float, parse_alpha
from .circle_maps import TWO_PI, arnold
from .errors import BracketFailure, DegenerateTip, NewtonDivergence
from .rotation import RotationResult, rot_bracket, rot_compare, zero_band

AlphaSpec = Union[str, float, ContinuedFraction]

DEFAULT_TONGUE_QCAP = 10 ** 4
MAX_TONGUE_QCAP = 10 ** 6
SEED_GRID = 64
STAIRCASE_QCAP = 200


def as_continued_fraction(alpha: AlphaSpec) -> ContinuedFraction:
    if isinstance(alpha, ContinuedFraction):
        return alpha
    if isinstance(alpha, str):
        return parse_alpha(alpha)
    return from_float(float(alpha))


def _q_cap_for(tol: float) -> int:
    # the a-resolution of a convergent test at denominator q is roughly 1/q^2
    want = int(10.0 / math.sqrt(tol)) if tol > 0 else MAX_TONGUE_QCAP
    return int(min(MAX_TONGUE_QCAP, max(DEFAULT_TONGUE_QCAP, want)))


@dataclass(frozen=True)
class TonguePoint:
    b: float
    a: float
    residual: float
    a_lo: float
    a_hi: float
    rot_lo: Fraction
    rot_hi: Fraction


def _convergent_table(cf: ContinuedFraction, q_cap: int):
    conv = convergents_up_to(cf, q_cap)
    qs = np.array(conv.q, dtype=np.int64)
    ps = np.array(conv.p, dtype=np.float64)
    below = np.array([k % 2 == 0 for k in range(qs.size)])
    return conv, qs, ps, below


def _certified_bracket(f, conv, qs, ps):
    """Closed rot bracket from the signs of F^{q_k}(0) - p_k."""
    c0, r, s = f._arrays
    vals = _kernels.convergent_values(c0, r, s, qs, ps)
    lo, hi = Fraction(0), Fraction(1)
    for k, v in enumerate(vals):
        frac = Fraction(conv.p[k], conv.q[k])
        if v >= 0 and frac > lo:
            lo = frac
        if v <= 0 and frac < hi:
            hi = frac
    return lo, hi


def tongue_sample(alpha: AlphaSpec, b: float, tol: float = 1e-10,
                  q_cap: Optional[int] = None) -> TonguePoint:
    """Bisection for a*(b) with the certified bracket of the returned point."""
    cf = as_continued_fraction(alpha)
    if not 0.0 <= b <= 1.0:
        raise ValueError("b must lie in [0, 1]")
    if tol <= 0:
        raise ValueError("tol must be positive")
    value = cf.value()
    q_cap = q_cap or _q_cap_for(tol)
    conv, qs, ps, below = _convergent_table(cf, q_cap)
    r, s = arnold(0.0, b)._arrays[1:]
    lo, hi = 0.0, 1.0
    if not (rot_compare(arnold(lo, b), 0, 1) <= 0 < value < 1 <= rot_compare(arnold(hi, b), 1, 1) + 1):
        raise BracketFailure("[0, 1] does not straddle alpha", alpha=value, b=b)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break  # lo and hi are adjacent floats
        side, _ = _kernels.convergent_side(mid, r, s, qs, ps, below)
        if side > 0:
            hi = mid
        elif side < 0:
            lo = mid
        else:
            break
    a = 0.5 * (lo + hi)
    rot_lo, rot_hi = _certified_bracket(arnold(a, b), conv, qs, ps)
    return TonguePoint(b, a, float(rot_hi - rot_lo), lo, hi, rot_lo, rot_hi)


def tongue_point(alpha: AlphaSpec, b: float, tol: float = 1e-10,
                 q_cap: Optional[int] = None) -> float:
    """a with |a - a*(b)| <= tol, where rot(f_{a*, b}) = alpha."""
    return tongue_sample(alpha, b, tol, q_cap).a


@dataclass(frozen=True)
class TongueCurve:
    alpha: ContinuedFraction
    samples: list = field(default_factory=list)  # (b, a, residual)

    def __post_init__(self):
        bs = [row[0] for row in self.samples]
        if any(b1 <= b0 for b0, b1 in zip(bs, bs[1:])):
            raise ValueError("b values must be strictly increasing")


def tongue_curve(alpha: AlphaSpec, b_grid: Iterable[float], tol: float = 1e-10) -> TongueCurve:
    cf = as_continued_fraction(alpha)
    rows = []
    for b in sorted(float(v) for v in b_grid):
        pt = tongue_sample(cf, b, tol)
        rows.append((b, pt.a, pt.residual))
    return TongueCurve(cf, rows)


# ---------------------------------------------------------------- rational

def _newton_unit_multiplier(xs, avals, p, q, r, s, iters=60):
    """Damped Newton on F_a^q(x) - x - p = 0, (F_a^q)'(x) - 1 = 0 for all seeds."""
    x = xs.copy()
    a = avals.copy()
    for _ in range(iters):
        disp, jx, ja, jxx, jxa = _kernels.boundary_jets_family(x, a, q, r, s)
        g1 = disp - p
        g2 = jx - 1.0
        det = g2 * jxa - ja * jxx
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            # (dx, da) solves [[jx - 1, ja], [jxx, jxa]] (dx, da) = (g1, g2)
            dx = (g1 * jxa - ja * g2) / det
            da = (g2 * g2 - g1 * jxx) / det
            ok = np.isfinite(dx) & np.isfinite(da)
            dx = np.where(ok, dx, 0.0)
            da = np.where(ok, da, 0.0)
            step = np.maximum(np.abs(dx), np.abs(da))
            damp = np.where(step > 0.05, 0.05 / np.where(step > 0, step, 1.0), 1.0)
        x = x - damp * dx
        a = a - damp * da
    disp, jx, *_ = _kernels.boundary_jets_family(x, a, q, r, s)
    return x, a, disp - p, jx - 1.0


def rational_boundary(p: int, q: int, b: float, residual_tol: float = 1e-10):
    """(a_left, a_right): ends of the parameter plateau where rot = p/q."""
    if q < 1 or math.gcd(p, q) != 1:
        raise ValueError("need q >= 1 and gcd(p, q) = 1")
    if not 0.0 < b <= 1.0:
        raise ValueError("b must lie in (0, 1]")
    r, s = arnold(0.0, b)._arrays[1:]
    center = p / q
    half = b / TWO_PI
    gx, ga = np.meshgrid(np.arange(SEED_GRID) / SEED_GRID,
                         np.linspace(center - half, center + half, SEED_GRID))
    x, a, res1, res2 = _newton_unit_multiplier(gx.ravel(), ga.ravel(), float(p), q, r, s)
    good = (np.abs(res1) <= residual_tol) & (np.abs(res2) <= residual_tol) & \
        (np.abs(a - center) <= half + 1e-9)
    if not np.any(good):
        raise NewtonDivergence("no seed converged to a unit-multiplier orbit", p=p, q=q, b=b)
    a_left, a_right = float(a[good].min()), float(a[good].max())
    if a_right - a_left < 1e-13:
        raise DegenerateTip("plateau narrower than 1e-13", p=p, q=q, b=b, width=a_right - a_left)
    mid = 0.5 * (a_left + a_right)
    if rot_compare(arnold(mid, b), p, q) != 0:
        raise NewtonDivergence("midpoint of the computed plateau is not on it", p=p, q=q, b=b)
    return a_left, a_right


# ---------------------------------------------------------------- staircase

def staircase(b: float, a_grid: Iterable[float], q_cap: int = STAIRCASE_QCAP):
    """[(a, RotationResult)] along the devil's staircase at fixed b."""
    out = []
    for a in a_grid:
        out.append((float(a), rot_bracket(arnold(float(a), b), q_cap=q_cap)))
    return out


# ---------------------------------------------------------------- parabolic orbits

@dataclass(frozen=True)
class ParabolicOrbit:
    """A p/q orbit of multiplier one for the translate F + shift."""
    p: int
    q: int
    x0: float
    shift: float
    fixed_residual: float
    multiplier_residual: float


def parabolic_orbit(f, p: int, q: int, grid: int = 8192, max_iter: int = 200) -> ParabolicOrbit:
    """Nearest translate F + t sitting on an edge of the p/q plateau.

    The edge on the side of rot(F) is chosen: if F^q(x) - x - p < 0 everywhere
    the translate is pushed up until the maximum touches zero, and vice versa.
    """
    c0, r, s = f._arrays
    xs = np.arange(grid) / grid
    disp = _kernels.displacements(xs, q, p, c0, r, s)
    if disp.min() <= 0.0 <= disp.max():
        raise ValueError(f"F already has a {p}/{q} periodic orbit")
    sign = 1.0 if disp.max() < 0 else -1.0
    x = float(xs[int(np.argmax(sign * disp))])
    t = 0.0
    band = zero_band(q)
    one = np.empty(1)
    g1 = g2 = math.inf
    for _ in range(max_iter):
        one[0] = x
        d, jx, ja, jxx, jxa = _kernels.boundary_jets(one, q, c0 + t, r, s)
        g1, g2 = float(d[0]) - p, float(jx[0]) - 1.0
        if abs(g1) <= band and abs(g2) <= 1e-9:
            break
        det = g2 * jxa[0] - ja[0] * jxx[0]
        if det == 0.0 or not math.isfinite(det):
            break
        dx = (g1 * jxa[0] - ja[0] * g2) / det
        dt = (g2 * g2 - g1 * jxx[0]) / det
        step = max(abs(dx), abs(dt))
        damp = min(1.0, 1e-3 / step) if step > 0 else 1.0
        x -= damp * dx
        t -= damp * dt
        if step < 1e-16:
            break
    if not (abs(g1) <= 1e3 * band and abs(g2) <= 1e-6):
        raise NewtonDivergence("no multiplier-one orbit found", p=p, q=q,
                               fixed_residual=g1, multiplier_residual=g2)
    return ParabolicOrbit(p, q, float(x % 1.0), float(t), g1, g2)
