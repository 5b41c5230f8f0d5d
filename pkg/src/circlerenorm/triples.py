"""Real triples (F, H_a, G) factoring a circle map near the critical locus.

A circle map f is written as ``f = h^{-1} o F o pi o H_a o G o h`` where F and
h are translations, ``H_a(z) = z^3 - a z`` is the cubic model and G is a
real-analytic map of the window [-1/2, 1/2] with G(0) = 0, G'(0) = 1.

Normalizing G'(0) = 1 makes ``H_a o G`` commute with the translation by some
T > 0 rather than by 1, so the uniformizing map pi of the real commuting case
is the linear rescaling ``z -> z / T``; it is the identity exactly when T = 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .circle_maps import CircleMapLift, CubicCritical, classify, inverse
from .errors import (BranchAmbiguity, CommutationFailure, ExtraPreimage, NotCritical,
                     RootFindingFailure)

N_NODES = 129
COMMUTE_TOL = 1e-8
NORMALIZE_TOL = 1e-10
SCAN_POINTS = 4096


def h_map(a: float, z, order: int = 0):
    """H_a(z) = z^3 - a z and its first two derivatives."""
    z = np.asarray(z)
    if order == 0:
        out = z ** 3 - a * z
    elif order == 1:
        out = 3.0 * z ** 2 - a
    elif order == 2:
        out = 6.0 * z
    else:
        raise ValueError("order must be 0, 1 or 2")
    return out[()] if np.ndim(out) == 0 else out


def h_inverse(a: float, v):
    """Real solution w of H_a(w) = v for a <= 0, where H_a is increasing."""
    if a > 0:
        raise ValueError("H_a is only invertible on the real line for a <= 0")
    v = np.asarray(v, dtype=float)
    if a == 0.0:
        w = np.cbrt(v)
    else:
        p = -a
        k = 2.0 * math.sqrt(p / 3.0)
        # for |a| negligible against v the linear term vanishes in round-off
        with np.errstate(over="ignore", invalid="ignore"):
            arg = 1.5 * v * math.sqrt(3.0 / p) / p
            w = np.where(np.isfinite(arg), k * np.sinh(np.arcsinh(arg) / 3.0), np.cbrt(v))
    # one Newton polish removes the round-off of the closed form
    d = 3.0 * w ** 2 - a
    with np.errstate(divide="ignore", invalid="ignore"):
        step = np.where(d > 0, (w ** 3 - a * w - v) / d, 0.0)
    w = w - step
    return w[()] if w.ndim == 0 else w


def chebyshev_nodes(n: int = N_NODES) -> np.ndarray:
    """Chebyshev extreme points on [-1/2, 1/2], increasing."""
    return 0.5 * np.cos(np.pi * np.arange(n - 1, -1, -1) / (n - 1))


@dataclass(frozen=True)
class TripleReal:
    """A real triple with F(z) = z + f_shift and h(z) = z + h_shift.

    ``g_nodes`` are samples of G at :func:`chebyshev_nodes`; ``period`` is the
    translation T commuting with H_a o G.
    """
    f_shift: float
    a: float
    g_nodes: tuple
    h_shift: float
    period: float = 1.0

    def __post_init__(self):
        vals = tuple(float(v) for v in self.g_nodes)
        object.__setattr__(self, "g_nodes", vals)
        for name in ("f_shift", "a", "h_shift", "period"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.period <= 0:
            raise ValueError("period must be positive")

    @cached_property
    def _interp(self) -> BarycentricInterpolator:
        return BarycentricInterpolator(chebyshev_nodes(len(self.g_nodes)), np.array(self.g_nodes))

    def g(self, z, order: int = 0):
        z = np.asarray(z, dtype=float)
        out = self._interp(z) if order == 0 else self._interp.derivative(z, order)
        return out[()] if np.ndim(out) == 0 else out

    def cubic_part(self, z, order: int = 0):
        """(H_a o G)(z) or its first derivative on the window."""
        w = self.g(z)
        if order == 0:
            return h_map(self.a, w)
        if order == 1:
            return h_map(self.a, w, 1) * self.g(z, 1)
        raise ValueError("order must be 0 or 1")

    def normalization_error(self) -> float:
        return max(abs(float(self.g(0.0))), abs(float(self.g(0.0, 1)) - 1.0))

    def to_dict(self) -> dict:
        return {"f_shift": self.f_shift, "a": self.a, "h_shift": self.h_shift,
                "period": self.period, "g_nodes": list(self.g_nodes)}


def commutation_defect(triple: TripleReal) -> float:
    """How far H_a o G on the window is from commuting with z -> z + T.

    Compares H_a o G (z) - T z and its derivative at the two window ends,
    which is what a T-periodic continuation across z = +-1/2 requires.
    """
    ends = np.array([-0.5, 0.5])
    v = triple.cubic_part(ends) - triple.period * ends
    dv = triple.cubic_part(ends, 1)
    return float(max(abs(v[1] - v[0]), abs(dv[1] - dv[0])))


@dataclass(frozen=True)
class ProjectedMap:
    """The circle map F o pi o H_a o G, continued to R by lift periodicity."""
    triple: TripleReal

    def eval(self, x, order: int = 0):
        if order not in (0, 1):
            raise ValueError("ProjectedMap supports orders 0 and 1")
        x = np.asarray(x, dtype=float)
        k = np.floor(x + 0.5)
        z = x - k
        t = self.triple
        if order == 1:
            out = t.cubic_part(z, 1) / t.period
        else:
            out = t.cubic_part(z) / t.period + t.f_shift + k
        return out[()] if np.ndim(out) == 0 else out

    def __call__(self, x):
        return self.eval(x)

    def conjugated(self, x):
        """h o p o h^{-1}, which should reproduce the original map."""
        s = self.triple.h_shift
        return self.eval(np.asarray(x, dtype=float) - s) + s


def project(triple: TripleReal, tol: float = COMMUTE_TOL) -> ProjectedMap:
    defect = commutation_defect(triple)
    if not defect <= tol:
        raise CommutationFailure(defect)
    return ProjectedMap(triple)


def _difference_from(f: CircleMapLift, s: float, z: np.ndarray) -> np.ndarray:
    """f(z + s) - f(s) with the cos(.) - cos(.) terms written without cancellation."""
    out = z.copy()
    for k, (rk, sk) in enumerate(zip(f.cos_coeffs, f.sin_coeffs), start=1):
        if rk == 0.0 and sk == 0.0:
            continue
        w = math.pi * k
        half = 2.0 * np.sin(w * z)
        mid = w * (z + 2.0 * s)
        # cos A - cos B = -2 sin((A+B)/2) sin((A-B)/2), likewise for sin
        out = out - rk * half * np.sin(mid) + sk * half * np.cos(mid)
    return out


def _sign_scan(f: CircleMapLift, s: float):
    z = np.linspace(-0.5, 0.5, SCAN_POINTS + 1)
    z = z[z != 0.0]
    bad = z[(_difference_from(f, s, z) * z) <= 0.0]
    if bad.size:
        raise ExtraPreimage(f"f(x) = f({s:.6g}) again near x = {float(bad[0]) + s:.6f}",
                            witness=float(bad[0]) + s)


def _build(f: CircleMapLift, a_raw: float, s: float, g_raw_slope: float) -> TripleReal:
    nodes = chebyshev_nodes()
    g_raw = h_inverse(a_raw, _difference_from(f, s, nodes))
    c = 1.0 / g_raw_slope
    triple = TripleReal(f_shift=float(f(s)) - s, a=a_raw * c * c,
                        g_nodes=tuple(c * g_raw), h_shift=s, period=c ** 3)
    err = triple.normalization_error()
    if err > NORMALIZE_TOL:
        raise RootFindingFailure(f"G(0) = 0, G'(0) = 1 violated by {err:.2e}")
    return triple


def lift_critical(f: CircleMapLift) -> TripleReal:
    """Triple (F, H_0, G) of a map with a cubic critical point at 0."""
    try:
        cls = classify(f)
    except Exception as exc:
        raise NotCritical(str(exc)) from exc
    if not isinstance(cls, CubicCritical) or cls.critical_point != 0.0:
        raise NotCritical(f"map class is {type(cls).__name__}, not a cubic critical point at 0")
    _sign_scan(f, 0.0)
    slope = (float(f.eval(0.0, 3)) / 6.0) ** (1.0 / 3.0)
    return _build(f, 0.0, 0.0, slope)


@dataclass(frozen=True)
class CriticalData:
    """Complex critical points and values of a near-critical real map."""
    c1: complex
    c2: complex
    d1: complex
    d2: complex
    A: float


def _newton_critical(f: CircleMapLift, z: complex, max_iter: int = 60) -> complex:
    for _ in range(max_iter):
        d1 = complex(f.eval(z, 1))
        d2 = complex(f.eval(z, 2))
        if d2 == 0:
            break
        step = d1 / d2
        z -= step
        if abs(step) < 1e-15:
            return z
    if abs(complex(f.eval(z, 1))) < 1e-13:
        return z
    raise RootFindingFailure(f"Newton for f'(z) = 0 stalled near z = {z:.6g}")


def critical_data(f: CircleMapLift) -> CriticalData:
    """c_{1,2} with f'(c) = 0 near the real minimum of f', d = f(c), and A.

    A is the real cube root of ((3 sqrt 3 (d1 - d2) / 4))^2, which is
    negative because d1 - d2 is purely imaginary for a real diffeomorphism.
    """
    m, x_min = f.min_derivative
    if m <= 0:
        raise RootFindingFailure("f' has real zeros; the map is not a diffeomorphism")
    curv = float(f.eval(x_min, 3))
    if curv <= 0:
        raise RootFindingFailure("f''' is not positive at the minimum of f'")
    y = math.sqrt(2.0 * m / curv)
    c1 = _newton_critical(f, complex(x_min, y))
    c2 = _newton_critical(f, complex(x_min, -y))
    if abs(c2 - c1.conjugate()) > 1e-10 or abs(c1.imag) < 1e-14:
        raise RootFindingFailure(f"critical points {c1:.6g}, {c2:.6g} are not a conjugate pair")
    d1, d2 = complex(f(c1)), complex(f(c2))
    u = (3.0 * math.sqrt(3.0) * (d1 - d2) / 4.0) ** 2
    if abs(u.imag) > 1e-8:
        raise BranchAmbiguity(f"A^3 has imaginary part {u.imag:.2e}", imag=u.imag)
    return CriticalData(c1, c2, d1, d2, float(np.cbrt(u.real)))


def lift_family(f: CircleMapLift) -> TripleReal:
    """Triple (F, H_A, G) with translations F, h for a near-critical diffeomorphism.

    A cubic-critical map falls back to :func:`lift_critical`.  Otherwise h
    moves the point s with f(s) = Re d_1 to 0, which makes G(0) = 0 and sends
    the critical values of f to those of H_A (up to the scale T).
    """
    cls = classify(f)
    if isinstance(cls, CubicCritical):
        return lift_critical(f)
    f.require_monotone()
    data = critical_data(f)
    if data.A >= 0:
        raise BranchAmbiguity(f"A = {data.A:.3e} is not negative", A=data.A)
    target = data.d1.real
    s = float(inverse(f, target))
    s -= math.floor(s + 0.5)
    _sign_scan(f, s)
    slope = float(f.eval(s, 1)) / (-data.A)
    return _build(f, data.A, s, slope)


def conjugacy_residual(f: CircleMapLift, triple: TripleReal, samples: int = 512) -> float:
    """sup |h o p(triple) o h^{-1} - f| over equispaced points of [0, 1)."""
    xs = np.arange(samples) / samples
    return float(np.max(np.abs(project(triple).conjugated(xs) - f(xs))))
