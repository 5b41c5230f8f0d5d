"""Analytic circle maps represented by trigonometric-polynomial lifts.

A lift is ``F(x) = x + c0 + sum_k (r_k cos 2 pi k x + s_k sin 2 pi k x)``.
The Arnold family is stored in the conjugated normalization
``F(x) = x + a - (b / 2 pi) sin 2 pi x`` so that at ``b = 1`` the cubic
critical point sits at the origin.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Union

import numpy as np

from . import _kernels
from .errors import AmbiguousClass, NonMonotoneMap

TWO_PI = 2.0 * math.pi
MAX_DEGREE = 64


@dataclass(frozen=True)
class CircleMapLift:
    c0: float
    cos_coeffs: tuple = ()
    sin_coeffs: tuple = ()

    def __post_init__(self):
        k = max(len(self.cos_coeffs), len(self.sin_coeffs))
        if k > MAX_DEGREE:
            raise ValueError(f"degree {k} exceeds the cap {MAX_DEGREE}")
        cos_c = tuple(float(v) for v in self.cos_coeffs) + (0.0,) * (k - len(self.cos_coeffs))
        sin_c = tuple(float(v) for v in self.sin_coeffs) + (0.0,) * (k - len(self.sin_coeffs))
        object.__setattr__(self, "c0", float(self.c0))
        object.__setattr__(self, "cos_coeffs", cos_c)
        object.__setattr__(self, "sin_coeffs", sin_c)

    @property
    def degree(self) -> int:
        return len(self.cos_coeffs)

    @cached_property
    def _arrays(self):
        return (self.c0, np.array(self.cos_coeffs, dtype=float),
                np.array(self.sin_coeffs, dtype=float))

    def eval(self, x, order: int = 0):
        """Order-th derivative of the lift at x (order <= 3).

        Works elementwise on arrays, and on complex input.
        """
        if order not in (0, 1, 2, 3):
            raise ValueError("order must be 0..3")
        x = np.asarray(x)
        acc = np.zeros_like(x, dtype=np.result_type(x, float))
        for k, (rk, sk) in enumerate(zip(self.cos_coeffs, self.sin_coeffs), start=1):
            if rk == 0.0 and sk == 0.0:
                continue
            w = TWO_PI * k
            c, s = np.cos(w * x), np.sin(w * x)
            if order == 0:
                acc = acc + rk * c + sk * s
            elif order == 1:
                acc = acc + w * (sk * c - rk * s)
            elif order == 2:
                acc = acc - w * w * (rk * c + sk * s)
            else:
                acc = acc + w ** 3 * (rk * s - sk * c)
        if order == 0:
            acc = acc + x + self.c0
        elif order == 1:
            acc = acc + 1.0
        return acc[()] if acc.ndim == 0 else acc

    def __call__(self, x):
        return self.eval(x, 0)

    def deriv(self, x, order: int = 1):
        return self.eval(x, order)

    def shifted(self, t: float) -> "CircleMapLift":
        """The lift F + t."""
        return CircleMapLift(self.c0 + t, self.cos_coeffs, self.sin_coeffs)

    def to_spec(self) -> dict:
        return {"kind": "trig", "c0": self.c0, "cos": list(self.cos_coeffs),
                "sin": list(self.sin_coeffs)}

    @cached_property
    def min_derivative(self):
        """(min F', argmin) over the circle, grid search plus Newton polish."""
        xs = np.arange(4096) / 4096.0
        d = self.eval(xs, 1)
        i = int(np.argmin(d))
        x = _polish_min(self, float(xs[i]))
        return float(self.eval(x, 1)), x

    @property
    def is_monotone(self) -> bool:
        return self.min_derivative[0] >= -1e-12

    def require_monotone(self):
        if not self.is_monotone:
            m, w = self.min_derivative
            raise NonMonotoneMap(f"F' = {m:.3g} < 0 at x = {w:.6f}", witness=w)


@dataclass(frozen=True)
class ConjugatedRotation:
    """The diffeomorphism h^{-1} o R_alpha o h for a trig-polynomial lift h.

    Exposes the same ``eval(x, order)`` surface (orders 0 and 1) as
    :class:`CircleMapLift`, which is all the measure routines need.
    """
    h: CircleMapLift
    alpha: float

    def __post_init__(self):
        if self.h.min_derivative[0] <= 0:
            raise ValueError("conjugacy must be a diffeomorphism")

    def h_inverse(self, x):
        x = np.asarray(x, dtype=float)
        return inverse(self.h, x)

    def eval(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        y = self.h_inverse(self.h(x) + self.alpha)
        if order == 0:
            return y
        if order == 1:
            return self.h.eval(x, 1) / self.h.eval(y, 1)
        raise ValueError("ConjugatedRotation supports orders 0 and 1")

    def __call__(self, x):
        return self.eval(x, 0)

    @property
    def is_monotone(self) -> bool:
        return True

    def require_monotone(self):
        return None


@dataclass(frozen=True)
class Conjugate:
    """h^{-1} o f o h for a trig lift f and a trig-diffeomorphism h."""
    f: CircleMapLift
    h: CircleMapLift

    def __post_init__(self):
        if self.h.min_derivative[0] <= 0:
            raise ValueError("conjugacy must be a diffeomorphism")

    def eval(self, x, order: int = 0):
        x = np.asarray(x, dtype=float)
        hx = self.h(x)
        y = inverse(self.h, self.f(hx))
        if order == 0:
            return y
        if order == 1:
            return self.f.eval(hx, 1) * self.h.eval(x, 1) / self.h.eval(y, 1)
        raise ValueError("Conjugate supports orders 0 and 1")

    def __call__(self, x):
        return self.eval(x, 0)

    @property
    def is_monotone(self) -> bool:
        return self.f.is_monotone

    def require_monotone(self):
        self.f.require_monotone()


def _polish_min(f: CircleMapLift, x: float) -> float:
    for _ in range(30):
        d2 = float(f.eval(x, 2))
        d3 = float(f.eval(x, 3))
        if d3 <= 0:
            break
        step = d2 / d3
        if abs(step) > 1.0 / 4096:
            break
        x -= step
        if abs(step) < 1e-15:
            break
    return x % 1.0


def inverse(f, x, tol: float = 1e-15):
    """Solve F(y) = x for a monotone lift by safeguarded Newton iteration.

    Vectorised over x; uses the bracket F(y) - y in [lo, hi].
    """
    x = np.asarray(x, dtype=float)
    grid = np.arange(1024) / 1024.0
    disp = f.eval(grid) - grid
    lo_d, hi_d = float(disp.min()) - 1e-3, float(disp.max()) + 1e-3
    lo = x - hi_d
    hi = x - lo_d
    y = x - float(np.mean(disp))
    for _ in range(200):
        val = f.eval(y) - x
        lo = np.where(val < 0, y, lo)
        hi = np.where(val > 0, y, hi)
        d = f.eval(y, 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            y_new = y - val / d
        bad = ~np.isfinite(y_new) | (y_new <= lo) | (y_new >= hi)
        y_new = np.where(bad, 0.5 * (lo + hi), y_new)
        if np.all(np.abs(y_new - y) <= tol * np.maximum(1.0, np.abs(y))) and np.all(np.abs(val) < 1e-13):
            y = y_new
            break
        y = y_new
    return y[()] if y.ndim == 0 else y


# ---------------------------------------------------------------- families

def arnold(a: float, b: float) -> CircleMapLift:
    """f(x) = x + a - (b / 2 pi) sin 2 pi x (critical point at 0 when b = 1)."""
    return CircleMapLift(a, (0.0,), (-b / TWO_PI,))


def arnold_mu(mu1: float, mu2: float) -> CircleMapLift:
    """Two-parameter family with mu1 = 0 critical, mu1 < 0 diffeomorphisms."""
    return arnold(mu2, 1.0 + TWO_PI * mu1)


def rotation(alpha: float) -> CircleMapLift:
    return CircleMapLift(alpha)


def map_from_spec(spec: dict) -> CircleMapLift:
    kind = spec.get("kind")
    if kind == "arnold":
        return arnold(float(spec["a"]), float(spec["b"]))
    if kind == "rotation":
        return rotation(float(spec["alpha"]))
    if kind == "trig":
        return CircleMapLift(float(spec.get("c0", 0.0)), tuple(spec.get("cos", ())),
                             tuple(spec.get("sin", ())))
    raise ValueError(f"unknown map kind {kind!r}")


def load_map(path: Union[str, Path]) -> CircleMapLift:
    return map_from_spec(json.loads(Path(path).read_text()))


# ---------------------------------------------------------------- evaluation

def eval_lift(f: CircleMapLift, x, order: int = 0):
    return f.eval(x, order)


def iterate_lift(f: CircleMapLift, x: float, n: int, derivative: bool = False):
    """F^n(x), optionally with (F^n)'(x) by the chain rule."""
    if n < 0:
        raise ValueError("n must be non-negative")
    f.require_monotone()
    c0, r, s = f._arrays
    if derivative:
        w, y, d = _kernels.iterate_with_derivative(float(x), int(n), c0, r, s)
        return w + y, d
    w, y = _kernels.iterate(float(x), int(n), c0, r, s)
    return w + y


# ---------------------------------------------------------------- classes

@dataclass(frozen=True)
class Diffeomorphism:
    pass


@dataclass(frozen=True)
class CubicCritical:
    critical_point: float


@dataclass(frozen=True)
class NonMonotone:
    witness: float


MapClass = Union[Diffeomorphism, CubicCritical, NonMonotone]


def classify(f: CircleMapLift, tol: float = 1e-9) -> MapClass:
    if tol <= 0:
        raise ValueError("tol must be positive")
    n = 4096
    xs = np.arange(n) / n
    d = f.eval(xs, 1)
    m = float(d.min())
    if m > tol:
        return Diffeomorphism()
    if m < -tol:
        return NonMonotone(float(xs[int(np.argmin(d))]))
    # near-zero minimum: look for exactly one cubic tangency
    prev, nxt = np.roll(d, 1), np.roll(d, -1)
    minima = np.flatnonzero((d <= prev) & (d <= nxt) & (d <= tol + 1e-6))
    spots = sorted({round(_polish_min(f, float(xs[i])), 9) % 1.0 for i in minima})
    spots = [c for c in spots if abs(float(f.eval(c, 1))) <= tol]
    # merge wrap-around duplicates
    if len(spots) > 1 and (spots[0] + 1.0 - spots[-1]) < 1e-6:
        spots = spots[:-1]
    if len(spots) != 1:
        raise AmbiguousClass(f"{len(spots)} near-zero minima of F'", count=len(spots))
    c = spots[0]
    if float(f.eval(c, 3)) <= tol:
        raise AmbiguousClass("F''' is not positive at the tangency", point=c)
    if abs(c) < tol or abs(c - 1.0) < tol:
        c = 0.0
    return CubicCritical(c)
