"""(-1)-measures: probability measures with
``int phi dmu = int f'(f^{-1} x) phi(f^{-1} x) dmu(x)`` for all continuous phi.

Two constructions are provided.

* ``grid``: for diffeomorphisms.  The density obeys ``rho = T rho`` with
  ``(T rho)(y) = rho(f(y)) f'(y)^2``.  T is conjugate to a rotation, so its
  iterates do not settle.  Their average under a smooth window does, and
  converges quickly for Diophantine rotation numbers.  rho is sampled at cell
  midpoints, and ``rho(f(y))`` is read off by local Lagrange interpolation.
* ``orbit``: for critical maps, whose measure piles up along the critical
  orbit and defeats any uniform grid.  A translate ``f + t`` on the edge of a
  convergent's plateau has a periodic orbit of multiplier one.  The atoms
  ``w_j ~ 1 / (f^j)'(y_0)`` on it form an exact (-1)-measure of ``f + t``.
  As the convergents improve these converge weakly to the measure of f.
"""
from __future__ import annotations

import math
from fractions import Fraction
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sparse

from . import _kernels
from .cf_arith import ContinuedFraction, convergents, from_float
from .circle_maps import (CircleMapLift, ConjugatedRotation, CubicCritical, classify,
                          inverse)
from .errors import HitCriticalOrbit, NoConvergence, RationalRotation
from .rotation import rot_bracket
from .tongues import parabolic_orbit

STENCIL = 8
WINDOW_START = 250
DEFAULT_QCAP = 20000
TEST_DEGREE = 8


@dataclass(frozen=True)
class DiscreteDensity:
    """Cell values rho_i of a density on the uniform grid, with sum(rho)/n = 1.

    ``atoms``/``atom_weights`` are set by the orbit construction; the grid
    values are then the binned atoms, and integrals use the atoms directly.
    """
    grid_n: int
    weights: np.ndarray
    residual: float = 0.0
    iterations: int = 0
    method: str = "grid"
    atoms: Optional[np.ndarray] = None
    atom_weights: Optional[np.ndarray] = None
    period: Optional[int] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.grid_n,):
            raise ValueError("weights must have one entry per cell")
        if np.any(w < 0):
            raise ValueError("density weights must be nonnegative")
        object.__setattr__(self, "weights", w)

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.grid_n) + 0.5) / self.grid_n

    @property
    def cell_mass(self) -> np.ndarray:
        return self.weights / self.grid_n

    def normalized(self) -> "DiscreteDensity":
        w = self.weights / (self.weights.sum() / self.grid_n)
        return DiscreteDensity(self.grid_n, w, self.residual, self.iterations, self.method,
                               self.atoms, self.atom_weights, self.period)

    def perturbed(self, cell: int, factor: float) -> "DiscreteDensity":
        """A grid-only copy with one cell scaled, renormalized."""
        w = self.weights.copy()
        w[cell] *= factor
        return DiscreteDensity(self.grid_n, w / (w.sum() / self.grid_n), method="grid")

    def l1_distance(self, other: "DiscreteDensity") -> float:
        if other.grid_n != self.grid_n:
            raise ValueError("grids differ")
        return float(np.abs(self.weights - other.weights).sum() / self.grid_n)

    def coarsened(self, grid_n: int) -> "DiscreteDensity":
        if self.grid_n % grid_n:
            raise ValueError("target grid must divide the current one")
        w = self.weights.reshape(grid_n, -1).mean(axis=1)
        return DiscreteDensity(grid_n, w, self.residual, self.iterations, self.method,
                               self.atoms, self.atom_weights, self.period)


# ---------------------------------------------------------------- helpers

def _lagrange(t: np.ndarray, m: int):
    """Offsets and weights of the m-point Lagrange stencil around t in [0, 1)."""
    offs = np.arange(-(m // 2) + 1, m // 2 + 1)
    w = np.ones((t.size, m))
    for j, oj in enumerate(offs):
        for k, ok in enumerate(offs):
            if k != j:
                w[:, j] *= (t - ok) / (oj - ok)
    return offs, w


def _sweep_operator(f, n: int, m: int):
    """Sparse matrix of rho -> rho(f(.)) f'(.)^2 sampled at cell midpoints."""
    x = (np.arange(n) + 0.5) / n
    y = np.asarray(f.eval(x), dtype=float) % 1.0
    d = np.asarray(f.eval(x, 1), dtype=float)
    u = y * n - 0.5
    k0 = np.floor(u).astype(np.int64)
    offs, w = _lagrange(u - k0, m)
    rows = np.repeat(np.arange(n), m)
    cols = ((k0[:, None] + offs[None, :]) % n).ravel()
    vals = ((d * d)[:, None] * w).ravel()
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _bump(n: int) -> np.ndarray:
    t = (np.arange(n) + 0.5) / n
    w = np.exp(-1.0 / (t * (1.0 - t)))
    return w / w.sum()


def _rotation_cf(f, q_cap: int):
    """(integer part, continued fraction of the fractional part) of rot(f).

    Rational plateaus raise RationalRotation.
    """
    if isinstance(f, ConjugatedRotation):
        cf = from_float(f.alpha % 1.0)
        if len(cf.digits) < 3:
            frac = Fraction(f.alpha % 1.0).limit_denominator(10 ** 6)
            raise RationalRotation(frac.numerator, frac.denominator)
        return math.floor(f.alpha), cf
    res = rot_bracket(f, q_cap=q_cap)
    if res.exact:
        raise RationalRotation(res.lower.numerator, res.lower.denominator)
    return math.floor(res.lower), ContinuedFraction(res.digits)


def _is_critical(f) -> bool:
    if isinstance(f, ConjugatedRotation):
        return False
    return isinstance(classify(f), CubicCritical)


# ---------------------------------------------------------------- construction

def minus_one_density(f, grid_n: int = 2048, max_iter: int = 5000, tol: float = 1e-8,
                      method: str = "auto", initial: Optional[np.ndarray] = None,
                      q_cap: int = DEFAULT_QCAP, stencil: int = STENCIL) -> DiscreteDensity:
    """(-1)-measure of f on a uniform grid of grid_n cells.

    ``method`` is "grid", "orbit" or "auto" (orbit for critical maps).
    For "grid" the smoothly windowed average of T^k rho_0 is formed for
    window lengths 250, 500, ... <= max_iter and the run stops once two
    consecutive averages differ by <= tol in L1.  For "orbit" the
    approximating periods run through the convergents of rot(f) up to
    q_cap, stopping once the invariance defect is <= tol.
    """
    f.require_monotone()
    if method == "auto":
        method = "orbit" if _is_critical(f) else "grid"
    n0, cf = _rotation_cf(f, q_cap)
    if method == "grid":
        return _grid_density(f, grid_n, max_iter, tol, initial, stencil)
    if method == "orbit":
        return _orbit_density(f, n0, cf, grid_n, tol, q_cap)
    raise ValueError(f"unknown method {method!r}")


def _grid_density(f, n, max_iter, tol, initial, stencil):
    op = _sweep_operator(f, n, stencil)
    windows = []
    length = WINDOW_START
    while length <= max_iter:
        windows.append(length)
        length *= 2
    if not windows:
        windows = [max_iter]
    bumps = {w: _bump(w) for w in windows}
    acc = {w: np.zeros(n) for w in windows}
    v = np.ones(n) if initial is None else np.asarray(initial, dtype=float).copy()
    prev, change = None, math.inf
    k = 0
    for w in windows:
        while k < w:
            for other in windows:
                if k < other:
                    acc[other] += bumps[other][k] * v
            v = op @ v
            k += 1
        cur = acc[w] / (acc[w].sum() / n)
        if prev is not None:
            change = float(np.abs(cur - prev).sum() / n)
            if change <= tol:
                return DiscreteDensity(n, np.maximum(cur, 0.0), change, k, "grid")
        prev = cur
    raise NoConvergence(change, k)


def _orbit_atoms(f, p: int, q: int):
    """Atoms and weights of the exact (-1)-measure of the edge translate."""
    orb = parabolic_orbit(f, p, q)
    g = f.shifted(orb.shift)
    c0, r, s = g._arrays
    _, y = _kernels.orbit(orb.x0, q - 1, c0, r, s)
    logd = np.log(np.asarray(g.eval(y, 1), dtype=float))
    logw = np.concatenate([[0.0], -np.cumsum(logd[:-1])])
    w = np.exp(logw - logw.max())
    return y, w / w.sum(), orb


def _bin_atoms(atoms, weights, n):
    cells = np.minimum((atoms * n).astype(np.int64), n - 1)
    return np.bincount(cells, weights=weights, minlength=n) * n


def _orbit_density(f, n0, cf, n, tol, q_cap):
    conv = convergents(cf, len(cf.digits))
    tried, defect = 0, math.inf
    for k in range(1, len(conv.q)):
        q = conv.q[k]
        if q < 64:
            continue
        if q > q_cap:
            break
        atoms, w, _ = _orbit_atoms(f, n0 * q + conv.p[k], q)
        tried += 1
        defect = _atomic_residual(f, atoms, w, TEST_DEGREE)
        if defect <= tol:
            return DiscreteDensity(n, _bin_atoms(atoms, w, n), defect, tried, "orbit",
                                   atoms, w, q)
    raise NoConvergence(defect, tried)


# ---------------------------------------------------------------- diagnostics

def _test_functions(degree: int):
    yield lambda y: np.ones_like(y)
    for k in range(1, degree + 1):
        yield lambda y, k=k: np.cos(2 * np.pi * k * y)
        yield lambda y, k=k: np.sin(2 * np.pi * k * y)


def _nodes(f, density: DiscreteDensity):
    """(points x_i, masses m_i, preimages z_i, f'(z_i)) for quadrature."""
    if density.atoms is not None:
        x, m = density.atoms, density.atom_weights
    else:
        x, m = density.midpoints, density.cell_mass
    z = np.asarray(inverse(f, x), dtype=float)
    return x, m, z, np.asarray(f.eval(z, 1), dtype=float)


def _atomic_residual(f, atoms, w, degree):
    z = np.asarray(inverse(f, atoms), dtype=float)
    d = np.asarray(f.eval(z, 1), dtype=float)
    return max(abs(float(np.dot(w, phi(atoms)) - np.dot(w * d, phi(z))))
               for phi in _test_functions(degree))


def invariance_residual(f, density: DiscreteDensity, test_degree: int = TEST_DEGREE) -> float:
    """max_phi |int phi dmu - int f'(f^-1) phi(f^-1) dmu| over trig phi of degree <= test_degree."""
    x, m, z, d = _nodes(f, density)
    return max(abs(float(np.dot(m, phi(x)) - np.dot(m * d, phi(z))))
               for phi in _test_functions(test_degree))


def _as_field(v) -> Callable:
    if isinstance(v, CircleMapLift):
        # a lift x + periodic part: the field is the periodic part
        return lambda y: np.asarray(v.eval(y), dtype=float) - y
    return v


def functional_L(f, density: DiscreteDensity, v) -> float:
    """L_f(v) = int v(f^{-1}(x)) dmu_f(x)."""
    field = _as_field(v)
    _, m, z, _ = _nodes(f, density)
    return float(np.dot(m, field(z)))


def reciprocal_derivative_series(f, p: float, n_terms: int) -> np.ndarray:
    """Partial sums S_n = sum_{k=1..n} 1 / (f^k)'(p)."""
    f.require_monotone()
    crit = None
    if not isinstance(f, ConjugatedRotation):
        cls = classify(f)
        if isinstance(cls, CubicCritical):
            crit = cls.critical_point
    y = float(p)
    deriv = 1.0
    out = np.empty(n_terms)
    total = 0.0
    for k in range(n_terms):
        if crit is not None:
            gap = abs((y - crit + 0.5) % 1.0 - 0.5)
            if gap < 1e-12:
                raise HitCriticalOrbit(k)
        deriv *= float(f.eval(y, 1))
        y = float(f.eval(y)) % 1.0
        total += 1.0 / deriv
        out[k] = total
    return out
