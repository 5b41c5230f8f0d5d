"""Compiled orbit loops for trigonometric-polynomial lifts.

Lifts are passed as ``(c0, r, s)`` with ``r[k-1]``, ``s[k-1]`` the cosine and
sine coefficients of harmonic ``k``.  Orbits are carried as an integer part
plus a fractional part in [0, 1) so that long orbits do not lose absolute
precision as the lift value grows.
"""
import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi


@njit(cache=True)
def periodic(y, r, s):
    acc = 0.0
    for k in range(r.size):
        t = TWO_PI * (k + 1) * y
        acc += r[k] * math.cos(t) + s[k] * math.sin(t)
    return acc


@njit(cache=True)
def periodic_d1(y, r, s):
    acc = 0.0
    for k in range(r.size):
        w = TWO_PI * (k + 1)
        t = w * y
        acc += w * (s[k] * math.cos(t) - r[k] * math.sin(t))
    return acc


@njit(cache=True)
def periodic_d2(y, r, s):
    acc = 0.0
    for k in range(r.size):
        w = TWO_PI * (k + 1)
        t = w * y
        acc -= w * w * (r[k] * math.cos(t) + s[k] * math.sin(t))
    return acc


@njit(cache=True)
def iterate(x, n, c0, r, s):
    """Return (integer part, fractional part) of F^n(x)."""
    fl = math.floor(x)
    y = x - fl
    whole = fl
    for _ in range(n):
        z = y + c0 + periodic(y, r, s)
        fl = math.floor(z)
        whole += fl
        y = z - fl
    return whole, y


@njit(cache=True)
def iterate_with_derivative(x, n, c0, r, s):
    fl = math.floor(x)
    y = x - fl
    whole = fl
    d = 1.0
    for _ in range(n):
        d *= 1.0 + periodic_d1(y, r, s)
        z = y + c0 + periodic(y, r, s)
        fl = math.floor(z)
        whole += fl
        y = z - fl
    return whole, y, d


@njit(cache=True)
def orbit(x, n, c0, r, s):
    """Integer and fractional parts of F^k(x) for k = 0..n."""
    whole = np.empty(n + 1)
    frac = np.empty(n + 1)
    fl = math.floor(x)
    y = x - fl
    w = fl
    whole[0] = w
    frac[0] = y
    for k in range(1, n + 1):
        z = y + c0 + periodic(y, r, s)
        fl = math.floor(z)
        w += fl
        y = z - fl
        whole[k] = w
        frac[k] = y
    return whole, frac


@njit(cache=True)
def displacements(xs, q, p, c0, r, s):
    """F^q(x) - x - p for every x in xs."""
    out = np.empty(xs.size)
    for i in range(xs.size):
        w, y = iterate(xs[i], q, c0, r, s)
        x0 = xs[i]
        f0 = math.floor(x0)
        out[i] = (w - f0 - p) + (y - (x0 - f0))
    return out


@njit(cache=True)
def convergent_side(c0, r, s, qs, ps, below):
    """Decide on which side of an irrational alpha the rotation number lies.

    ``qs``/``ps`` are convergents of alpha sorted by q; ``below[k]`` is True
    when p_k/q_k < alpha.  Only the orbit of 0 is used: the sign of
    F^q(0) - p certifies rot >= p/q (sign >= 0) or rot <= p/q (sign <= 0).
    Returns (-1 | 0 | +1, index of the deciding convergent or -1).
    """
    y = 0.0
    whole = 0.0
    step = 0
    for k in range(qs.size):
        while step < qs[k]:
            z = y + c0 + periodic(y, r, s)
            fl = math.floor(z)
            whole += fl
            y = z - fl
            step += 1
        v = (whole - ps[k]) + y
        if below[k] and v <= 0.0:
            return -1, k
        if (not below[k]) and v >= 0.0:
            return 1, k
    return 0, -1


@njit(cache=True)
def convergent_values(c0, r, s, qs, ps):
    """F^{q_k}(0) - p_k for each convergent, from a single orbit of 0."""
    out = np.empty(qs.size)
    y = 0.0
    whole = 0.0
    step = 0
    for k in range(qs.size):
        while step < qs[k]:
            z = y + c0 + periodic(y, r, s)
            fl = math.floor(z)
            whole += fl
            y = z - fl
            step += 1
        out[k] = (whole - ps[k]) + y
    return out


@njit(cache=True)
def parameter_derivative(x, n, c0, r, s):
    """F_a^n(x) and its a-derivative for the family F_a = F + a at a = 0.

    Returns (integer part, fractional part, d/da).
    """
    fl = math.floor(x)
    y = x - fl
    whole = fl
    da = 0.0
    for _ in range(n):
        da = (1.0 + periodic_d1(y, r, s)) * da + 1.0
        z = y + c0 + periodic(y, r, s)
        fl = math.floor(z)
        whole += fl
        y = z - fl
    return whole, y, da


@njit(cache=True)
def boundary_jets(xs, q, c0, r, s):
    """Jets of F^q used by the unit-multiplier Newton solve.

    For each start x returns F^q(x) - x (as float), d/dx, d/da, d2/dx2 and
    d2/dxda of F^q, for the family F_a = F + a evaluated at a = 0.
    """
    m = xs.size
    disp = np.empty(m)
    jx = np.empty(m)
    ja = np.empty(m)
    jxx = np.empty(m)
    jxa = np.empty(m)
    for i in range(m):
        x0 = xs[i]
        fl = math.floor(x0)
        y = x0 - fl
        whole = fl
        yx = 1.0
        ya = 0.0
        yxx = 0.0
        yxa = 0.0
        for _ in range(q):
            d1 = 1.0 + periodic_d1(y, r, s)
            d2 = periodic_d2(y, r, s)
            nyxx = d2 * yx * yx + d1 * yxx
            nyxa = d2 * yx * ya + d1 * yxa
            yx = d1 * yx
            ya = d1 * ya + 1.0
            yxx = nyxx
            yxa = nyxa
            z = y + c0 + periodic(y, r, s)
            fl = math.floor(z)
            whole += fl
            y = z - fl
        disp[i] = (whole - math.floor(x0)) + (y - (x0 - math.floor(x0)))
        jx[i] = yx
        ja[i] = ya
        jxx[i] = yxx
        jxa[i] = yxa
    return disp, jx, ja, jxx, jxa


@njit(cache=True)
def boundary_jets_family(xs, c0s, q, r, s):
    """boundary_jets with a separate translation c0s[i] for each start xs[i]."""
    m = xs.size
    disp = np.empty(m)
    jx = np.empty(m)
    ja = np.empty(m)
    jxx = np.empty(m)
    jxa = np.empty(m)
    one = np.empty(1)
    for i in range(m):
        one[0] = xs[i]
        d, a1, a2, a3, a4 = boundary_jets(one, q, c0s[i], r, s)
        disp[i] = d[0]
        jx[i] = a1[0]
        ja[i] = a2[0]
        jxx[i] = a3[0]
        jxa[i] = a4[0]
    return disp, jx, ja, jxx, jxa
