"""Return-map parameter derivatives and expansion proxies along P_n.

For the family ``f_a = f + a`` the first-return map P to the arc between
``F^{q_n + q_{n+1}}(0)`` and ``F^{q_{n+1}}(0)`` is ``f^{q_{n+1}}`` on the
part between ``F^{q_n + q_{n+1}}(0)`` and 0, and ``f^{q_n + q_{n+1}}`` on the
part between 0 and ``F^{q_{n+1}}(0)``.  Its a-derivative is the sum of the
derivatives of the tail iterates, all terms positive.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels
from .circle_maps import CircleMapLift
from .errors import CoverFailure, HypothesisViolated, InsufficientLevels, WrongBranch
from .partitions import _returns_through, build_partition, closest_returns

FIT_WINDOW = 6
FD_STEP = 1e-6
BRANCH_SHORT = "q_{n+1}"
BRANCH_LONG = "q_n+q_{n+1}"


def _lift_value(f: CircleMapLift, k: int, p: int) -> float:
    c0, r, s = f._arrays
    w, y = _kernels.iterate(0.0, k, c0, r, s)
    return (w - p) + y


def branch_arcs(f: CircleMapLift, n: int):
    """{branch: (lo, hi)} in lift coordinates around 0, plus return times."""
    rets = _returns_through(f, n + 1)
    rn, rn1 = rets[n], rets[n + 1]
    far = _lift_value(f, rn.q + rn1.q, rn.p + rn1.p)
    near = _lift_value(f, rn1.q, rn1.p)
    return {BRANCH_SHORT: tuple(sorted((far, 0.0))),
            BRANCH_LONG: tuple(sorted((0.0, near)))}, rn, rn1


def _branch_time(which: str, qn: int, qn1: int) -> int:
    if which == BRANCH_SHORT:
        return qn1
    if which == BRANCH_LONG:
        return qn + qn1
    raise ValueError(f"branch must be {BRANCH_SHORT!r} or {BRANCH_LONG!r}")


def return_map_derivative(f: CircleMapLift, n: int, y: float, which: str = BRANCH_SHORT,
                          check: bool = False) -> float:
    """d/da f_a^Q(y) at a = 0, Q the return time of the chosen branch.

    With ``check`` the value is compared against a central difference with
    step 1e-6 and the relative discrepancy is returned alongside.
    """
    if which not in (BRANCH_SHORT, BRANCH_LONG):
        raise ValueError(f"branch must be {BRANCH_SHORT!r} or {BRANCH_LONG!r}")
    arcs, rn, rn1 = branch_arcs(f, n)
    lo, hi = arcs[which]
    if not lo <= y <= hi:
        other = BRANCH_LONG if which == BRANCH_SHORT else BRANCH_SHORT
        raise WrongBranch(f"y = {y!r} is not in the {which} arc [{lo!r}, {hi!r}]",
                          y=y, arc=[lo, hi], other=other)
    Q = _branch_time(which, rn.q, rn1.q)
    c0, r, s = f._arrays
    _, _, deriv = _kernels.parameter_derivative(float(y), Q, c0, r, s)
    if not check:
        return float(deriv)
    return float(deriv), finite_difference_check(f, Q, y, deriv)


def finite_difference_check(f: CircleMapLift, Q: int, y: float, deriv: float,
                            eps: float = FD_STEP) -> float:
    """Relative gap between deriv and (P_{a+eps}(y) - P_{a-eps}(y)) / 2 eps."""
    c0, r, s = f._arrays
    wp, yp = _kernels.iterate(float(y), Q, c0 + eps, r, s)
    wm, ym = _kernels.iterate(float(y), Q, c0 - eps, r, s)
    fd = ((wp - wm) + (yp - ym)) / (2 * eps)
    return abs(fd - deriv) / abs(deriv)


@dataclass(frozen=True)
class ExpansionBound:
    min_P_prime: float
    Mn_over_Jn: float
    ratio: float


def expansion_lower_bound(f: CircleMapLift, n: int, samples: int = 64) -> ExpansionBound:
    """min of P'_a over both return arcs against M_n / |J_n|."""
    part = build_partition(f, n)
    arcs, rn, rn1 = branch_arcs(f, n)
    c0, r, s = f._arrays
    best = math.inf
    for which, (lo, hi) in arcs.items():
        Q = _branch_time(which, rn.q, rn1.q)
        for y in np.linspace(lo, hi, samples):
            best = min(best, _kernels.parameter_derivative(float(y), Q, c0, r, s)[2])
    mj = part.M_n / part.J_n
    return ExpansionBound(float(best), mj, float(best) / mj)


@dataclass(frozen=True)
class ExpansionEstimate:
    levels: tuple
    inv_Jn: tuple
    Mn: tuple
    s: float
    lambda1_proxy: float
    lambda2_proxy: float
    k: int


def expansion_rates(f: CircleMapLift, n_max: int) -> ExpansionEstimate:
    """Fit M_{n+1}/M_n over the last six levels and derive the rate proxies.

    M_n only needs the return times up to q_n; 1/|J_n| is reported where
    the partition P_n (which needs q_{n+1}) is within reach, NaN otherwise.
    """
    if n_max > 14:
        raise ValueError("n_max must be <= 14")
    try:
        rets = _returns_through(f, n_max)
    except CoverFailure:
        rets = closest_returns(f)
    levels = list(range(min(n_max, len(rets) - 1) + 1))
    if len(levels) < FIT_WINDOW:
        raise InsufficientLevels(f"need {FIT_WINDOW} levels, got {len(levels)}",
                                 levels=len(levels))
    mn = [abs(rets[n].displacement) for n in levels]
    inv_j = []
    for n in levels:
        try:
            inv_j.append(1.0 / build_partition(f, n).J_n)
        except CoverFailure:
            inv_j.append(math.nan)
    xs = np.array(levels[-FIT_WINDOW:], dtype=float)
    slope = np.polyfit(xs, np.log(mn[-FIT_WINDOW:]), 1)[0]
    s = math.exp(slope)
    lam1, lam2 = s ** -3, s ** -2
    return ExpansionEstimate(tuple(levels), tuple(inv_j), tuple(mn), s, lam1, lam2,
                             smoothness_exponent(lam1, lam2))


def smoothness_exponent(lambda1: float, lambda2: float) -> int:
    """floor(log lambda1 / log lambda2) for lambda1 > lambda2 > 1."""
    if not (lambda1 > lambda2 > 1.0):
        raise HypothesisViolated("need lambda1 > lambda2 > 1", lambda1=lambda1, lambda2=lambda2)
    ratio = math.log(lambda1) / math.log(lambda2)
    # guard against log-ratio round-off just below an integer
    return int(math.floor(ratio + 1e-12))
