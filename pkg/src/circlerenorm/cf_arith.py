"""Continued fractions, convergents and the Brjuno sum.

Digits are indexed from 1: ``alpha = [a_1, a_2, ...] = 1/(a_1 + 1/(a_2 + ...))``
for alpha in (0, 1).  Convergents include the seed ``p_0/q_0 = 0/1``, so that
``p_n/q_n = [a_1, ..., a_n]`` and ``|q_n alpha - p_n|`` is the length of the
n-th closest-return interval of the rotation by alpha.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import RationalDetected

RATIONAL_EPS = 1e-14
FLOAT_DEPTH_CAP = 30


@dataclass(frozen=True)
class ContinuedFraction:
    digits: tuple
    periodic_tail: Optional[tuple] = None  # (start index, period), 1-based start

    def __post_init__(self):
        digits = tuple(int(d) for d in self.digits)
        if any(d < 1 for d in digits):
            raise ValueError("continued-fraction digits must be >= 1")
        object.__setattr__(self, "digits", digits)
        if self.periodic_tail is not None:
            start, period = (int(v) for v in self.periodic_tail)
            if start < 1 or period < 1 or start + period - 1 > len(digits):
                raise ValueError("periodic tail must lie within the listed digits")
            object.__setattr__(self, "periodic_tail", (start, period))

    @property
    def is_periodic(self) -> bool:
        return self.periodic_tail is not None

    @property
    def available(self) -> float:
        return math.inf if self.is_periodic else len(self.digits)

    def digit(self, k: int) -> int:
        """a_k, 1-based."""
        if k < 1:
            raise IndexError("digits are 1-based")
        if k <= len(self.digits):
            return self.digits[k - 1]
        if not self.is_periodic:
            raise IndexError(f"only {len(self.digits)} digits available")
        start, period = self.periodic_tail
        return self.digits[start - 1 + (k - start) % period]

    def take(self, n: int) -> list:
        return [self.digit(k) for k in range(1, n + 1)]

    def tail_value(self, j: int, extra: int = 64) -> float:
        """alpha_j = G^j(alpha) = [a_{j+1}, a_{j+2}, ...] evaluated in floats."""
        stop = j + extra if self.is_periodic else len(self.digits)
        if stop <= j:
            raise RationalDetected(j)
        x = 0.0
        for k in range(stop, j, -1):
            x = 1.0 / (self.digit(k) + x)
        return x

    def value(self) -> float:
        return self.tail_value(0)

    @classmethod
    def periodic(cls, period_digits: Sequence[int], prefix: Sequence[int] = ()):
        digits = tuple(prefix) + tuple(period_digits)
        return cls(digits, (len(prefix) + 1, len(period_digits)))


GOLDEN = ContinuedFraction.periodic([1])
SILVER = ContinuedFraction.periodic([2])
GOLDEN_MEAN = (math.sqrt(5.0) - 1.0) / 2.0
SILVER_MEAN = math.sqrt(2.0) - 1.0


def gauss_orbit(x: float, n: int):
    """alpha_0 = x, alpha_k = {1/alpha_{k-1}} for k < n, with digits floor(1/alpha_k)."""
    if not 0.0 < x < 1.0:
        raise ValueError("x must lie in (0, 1)")
    alphas, digits = [], []
    a = float(x)
    for k in range(n):
        if a < RATIONAL_EPS:
            raise RationalDetected(k)
        alphas.append(a)
        inv = 1.0 / a
        d = math.floor(inv)
        digits.append(int(d))
        a = inv - d
    return alphas, digits


def from_float(x: float, depth: int = FLOAT_DEPTH_CAP) -> ContinuedFraction:
    """Digits of x via the Gauss map; depth is capped because binary64 orbits
    lose about one digit per step.  Stops early if the orbit hits a rational."""
    depth = min(depth, FLOAT_DEPTH_CAP)
    digits = []
    a = float(x)
    for _ in range(depth):
        if a < RATIONAL_EPS:
            break
        inv = 1.0 / a
        d = math.floor(inv)
        digits.append(int(d))
        a = inv - d
    if not digits:
        raise RationalDetected(0)
    return ContinuedFraction(tuple(digits))


def parse_alpha(spec: str) -> ContinuedFraction:
    """'golden' | 'silver' | 'cf:1,2,3[|period]' | decimal literal."""
    s = spec.strip()
    if s == "golden":
        return GOLDEN
    if s == "silver":
        return SILVER
    if s.startswith("cf:"):
        body = s[3:]
        period = None
        if "|" in body:
            body, per = body.split("|", 1)
            period = int(per)
        digits = tuple(int(t) for t in body.split(",") if t.strip())
        if period is not None:
            return ContinuedFraction(digits, (len(digits) - period + 1, period))
        return ContinuedFraction(digits)
    x = float(s)
    if not 0.0 < x < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    return from_float(x)


@dataclass(frozen=True)
class Convergents:
    p: tuple
    q: tuple

    def fraction(self, n: int) -> Fraction:
        return Fraction(self.p[n], self.q[n])


def convergents(cf: ContinuedFraction, n: int) -> Convergents:
    """p_k/q_k for k = 0..n, with p_0/q_0 = 0/1."""
    if n > cf.available:
        raise ValueError(f"need {n} digits, only {cf.available} available")
    p_prev, q_prev = 1, 0
    p, q = 0, 1
    ps, qs = [p], [q]
    for k in range(1, n + 1):
        a = cf.digit(k)
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        ps.append(p)
        qs.append(q)
    return Convergents(tuple(ps), tuple(qs))


def convergents_up_to(cf: ContinuedFraction, q_cap: int) -> Convergents:
    """All convergents with q_k <= q_cap (bounded by available digits)."""
    p_prev, q_prev, p, q = 1, 0, 0, 1
    ps, qs = [p], [q]
    k = 1
    while k <= cf.available:
        a = cf.digit(k)
        p_new, q_new = a * p + p_prev, a * q + q_prev
        if q_new > q_cap:
            break
        p_prev, q_prev, p, q = p, q, p_new, q_new
        ps.append(p)
        qs.append(q)
        k += 1
    return Convergents(tuple(ps), tuple(qs))


def rational_digits(p: int, q: int) -> list:
    """Continued-fraction digits of p/q in (0, 1)."""
    x = Fraction(p, q)
    if not 0 < x < 1:
        raise ValueError("p/q must lie in (0, 1)")
    out = []
    while x:
        inv = 1 / x
        d = inv.numerator // inv.denominator
        out.append(d)
        x = inv - d
    return out


@dataclass(frozen=True)
class BrjunoValue:
    value: float
    depth: int
    tail_bound: float


def brjuno(cf: ContinuedFraction, depth: int) -> BrjunoValue:
    """Depth-truncated sum_j alpha_{-1} alpha_0 ... alpha_{j-1} log(1/alpha_j)."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not cf.is_periodic and depth >= len(cf.digits):
        # the last listed digit makes the tail rational
        raise RationalDetected(len(cf.digits))
    total, beta = 0.0, 1.0
    for j in range(depth):
        a_j = cf.tail_value(j)
        if a_j < RATIONAL_EPS:
            raise RationalDetected(j)
        total += beta * math.log(1.0 / a_j)
        beta *= a_j
    if cf.is_periodic:
        start, period = cf.periodic_tail
        tail_alphas = [cf.tail_value(j) for j in range(min(depth, start - 1), start - 1 + period)]
        bound = beta * math.log(1.0 / min(tail_alphas)) / (1.0 - max(tail_alphas))
    else:
        # listed digits only: alpha_j <= 1/a_{j+1}, log(1/alpha_j) < log(a_{j+1} + 1)
        bound, b = 0.0, beta
        for j in range(depth, len(cf.digits)):
            a = cf.digit(j + 1)
            bound += b * math.log(a + 1.0)
            b /= a
    return BrjunoValue(total, depth, bound)


def digit_census(cf: ContinuedFraction, K: int, window: int, n_digits: Optional[int] = None) -> float:
    """max over window starts m of #{k : a_k < K, m <= k < m + window} / window."""
    if n_digits is None:
        if cf.is_periodic:
            start, period = cf.periodic_tail
            n_digits = start - 1 + period + window
        else:
            n_digits = len(cf.digits)
    if window < 1 or window > n_digits:
        raise ValueError("window must be between 1 and the available digit count")
    small = [1 if d < K else 0 for d in cf.take(n_digits)]
    count = sum(small[:window])
    best = count
    for m in range(1, n_digits - window + 1):
        count += small[m + window - 1] - small[m - 1]
        best = max(best, count)
    return best / window


def is_bounded_type(cf: ContinuedFraction, bound: int, depth: int) -> bool:
    return all(d <= bound for d in cf.take(depth))
