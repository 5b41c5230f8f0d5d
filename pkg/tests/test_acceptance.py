"""Acceptance criteria 1-15, one test each.

Every test records a PASS/FAIL line with the measured numbers; the lines are
printed at the end of the pytest run (see conftest.py) and also when the file
is executed directly with ``python3 tests/test_acceptance.py``.
"""
import math
import sys
import time

import numpy as np
import pytest

from circlerenorm.cf_arith import brjuno, parse_alpha
from circlerenorm.circle_maps import CircleMapLift, ConjugatedRotation, arnold, arnold_mu, rotation
from circlerenorm.errors import InconclusiveReport, RationalRotation
from circlerenorm.measures import functional_L, invariance_residual, minus_one_density
from circlerenorm.partitions import build_partition, partition_stats
from circlerenorm.renorm import (BRANCH_LONG, BRANCH_SHORT, branch_arcs, expansion_lower_bound,
                                 expansion_rates, return_map_derivative, smoothness_exponent)
from circlerenorm.smoothness_probe import analyze, probe, synthetic_curve
from circlerenorm.tongues import rational_boundary, tongue_point
from circlerenorm.triples import conjugacy_residual, critical_data, lift_critical, lift_family
from circlerenorm.rotation import rot_bracket, rot_digits

GAMMA = (math.sqrt(5.0) - 1.0) / 2.0
RESULTS = {}


def record(number, title, ok, detail, started):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title}: {detail} ({time.time() - started:.1f} s)"
    RESULTS[number] = line
    print(line)
    assert ok, line


_cache = {}


def critical_golden():
    if "fc" not in _cache:
        _cache["fc"] = arnold(tongue_point("golden", 1.0, 1e-13), 1.0)
    return _cache["fc"]


def critical_density():
    if "dens" not in _cache:
        _cache["dens"] = minus_one_density(critical_golden(), 4096, tol=1e-7)
    return _cache["dens"]


def test_criterion_01_zero_tongue_boundaries():
    t0 = time.time()
    errs = []
    for b in (0.1, 0.5, 0.9):
        lo, hi = rational_boundary(0, 1, b)
        errs += [abs(lo + b / (2 * math.pi)), abs(hi - b / (2 * math.pi))]
    record(1, "0/1 tongue edges vs +-b/2pi", max(errs) <= 1e-8, f"max error {max(errs):.2e}", t0)


def test_criterion_02_rigid_rotation_numbers():
    t0 = time.time()
    errs = []
    for alpha in (GAMMA, math.sqrt(2.0) - 1.0, 0.3):
        try:
            res = rot_digits(rotation(alpha), depth=40, q_cap=10 ** 6)
            errs.append(max(abs(float(res.lower) - alpha), abs(float(res.upper) - alpha)))
        except RationalRotation as exc:
            errs.append(abs(exc.p / exc.q - alpha))
    record(2, "rigid rotations", max(errs) <= 1e-10, f"max bracket error {max(errs):.2e}", t0)


def test_criterion_03_symmetry_point():
    t0 = time.time()
    res = rot_bracket(arnold(0.5, 0.7))
    try:
        rot_digits(arnold(0.5, 0.7))
        raised = None
    except RationalRotation as exc:
        raised = (exc.p, exc.q)
    ok = res.exact and res.lower == res.upper == 0.5 and raised == (1, 2)
    record(3, "Arnold(1/2, 0.7) is exactly 1/2", ok, f"bracket [{res.lower}, {res.upper}], raised {raised}", t0)


def test_criterion_04_brjuno_golden():
    t0 = time.time()
    val = brjuno(parse_alpha("golden"), 40).value
    err = abs(val - math.log(1 / GAMMA) / (1 - GAMMA))
    record(4, "Brjuno value at the golden mean", err <= 1e-8, f"error {err:.2e}", t0)


def _conjugated():
    return ConjugatedRotation(CircleMapLift(0.0, (0.0,), (0.1,)), GAMMA)


def test_criterion_05_conjugated_rotation_density():
    t0 = time.time()
    d = minus_one_density(_conjugated(), 2048)
    x = d.midpoints
    target = (1 + 0.2 * math.pi * np.cos(2 * math.pi * x)) ** 2
    target /= target.mean()
    err = float(np.mean(np.abs(d.normalized().weights - target)))
    record(5, "density of a conjugated rotation vs (h')^2", err <= 1e-3, f"L1 error {err:.2e}", t0)


def test_criterion_06_invariance_residuals():
    t0 = time.time()
    cases = {"rotation": (rotation(GAMMA), 512), "conjugated": (_conjugated(), 2048),
             "arnold(0.3,0.5)": (arnold(0.3, 0.5), 1024), "arnold(0.62,0.9)": (arnold(0.62, 0.9), 1024)}
    res = {name: invariance_residual(f, minus_one_density(f, n, max_iter=64000), test_degree=8)
           for name, (f, n) in cases.items()}
    worst = max(res.values())
    record(6, "invariance residuals, degree <= 8", worst <= 1e-6,
           ", ".join(f"{k} {v:.1e}" for k, v in res.items()), t0)


def test_criterion_07_stable_direction_annihilation():
    t0 = time.time()
    f, dens = critical_golden(), critical_density()
    rng = np.random.default_rng(2024)
    vals = []
    for _ in range(5):
        c, s = rng.normal(size=3), rng.normal(size=3)

        def w(y, c=c, s=s):
            k = np.arange(1, 4)[:, None]
            t = 2 * math.pi * k * np.asarray(y)[None, :]
            return (c[:, None] * np.cos(t) + s[:, None] * np.sin(t)).sum(axis=0)

        vals.append(abs(functional_L(f, dens, lambda y, w=w: w(f(y)) - f.eval(y, 1) * w(y))))
    record(7, "L(w o f - f' w) on the critical map", max(vals) <= 1e-6, f"max {max(vals):.2e}", t0)


def _partition_stats_4_12():
    if "pstats" not in _cache:
        f = critical_golden()
        parts = {n: build_partition(f, n) for n in range(4, 13)}
        _cache["pstats"] = (parts, {n: partition_stats(p, f) for n, p in parts.items()})
    return _cache["pstats"]


def test_criterion_08_partition_bounds():
    t0 = time.time()
    parts, stats = _partition_stats_4_12()
    cover = max(abs(p.lengths().sum() - 1.0) for p in parts.values())
    ratios = [s.max_adjacent_ratio for s in stats.values()]
    spread = max(ratios) / min(ratios)
    ok = cover <= 1e-9 and max(ratios) <= 100 and spread < 5
    record(8, "partition cover and adjacency", ok,
           f"cover error {cover:.1e}, max ratio {max(ratios):.2f}, spread x{spread:.2f}", t0)


def test_criterion_09_cubic_law():
    t0 = time.time()
    _, stats = _partition_stats_4_12()
    cubes = [s.cube_ratio for s in stats.values()]
    ok = all(1e-2 <= c <= 1e2 for c in cubes)
    record(9, "|f(I_n)| / M_n^3", ok, f"range [{min(cubes):.3f}, {max(cubes):.3f}]", t0)


def test_criterion_10_derivative_sums():
    t0 = time.time()
    rng = np.random.default_rng(10)
    worst = 0.0
    for _ in range(20):
        b = float(rng.uniform(0.9, 1.0))
        f = arnold(tongue_point("golden", b, 1e-13), b)
        n = int(rng.integers(3, 8))
        which = BRANCH_SHORT if rng.random() < 0.5 else BRANCH_LONG
        lo, hi = branch_arcs(f, n)[0][which]
        y = float(lo + rng.uniform(0.05, 0.95) * (hi - lo))
        worst = max(worst, return_map_derivative(f, n, y, which, check=True)[1])
    record(10, "return-map derivative vs finite difference", worst <= 1e-4,
           f"max rel. error {worst:.2e}", t0)


def test_criterion_11_expansion_bound():
    t0 = time.time()
    bounds = [expansion_lower_bound(critical_golden(), n) for n in range(4, 11)]
    c = [b.ratio for b in bounds]
    mins = [b.min_P_prime for b in bounds]
    monotone = all(x < y for x, y in zip(mins, mins[1:]))
    ok = max(c) / min(c) <= 10 and monotone
    record(11, "empirical expansion constant", ok,
           f"c in [{min(c):.3f}, {max(c):.3f}], min P' increasing: {monotone}", t0)


def test_criterion_12_smoothness_exponent():
    t0 = time.time()
    k = smoothness_exponent(2.83, 1.66)
    record(12, "floor(log 2.83 / log 1.66)", k == 2, f"k = {k}", t0)


def test_criterion_13_proxy_ratio():
    t0 = time.time()
    est = expansion_rates(critical_golden(), 14)
    ratio = math.log(est.lambda1_proxy) / math.log(est.lambda2_proxy)
    record(13, "log lambda1 / log lambda2 of the proxies", abs(ratio - 1.5) <= 1e-12,
           f"ratio {ratio!r}, k = {est.k}", t0)


def test_criterion_14_triple_round_trips():
    t0 = time.time()
    f = critical_golden()
    crit = conjugacy_residual(f, lift_critical(f))
    fam = {}
    for mu1 in (-0.05, -0.01):
        g = arnold_mu(mu1, tongue_point("golden", 1 + 2 * math.pi * mu1, 1e-13))
        fam[mu1] = conjugacy_residual(g, lift_family(g))
    scale = [critical_data(arnold(0.3, 1 + 2 * math.pi * m)).A / m for m in (-0.04, -0.02, -0.01)]
    spread = max(scale) / min(scale)
    ok = crit <= 1e-9 and max(fam.values()) <= 1e-6 and spread <= 1.2
    record(14, "triple round trips", ok,
           f"critical {crit:.1e}, family {max(fam.values()):.1e}, A/mu1 spread x{spread:.3f}", t0)


def test_criterion_15_smoothness_probe():
    t0 = time.time()
    synthetic = {s: analyze(*synthetic_curve(s)).estimated_k for s in (1.5, 2.05, 2.5)}
    synth_ok = all(k == math.floor(s) for s, k in synthetic.items())
    try:
        rep = probe("golden", j_max=14, tol=1e-10)
    except InconclusiveReport as exc:
        rep = exc.report
    d3 = rep.divided_diffs[3][-4:]
    real_ok = rep.bounded[2] and rep.growing[3]
    detail = (f"synthetic k {synthetic}; golden tongue: order-2 bounded {rep.bounded[2]}, "
              f"order-3 growing {rep.growing[3]} (last four {', '.join(f'{v:.4g}' for v in d3)}), "
              f"estimated k {rep.estimated_k}")
    record(15, "smoothness probe", synth_ok and real_ok, detail, t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
