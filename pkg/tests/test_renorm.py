import math

import numpy as np
import pytest

from circlerenorm.circle_maps import arnold, rotation
from circlerenorm.errors import HypothesisViolated, InsufficientLevels, WrongBranch
from circlerenorm.renorm import (BRANCH_LONG, BRANCH_SHORT, branch_arcs, expansion_lower_bound,
                                 expansion_rates, return_map_derivative, smoothness_exponent)
from circlerenorm.tongues import tongue_point

from conftest import GOLDEN


@pytest.fixture(scope="module")
def sevens_map():
    return arnold(tongue_point("cf:7|1", 1.0, 1e-13), 1.0)


def test_rotation_derivative_is_return_time():
    f = rotation(GOLDEN)
    arcs, rn, rn1 = branch_arcs(f, 5)
    y = 0.5 * arcs[BRANCH_SHORT][0]
    assert return_map_derivative(f, 5, y, BRANCH_SHORT) == rn1.q
    y = 0.5 * arcs[BRANCH_LONG][1]
    assert return_map_derivative(f, 5, y, BRANCH_LONG) == rn.q + rn1.q


def test_critical_derivative_matches_finite_difference(critical_golden):
    arcs, *_ = branch_arcs(critical_golden, 6)
    for which in (BRANCH_SHORT, BRANCH_LONG):
        lo, hi = arcs[which]
        d, rel = return_map_derivative(critical_golden, 6, lo + 0.37 * (hi - lo), which, check=True)
        assert d > 0
        assert rel <= 1e-4


def test_random_derivatives_match_finite_difference(golden_tongue_a):
    rng = np.random.default_rng(7)
    for _ in range(20):
        b = float(rng.uniform(0.9, 1.0))
        f = arnold(golden_tongue_a(b), b)
        n = int(rng.integers(3, 8))
        which = BRANCH_SHORT if rng.random() < 0.5 else BRANCH_LONG
        lo, hi = branch_arcs(f, n)[0][which]
        y = float(lo + rng.uniform(0.05, 0.95) * (hi - lo))
        _, rel = return_map_derivative(f, n, y, which, check=True)
        assert rel <= 1e-4


def test_wrong_branch(critical_golden):
    arcs, *_ = branch_arcs(critical_golden, 6)
    y = 0.5 * sum(arcs[BRANCH_SHORT])
    with pytest.raises(WrongBranch):
        return_map_derivative(critical_golden, 6, y, BRANCH_LONG)
    with pytest.raises(ValueError):
        return_map_derivative(critical_golden, 6, y, "sideways")


def test_rotation_expansion_bound():
    f = rotation(GOLDEN)
    for n in (3, 6):
        eb = expansion_lower_bound(f, n)
        _, _, rn1 = branch_arcs(f, n)
        assert eb.min_P_prime == rn1.q
        assert eb.Mn_over_Jn == pytest.approx(1.0)


def test_critical_expansion_bound(critical_golden):
    bounds = [expansion_lower_bound(critical_golden, n) for n in range(4, 11)]
    ratios = [b.ratio for b in bounds]
    assert all(b.min_P_prime > 0 for b in bounds)
    assert max(ratios) / min(ratios) <= 10
    mins = [b.min_P_prime for b in bounds]
    assert all(x < y for x, y in zip(mins, mins[1:]))


def test_rotation_rates():
    est = expansion_rates(rotation(GOLDEN), 12)
    assert est.s == pytest.approx(GOLDEN, rel=1e-9)
    assert est.lambda1_proxy == pytest.approx(GOLDEN ** -3, rel=1e-8)


def test_critical_rates(critical_golden, sevens_map):
    est = expansion_rates(critical_golden, 14)
    assert est.k == 1
    assert math.log(est.lambda1_proxy) / math.log(est.lambda2_proxy) == pytest.approx(1.5, abs=1e-12)
    assert expansion_rates(sevens_map, 10).lambda1_proxy > est.lambda1_proxy


def test_rates_argument_checks():
    with pytest.raises(ValueError):
        expansion_rates(rotation(GOLDEN), 15)
    with pytest.raises(InsufficientLevels):
        expansion_rates(rotation(GOLDEN), 3)


def test_smoothness_exponent():
    assert smoothness_exponent(2.83, 1.66) == 2
    assert smoothness_exponent(8, 2) == 3
    for bad in ((2.0, 2.0), (1.5, 2.0), (3.0, 0.9)):
        with pytest.raises(HypothesisViolated):
            smoothness_exponent(*bad)
