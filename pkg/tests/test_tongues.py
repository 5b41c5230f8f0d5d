import math

import numpy as np
import pytest

from circlerenorm import _kernels
from circlerenorm.cf_arith import GOLDEN, parse_alpha
from circlerenorm.circle_maps import arnold
from circlerenorm.errors import DegenerateTip
from circlerenorm.rotation import rot_compare
from circlerenorm.tongues import (TongueCurve, parabolic_orbit, rational_boundary, staircase,
                                  tongue_curve, tongue_point, tongue_sample)

from conftest import GOLDEN as GAMMA, SILVER

TWO_PI = 2 * math.pi


@pytest.mark.parametrize("spec, alpha", [("golden", GAMMA), ("silver", SILVER)])
def test_tongue_at_zero_coupling_is_alpha(spec, alpha):
    assert tongue_point(spec, 0.0, 1e-12) == pytest.approx(alpha, abs=1e-11)


def test_tongue_sample_is_certified():
    pt = tongue_sample("golden", 0.5, 1e-10)
    assert pt.residual <= 1e-10
    assert pt.rot_lo <= pt.rot_hi
    # the midpoint need not carry rotation exactly gamma, but it is within tol of it
    assert float(pt.rot_lo) - 1e-10 <= GAMMA <= float(pt.rot_hi) + 1e-10
    assert pt.a_lo <= pt.a <= pt.a_hi


def test_tongue_symmetry_under_reflection():
    tol = 1e-10
    one_minus = parse_alpha("cf:2,1|1")  # 1 - gamma = gamma^2
    for b in (0.3, 0.8, 1.0):
        assert abs(tongue_point(GOLDEN, b, tol) - (1 - tongue_point(one_minus, b, tol))) <= 2 * tol


def test_tongue_rejects_bad_b():
    with pytest.raises(ValueError):
        tongue_point("golden", 1.2)


def test_tongue_curve_ordering():
    curve = tongue_curve("golden", [0.9, 0.1, 0.5], tol=1e-9)
    assert [row[0] for row in curve.samples] == [0.1, 0.5, 0.9]
    with pytest.raises(ValueError):
        TongueCurve(GOLDEN, [(0.5, 0.6, 0.0), (0.4, 0.6, 0.0)])


@pytest.mark.parametrize("b", [0.1, 0.5, 0.9])
def test_zero_plateau_closed_form(b):
    lo, hi = rational_boundary(0, 1, b)
    assert abs(lo + b / TWO_PI) <= 1e-8
    assert abs(hi - b / TWO_PI) <= 1e-8


def test_zero_plateau_width():
    lo, hi = rational_boundary(0, 1, 0.5)
    assert hi - lo == pytest.approx(0.5 / math.pi, abs=1e-8)


def test_half_plateau_midpoint_is_certified():
    lo, hi = rational_boundary(1, 2, 0.5)
    assert rot_compare(arnold(0.5 * (lo + hi), 0.5), 1, 2) == 0
    assert lo < 0.5 < hi


def test_plateau_edges_are_sharp():
    p, q, b = 1, 3, 0.8
    lo, hi = rational_boundary(p, q, b)
    assert rot_compare(arnold(lo + 1e-9, b), p, q) == 0
    assert rot_compare(arnold(hi - 1e-9, b), p, q) == 0
    assert rot_compare(arnold(lo - 1e-6, b), p, q) == -1
    assert rot_compare(arnold(hi + 1e-6, b), p, q) == 1


def test_degenerate_tip():
    with pytest.raises(DegenerateTip):
        rational_boundary(0, 1, 1e-14)


def test_boundary_argument_checks():
    with pytest.raises(ValueError):
        rational_boundary(2, 4, 0.5)
    with pytest.raises(ValueError):
        rational_boundary(0, 1, 0.0)


def test_staircase_identity_at_zero_coupling():
    for a, res in staircase(0.0, np.linspace(0, 1, 11)):
        assert res.contains(a, slack=1e-12)


def test_staircase_zero_plateau_edges():
    grid = np.linspace(-0.2, 0.2, 401)
    flat = [a for a, r in staircase(0.5, grid) if r.exact and r.lower == 0]
    assert min(flat) == pytest.approx(-0.5 / TWO_PI, abs=1e-3)
    assert max(flat) == pytest.approx(0.5 / TWO_PI, abs=1e-3)


def test_staircase_monotone():
    rows = staircase(0.5, np.linspace(0, 1, 2000), q_cap=50)
    for (_, r1), (_, r2) in zip(rows, rows[1:]):
        assert r1.lower <= r2.upper
        assert r1.upper <= r2.upper or r2.exact or r1.upper - r2.upper < 0.05


def test_parabolic_orbit_solves_unit_multiplier_system():
    f = arnold(0.25, 0.7)  # just below the 1/4 plateau
    orb = parabolic_orbit(f, 1, 4)
    g = f.shifted(orb.shift)
    c0, r, s = g._arrays
    d, jx, *_ = _kernels.boundary_jets(np.array([orb.x0]), 4, c0, r, s)
    assert abs(d[0] - 1) <= 1e-10
    assert abs(jx[0] - 1) <= 1e-6
    assert rot_compare(g, 1, 4) == 0


def test_parabolic_orbit_refuses_plateau_maps():
    with pytest.raises(ValueError):
        parabolic_orbit(arnold(0.5, 0.7), 1, 2)
