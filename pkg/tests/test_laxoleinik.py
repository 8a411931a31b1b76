import math

import numpy as np
import pytest

from lorkam import errors, oracles
from lorkam.cutlocus import is_nu
from lorkam.laxoleinik import (LOOptions, f_bar, f_map, regularized_value,
                               sandwich_check, value_field)
from lorkam.spacetime import cylinder, minkowski


CYL = cylinder()
X0 = np.array([0.0, 0.0])


def test_sandwich_on_and_off_crease():
    for y in ([5.0, math.pi], [5.0, 1.0], [3.0, -2.0]):
        rep = sandwich_check(CYL, 1.05, 0.05, X0, np.array(y))
        assert rep.lower_ok and rep.upper_ok
        assert rep.lower <= rep.value + 1e-12
        assert rep.value <= rep.upper + 1e-7


def test_regularized_value_beats_grid_oracle():
    # dual route: the polished search against a dense brute-force grid
    t, s = 1.05, 0.05
    y = np.array([5.0, math.pi - 0.1])
    rv = regularized_value(CYL, t, s, X0, y)
    radius = 10.0 * math.sqrt(s)
    lower = oracles.brute_force_regularized(t, s, X0, y, radius, n=121)
    assert rv.value >= lower - 1e-9
    # the grid refines toward the same sup: stay within its resolution
    assert rv.value - lower < 5e-3


def test_smoothing_lands_on_crease_and_in_nu():
    sm = f_map(CYL, 0.05, X0, np.array([5.0, math.pi]))
    assert abs(sm.z[1] - math.pi) < 1e-6
    assert sm.z[0] > 5.0
    assert is_nu(CYL, X0, sm.z).in_nu


def test_smoothing_near_crease_pulls_to_crease():
    sm = f_map(CYL, 0.05, X0, np.array([5.0, math.pi - 0.05]))
    assert abs(sm.z[1] - math.pi) < 1e-6


def test_f_bar_zero_budget_is_identity():
    y = np.array([5.0, 1.0])
    out = f_bar(CYL, 0.0, X0, y)
    assert np.array_equal(out.z, y)
    assert out.s == 0.0


def test_f_bar_step_budget_schedule():
    out = f_bar(CYL, 0.5, X0, np.array([5.0, math.pi]), eps=1.0)
    # s = tau * min(s_max, (eps/C0)^2) = 0.5 * min(0.1, 0.01)
    assert out.s == pytest.approx(0.005)
    with pytest.raises(ValueError):
        f_bar(CYL, 1.5, X0, np.array([5.0, math.pi]))


def test_verify_nu_flag():
    opts = LOOptions(verify_nu=True)
    sm = f_map(CYL, 0.05, X0, np.array([5.0, math.pi]), opts)
    assert sm.nu_checked
    # a target far from the crease smooths to a unique-maximizer point
    with pytest.raises(errors.NUCheckFailed):
        f_map(CYL, 0.01, X0, np.array([5.0, 0.5]), opts)


def test_search_boundary_reported_not_truncated():
    # a tiny search constant pins the argmax to the ball boundary
    opts = LOOptions(C0=0.5)
    with pytest.raises(errors.SearchBoundaryHit):
        regularized_value(CYL, 1.05, 0.05, X0, np.array([5.0, math.pi]), opts)


def test_requires_causal_pair_and_valid_window():
    with pytest.raises(errors.NotCausallyRelated):
        regularized_value(CYL, 1.05, 0.05, X0, np.array([-3.0, 0.0]))
    with pytest.raises(ValueError):
        regularized_value(CYL, 0.05, 0.05, X0, np.array([5.0, 1.0]))


def test_value_field_is_consistent_with_pointwise():
    ys = np.array([[5.0, 1.0], [5.0, math.pi], [4.0, -2.0], [-2.0, 0.0]])
    vals = value_field(CYL, 1.05, 0.05, X0, ys)
    assert np.isnan(vals[3])
    for i in range(3):
        rv = regularized_value(CYL, 1.05, 0.05, X0, ys[i])
        assert vals[i] <= rv.value + 1e-12
        assert rv.value - vals[i] < 1e-2


def test_minkowski_dim3_regularization():
    spec = minkowski(3)
    x = np.zeros(3)
    y = np.array([4.0, 1.0, 0.5])
    rep = sandwich_check(spec, 1.05, 0.05, x, y)
    assert rep.lower_ok and rep.upper_ok
