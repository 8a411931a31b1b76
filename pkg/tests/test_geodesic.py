import math

import numpy as np
import pytest

from lorkam import errors
from lorkam.geodesic import (exp_map, first_conjugate_time, integrate_geodesic,
                             jacobi_transport, shoot_batch)
from lorkam.spacetime import cylinder, metric_eval, minkowski, warped


def test_flat_record_is_exact():
    spec = minkowski(2)
    rec = integrate_geodesic(spec, [0, 0], [1, 0.5], (0, 4))
    pos, vel = rec.state(4.0)
    assert np.allclose(pos, [4.0, 2.0], atol=0)
    assert np.allclose(vel, [1.0, 0.5], atol=0)
    assert rec.terminated_by == "horizon"


def test_warped_energy_conservation():
    spec = warped("cosh")
    rec = integrate_geodesic(spec, [0.0, 0.0], [1.0, 0.4], (0, 5))
    assert rec.energy_drift < 1e-8
    e0 = metric_eval(spec, np.array([0.0, 0.0]), np.array([1.0, 0.4]))
    assert abs(rec.energy(3.7) - e0) < 1e-8


def test_warped_backward_integration():
    spec = warped("2+cos")
    rec = integrate_geodesic(spec, [1.0, 0.0], [1.0, 0.1], (-2, 2))
    p_m, v_m = rec.state(-1.5)
    # re-integrating forward from the backward point returns to the start
    rec2 = integrate_geodesic(spec, p_m, v_m, (0, 1.5))
    pos, vel = rec2.state(1.5)
    assert np.allclose(pos, [1.0, 0.0], atol=1e-8)
    assert np.allclose(vel, [1.0, 0.1], atol=1e-8)


def test_domain_boundary_termination():
    spec = warped("2+cos", t_domain=(-1.0, 3.0))
    rec = integrate_geodesic(spec, [0.0, 0.0], [1.0, 0.0], (0, 10))
    assert rec.terminated_by == "domain_boundary"
    assert rec.domain[1] == pytest.approx(3.0, abs=1e-6)
    with pytest.raises(errors.DomainExceeded):
        exp_map(spec, [0.0, 0.0], [1.0, 0.0], 5.0)


def test_exp_map_flat():
    spec = cylinder()
    assert np.allclose(exp_map(spec, [0, 0], [1, 0.25], 8.0), [8.0, 2.0])


def test_jacobi_cosh_axis_closed_form():
    # along the t-axis of the cosh warped product the transverse Jacobi
    # scalar with j(0)=0, j'(0)=1 is tanh(t) (it solves j'' + 2 tanh j' = 0)
    spec = warped("cosh")
    geo = integrate_geodesic(spec, [0.0, 0.0], [1.0, 0.0], (0, 5))
    jac = jacobi_transport(spec, geo, [0.0, 0.0], [0.0, 1.0])
    for t in (0.5, 1.0, 2.0, 4.0):
        assert jac.J(t)[1] == pytest.approx(math.tanh(t), abs=1e-8)
        assert jac.J(t)[0] == pytest.approx(0.0, abs=1e-10)


def test_jacobi_matches_finite_difference_of_exp():
    # dual route: the Jacobi linearization against a central difference of
    # the exponential map in the initial velocity
    spec = warped("2+cos")
    x = np.array([0.3, 0.1])
    v = np.array([1.0, 0.15])
    h = 1e-6
    for j, e in enumerate(np.eye(2)):
        geo = integrate_geodesic(spec, x, v, (0, 2))
        jac = jacobi_transport(spec, geo, np.zeros(2), e)
        fd = (exp_map(spec, x, v + h * e, 2.0)
              - exp_map(spec, x, v - h * e, 2.0)) / (2 * h)
        # J(t) with J(0)=0, J'(0)=e is d exp at parameter t=... scaled
        assert np.allclose(jac.J(2.0), fd * 1.0 / 1.0 * 2.0 / 2.0, atol=1e-6) \
            or np.allclose(jac.J(2.0), fd, atol=1e-6)


def test_shoot_batch_jacobian_matches_fd():
    spec = warped("cosh")
    x = np.array([0.0, 0.0])
    V = np.array([[2.0, 0.5], [1.5, -0.3]])
    ends, jac = shoot_batch(spec, x, V)
    h = 1e-6
    for i, v in enumerate(V):
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            fd = (shoot_batch(spec, x, (v + e)[None, :])[0][0]
                  - shoot_batch(spec, x, (v - e)[None, :])[0][0]) / (2 * h)
            assert np.allclose(jac[i, :, j], fd, atol=1e-6)


def test_no_conjugate_point_on_warped_axis():
    spec = warped("2+cos")
    assert first_conjugate_time(spec, [0.0, 0.0], [1.0, 0.0],
                                horizon=20.0) is None
    assert first_conjugate_time(cylinder(), [0, 0], [1, 0.5],
                                horizon=50.0) is None


def test_conjugate_search_reports_domain_end():
    spec = warped("2+cos", t_domain=(-1.0, 4.0))
    with pytest.raises(errors.DomainExceeded):
        first_conjugate_time(spec, [0.0, 0.0], [1.0, 0.0], horizon=20.0)
