import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorkam import errors, spacetime as sp


def test_wrap_angle_representative():
    assert sp.wrap_angle(math.pi) == math.pi
    assert sp.wrap_angle(-math.pi) == math.pi
    assert abs(sp.wrap_angle(3 * math.pi + 0.1) - (-math.pi + 0.1)) < 1e-12
    arr = sp.wrap_angle(np.array([0.0, 2 * math.pi, -math.pi]))
    assert np.allclose(arr, [0.0, 0.0, math.pi])


@pytest.mark.parametrize("v,expected", [
    ((1.0, 0.0), sp.CausalClass.FUTURE_TIMELIKE),
    ((1.0, 1.0), sp.CausalClass.FUTURE_NULL),
    ((-1.0, 0.5), sp.CausalClass.PAST_TIMELIKE),
    ((-1.0, -1.0), sp.CausalClass.PAST_NULL),
    ((0.3, 1.0), sp.CausalClass.SPACELIKE),
    ((0.0, 0.0), sp.CausalClass.ZERO),
])
def test_causal_class_minkowski(v, expected):
    spec = sp.minkowski(2)
    assert sp.causal_class(spec, np.zeros(2), np.array(v)) is expected


def test_causal_class_warped_scales_null_cone():
    spec = sp.warped("2+cos")
    x = np.array([0.0, 0.0])  # a(0) = 3, null slope 1/3
    assert sp.causal_class(spec, x, np.array([1.0, 1 / 3])) is \
        sp.CausalClass.FUTURE_NULL
    assert sp.causal_class(spec, x, np.array([1.0, 0.3])) is \
        sp.CausalClass.FUTURE_TIMELIKE
    assert sp.causal_class(spec, x, np.array([1.0, 0.4])) is \
        sp.CausalClass.SPACELIKE


@given(vt=st.floats(0.2, 3.0), frac=st.floats(0.01, 0.95),
       sgn=st.sampled_from([-1.0, 1.0]))
@settings(max_examples=60, deadline=None)
def test_legendre_round_trip_cylinder(vt, frac, sgn):
    spec = sp.cylinder()
    x = np.zeros(2)
    v = np.array([vt, sgn * frac * vt])
    p = sp.legendre(spec, x, v)
    v2 = sp.legendre_inverse(spec, x, p)
    assert np.max(np.abs(v2 - v)) < 1e-10 * (1 + vt)
    h = sp.hamiltonian(spec, x, p)
    assert abs(h - 0.5 * math.sqrt(sp.lorentz_norm(spec, x, v))) < 1e-10


def test_legendre_rejects_null():
    spec = sp.minkowski(2)
    with pytest.raises(errors.NotTimelike):
        sp.legendre(spec, np.zeros(2), np.array([1.0, 1.0]))


def test_lagrangian_values():
    spec = sp.minkowski(2)
    x = np.zeros(2)
    assert sp.lagrangian(spec, x, np.array([1.0, 0.0])) == -1.0
    assert sp.lagrangian(spec, x, np.array([1.0, 1.0])) == 0.0
    assert sp.lagrangian(spec, x, np.array([0.0, 1.0])) == math.inf


def test_config_round_trip():
    for spec in (sp.minkowski(3), sp.cylinder(winding_bound=5),
                 sp.warped("cosh", t_domain=(-2.0, 2.0))):
        cfg = sp.spec_to_config(spec)
        spec2 = sp.spec_from_config(cfg)
        assert spec2.kind == spec.kind
        assert spec2.dim == spec.dim
        assert spec2.winding_bound == spec.winding_bound
        assert spec2.t_domain == spec.t_domain


def test_domain_check():
    spec = sp.warped("2+cos", t_domain=(-1.0, 6.0))
    spec.check_domain(np.array([0.0, 0.0]))
    with pytest.raises(errors.DomainError):
        spec.check_domain(np.array([6.0, 0.0]))
    with pytest.raises(errors.DomainError):
        spec.check_domain(np.array([7.0, 0.0]))


def test_tabulated_profile_matches_formula():
    ts = np.linspace(-3, 3, 400)
    prof = sp.tabulated_profile(ts, np.cosh(ts))
    assert abs(float(prof.a(1.0)) - math.cosh(1.0)) < 1e-8
    assert abs(float(prof.da(1.0)) - math.sinh(1.0)) < 1e-5
    with pytest.raises(ValueError):
        sp.tabulated_profile([0, 1], [1.0, -1.0])


def test_christoffel_warped():
    spec = sp.warped("cosh")
    x = np.array([0.7, 0.0])
    a = math.cosh(0.7)
    da = math.sinh(0.7)
    gam = sp.christoffel(spec, x)
    assert abs(gam[0, 1, 1] - a * da) < 1e-12
    assert abs(gam[1, 0, 1] - da / a) < 1e-12
    dgam = sp.christoffel_t_derivative(spec, x)
    assert abs(dgam[0, 1, 1] - (da * da + a * a)) < 1e-12
