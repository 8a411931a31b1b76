import math

import numpy as np
import pytest

from lorkam import errors, oracles
from lorkam.cutlocus import (classify_cut, cut_time, in_future_aubry, is_nu)
from lorkam.spacetime import cylinder, minkowski, warped


@pytest.mark.parametrize("w", [0.2, 0.5, 0.8])
def test_cut_time_matches_winding_law(w):
    spec = cylinder()
    res = cut_time(spec, [0, 0], [1.0, w], horizon=64.0)
    assert res.status == "finite"
    assert res.alpha == pytest.approx(oracles.cylinder_cut_time(w), abs=1e-4)


def test_null_cut_time_is_pi():
    spec = cylinder()
    res = cut_time(spec, [0, 0], [1.0, 1.0], horizon=16.0)
    assert res.status == "finite"
    assert res.alpha == pytest.approx(math.pi, abs=1e-4)


def test_axis_and_flat_directions_reach_horizon():
    assert cut_time(cylinder(), [0, 0], [1.0, 0.0],
                    horizon=32.0).status == "horizon"
    assert cut_time(minkowski(2), [0, 0], [1.0, 0.5],
                    horizon=1000.0).status == "horizon"


def test_cut_time_rejects_bad_directions():
    spec = cylinder()
    with pytest.raises(errors.NotTimelike):
        cut_time(spec, [0, 0], [1.0, 2.0])
    with pytest.raises(errors.NotTimelike):
        cut_time(spec, [0, 0], [-1.0, 0.0])


def test_classification_on_cylinder_is_multi_geodesic():
    spec = cylinder()
    cls = classify_cut(spec, [0, 0], [1.0, 0.5])
    assert cls.kind == "multiple_maximizers"
    assert cls.multiplicity == 2
    assert cls.alpha == pytest.approx(2 * math.pi, abs=1e-4)
    # the cut point itself sits on the opposite meridian
    assert abs(((cls.cut_point[1] - math.pi) % (2 * math.pi))) < 1e-3


def test_classify_requires_finite_cut():
    with pytest.raises(ValueError):
        classify_cut(minkowski(2), [0, 0], [1.0, 0.0], horizon=8.0)


def test_aubry_statuses():
    spec = cylinder()
    v_axis = np.array([1.0, 0.0])
    assert in_future_aubry(spec, [0, 0], v_axis).status == \
        "in_aubry_up_to_horizon"
    verdict = in_future_aubry(spec, [0, 0], np.array([1.0, 0.4]))
    assert verdict.status == "not_in_aubry"
    assert verdict.alpha == pytest.approx(math.pi / 0.4, abs=1e-3)
    slab = warped("2+cos", t_domain=(-1.0, 6.0))
    assert in_future_aubry(slab, [0, 0], v_axis).status == "domain_incomplete"


def test_is_nu_detects_the_singular_set():
    spec = cylinder()
    on = is_nu(spec, [0, 0], [5.0, math.pi])
    assert on.in_nu and on.multiplicity == 2
    off = is_nu(spec, [0, 0], [5.0, 1.0])
    assert not off.in_nu and off.multiplicity == 1
    # null-related pair is excluded from the timelike variant
    nul = is_nu(spec, [0, 0], [1.0, 1.0])
    assert not nul.in_nu
    unrelated = is_nu(spec, [0, 0], [-1.0, 0.0])
    assert not unrelated.in_nu
