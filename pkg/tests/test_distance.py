import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lorkam import errors, oracles
from lorkam.distance import (ConnectOptions, action_cost, connect,
                             curve_action, lorentz_distance, relation,
                             relation_d_batch, superdiff_action)
from lorkam.geodesic import integrate_geodesic
from lorkam.spacetime import cylinder, minkowski, warped


def test_cylinder_crease_pair():
    spec = cylinder()
    ms = connect(spec, [0, 0], [4, math.pi])
    assert ms.rel == "chronological"
    assert ms.d == pytest.approx(math.sqrt(16 - math.pi ** 2), abs=1e-12)
    assert ms.multiplicity == 2
    assert sorted(m.winding for m in ms.maximizers) == [-1, 0]


def test_cylinder_generic_pair_unique():
    spec = cylinder()
    ms = connect(spec, [0, 0], [4, 1])
    assert ms.multiplicity == 1
    assert ms.d == pytest.approx(math.sqrt(15), abs=1e-12)


def test_minkowski_relations():
    spec = minkowski(2)
    assert relation(spec, [0, 0], [2, 1]) == "chronological"
    assert relation(spec, [0, 0], [1, 1]) == "null"
    assert relation(spec, [0, 0], [1, 2]) == "none"
    assert relation(spec, [0, 0], [-1, 0]) == "none"
    with pytest.raises(errors.NotCausallyRelated):
        connect(spec, [0, 0], [0, 3])
    assert lorentz_distance(spec, [0, 0], [0, 3]) == 0.0


@given(t0=st.floats(-3, 3), th0=st.floats(-3, 3),
       dt=st.floats(-1, 8), dth=st.floats(-7, 7))
@settings(max_examples=150, deadline=None)
def test_connect_matches_winding_oracle(t0, th0, dt, dth):
    spec = cylinder()
    x = np.array([t0, th0])
    y = x + np.array([dt, dth])
    rel_o, d_o, mult_o, _ = oracles.winding_distance(x, y)
    try:
        ms = connect(spec, x, y)
    except errors.NotCausallyRelated:
        assert rel_o == "none"
        return
    assert rel_o != "none"
    if rel_o == "chronological" and ms.rel == "chronological":
        assert abs(ms.d - d_o) < 1e-8
        assert ms.multiplicity == mult_o


def test_warped_endpoint_residual():
    spec = warped("2+cos")
    x = np.array([0.0, 0.0])
    y = np.array([3.0, 0.7])
    ms = connect(spec, x, y)
    a0 = float(spec.profile.a(0.0))
    for m in ms.maximizers:
        ray = integrate_geodesic(spec, x, m.v0, (0, 1))
        assert np.allclose(ray.position(1.0), y, atol=1e-8)
        q = -m.v0[0] ** 2 + a0 * a0 * m.v0[1] ** 2
        assert m.length == pytest.approx(math.sqrt(-q), abs=1e-9)


def test_warped_symmetric_pair_two_maximizers():
    # theta -> -theta mirror symmetry ties the windings 0 and -1 exactly
    spec = warped("2+cos")
    ms = connect(spec, [0.0, 0.0], [6.0, math.pi])
    assert ms.rel == "chronological"
    assert ms.multiplicity == 2
    lengths = [m.length for m in ms.maximizers]
    assert lengths[0] == pytest.approx(lengths[1], rel=1e-7)


def test_relation_d_batch_grid():
    spec = cylinder()
    ths = np.linspace(-3, 3, 21)
    ts = np.linspace(0.5, 6, 21)
    grid = np.stack(np.meshgrid(ts, ths, indexing="ij"), axis=-1)
    d, rel = relation_d_batch(spec, np.zeros(2), grid)
    assert d.shape == (21, 21)
    sample = grid[7, 3]
    ms = connect(spec, np.zeros(2), sample)
    assert d[7, 3] == pytest.approx(ms.d, abs=1e-12)


def test_action_cost_law():
    spec = cylinder()
    d = math.sqrt(16 - 1)
    for t in (0.5, 1.0, 2.0):
        c = action_cost(spec, t, [0, 0], [4, 1])
        assert c == pytest.approx(-math.sqrt(t) * math.sqrt(d), abs=1e-12)
    assert action_cost(spec, 1.0, [0, 0], [-2, 0]) == math.inf


def test_curve_action_of_maximizer_matches_cost():
    spec = cylinder()
    x = np.array([0.0, 0.0])
    y = np.array([4.0, 1.0])
    ms = connect(spec, x, y)
    ray = integrate_geodesic(spec, x, ms.maximizers[0].v0, (0, 1))
    t = 2.0
    pa = curve_action(spec, lambda s: ray.position(s / t), (0.0, t))
    assert pa == pytest.approx(action_cost(spec, t, x, y), abs=1e-7)


def test_superdiff_jump_at_crease():
    spec = cylinder()
    qs = superdiff_action(spec, 1.0, [0, 0], [5.0, math.pi])
    assert len(qs) == 2
    jump = abs(qs[0][1] - qs[1][1])
    d = math.sqrt(25 - math.pi ** 2)
    expected = 2 * (math.pi / 2) * (25 - math.pi ** 2) ** -0.75
    assert jump == pytest.approx(expected, rel=1e-10)
    # smooth point: single covector matching the finite difference
    qs1 = superdiff_action(spec, 1.0, [0, 0], [5.0, 1.0])
    assert len(qs1) == 1
    h = 1e-6
    fd = (action_cost(spec, 1.0, [0, 0], [5.0, 1.0 + h])
          - action_cost(spec, 1.0, [0, 0], [5.0, 1.0 - h])) / (2 * h)
    assert qs1[0][1] == pytest.approx(fd, abs=1e-8)


def test_winding_interior_guard():
    spec = cylinder(winding_bound=1)
    # maximizing winding would be k = -1 = -K: flagged, not silently wrong
    with pytest.raises(errors.SearchBoundaryHit):
        connect(spec, [0, 0], [8.0, 2 * math.pi - 0.5])


def test_seeded_determinism_warped():
    spec = warped("2+cos")
    a = connect(spec, [0, 0], [3, 0.7], ConnectOptions(seed=5))
    b = connect(spec, [0, 0], [3, 0.7], ConnectOptions(seed=5))
    assert np.array_equal(a.maximizers[0].v0, b.maximizers[0].v0)
