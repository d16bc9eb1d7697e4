# -*- coding: utf-8 -*-
"""
Unit tests for src/geodesic.py

Locks:
1) The solver reproduces the closed-form hyperbolic distance.
2) Values are symmetric, never exceed the straight segment, and do not
   grow when the control-point count is doubled.
3) Non-convex domains fall back to a grid-graph seed.
"""

import math

import numpy as np
import pytest

from src.errors import DomainError, ParameterError
from src.geodesic import (
    GeodesicOptions,
    geodesic_distance,
    geodesic_distances,
    level_schedule,
    straight_or_min_cost,
)
from src.geometry import box, path_cost, predicate_domain, unit_ball
from src.hyperbolic import hyperbolic_distance
from src.weights import builtin_weight


@pytest.fixture
def hyp():
    return builtin_weight('hyperbolic', None, unit_ball(2))


def _annulus():
    def test(p):
        r = np.linalg.norm(p, axis=-1)
        return (r > 0.2) & (r < 1.0)
    return predicate_domain(2, test, 0.1, [-1.0, -1.0], [1.0, 1.0])


def test_equal_endpoints_give_zero(hyp):
    res = geodesic_distance(hyp, [0.3, 0.1], [0.3, 0.1])
    assert res.value == 0.0
    assert res.converged


def test_radial_segment_matches_atanh(hyp):
    res = geodesic_distance(hyp, [0.0, 0.0], [0.5, 0.0])
    assert res.value == pytest.approx(math.atanh(0.5), rel=1e-4)
    assert res.converged
    assert res.flags == ()


def test_constant_weight_gives_scaled_euclidean_distance():
    w = builtin_weight('constant', 2.0, box([0.0, 0.0], [1.0, 1.0]))
    res = geodesic_distance(w, [0.1, 0.2], [0.7, 0.9], GeodesicOptions(control_points=9))
    assert res.value == pytest.approx(math.hypot(0.6, 0.7) / 2.0, rel=1e-9)


def test_off_axis_pair_matches_closed_form(hyp):
    pairs = [([0.5, 0.0], [0.0, 0.5]), ([-0.3, 0.4], [0.6, 0.1]), ([0.1, -0.7], [-0.2, 0.2])]
    for a, b in pairs:
        res = geodesic_distance(hyp, a, b)
        exact = hyperbolic_distance(a, b)
        assert res.value == pytest.approx(exact, rel=1e-3)
        # polyline cost is an upper bound up to quadrature error
        assert res.value >= exact * (1.0 - 1e-6)


def test_geodesic_is_at_most_the_straight_segment(hyp):
    a, b = [0.5, 0.0], [0.0, 0.5]
    straight = straight_or_min_cost(hyp, a, b)
    res = geodesic_distance(hyp, a, b)
    assert res.value <= straight + 1e-12
    assert straight - res.value > 1e-3


def test_straight_cost_respects_min_weight_bound(hyp):
    a, b = np.array([0.5, 0.0]), np.array([0.0, 0.8])
    bound = np.linalg.norm(a - b) / min(hyp(a), hyp(b))
    assert straight_or_min_cost(hyp, a, b) <= bound


def test_symmetry(hyp):
    a, b = [0.2, -0.6], [-0.5, 0.3]
    opts = GeodesicOptions(control_points=17)
    ab = geodesic_distance(hyp, a, b, opts).value
    ba = geodesic_distance(hyp, b, a, opts).value
    assert ab == pytest.approx(ba, rel=1e-6)


def test_doubling_control_points_does_not_increase_value(hyp):
    a, b = [0.6, 0.0], [-0.1, 0.6]
    v9 = geodesic_distance(hyp, a, b, GeodesicOptions(control_points=9)).value
    v17 = geodesic_distance(hyp, a, b, GeodesicOptions(control_points=17)).value
    assert v17 <= v9 + 1e-8


def test_level_schedule():
    assert level_schedule(2) == [2]
    assert level_schedule(3) == [3]
    assert level_schedule(33) == [3, 5, 9, 17, 33]
    assert level_schedule(20) == [3, 5, 9, 17, 20]


def test_path_reports_its_own_cost(hyp):
    res = geodesic_distance(hyp, [0.5, 0.0], [0.0, 0.5], GeodesicOptions(control_points=9))
    assert len(res.path) == 9
    assert path_cost(res.path, hyp, 16) == pytest.approx(res.value, rel=1e-14)
    out = res.to_dict()
    assert out['converged'] is True
    assert len(out['path']) == 9


def test_non_convex_domain_uses_grid_seed():
    w = builtin_weight('constant', 1.0, _annulus())
    res = geodesic_distance(w, [-0.5, 0.0], [0.5, 0.0])
    assert 'flag_grid_seed' in res.flags
    # around the hole: two tangents plus the arc of radius 0.2 between them
    tangent = math.sqrt(0.5 ** 2 - 0.2 ** 2)
    arc = 0.2 * (math.pi - 2.0 * math.acos(0.2 / 0.5))
    assert res.value == pytest.approx(2.0 * tangent + arc, rel=2e-2)


def test_straight_cost_rejects_segments_leaving_the_domain():
    w = builtin_weight('constant', 1.0, _annulus())
    with pytest.raises(DomainError):
        straight_or_min_cost(w, [-0.5, 0.0], [0.5, 0.0])


def test_endpoint_outside_domain(hyp):
    with pytest.raises(DomainError):
        geodesic_distance(hyp, [0.0, 0.0], [1.2, 0.0])


def test_batch_distances_mark_failures_with_nan(hyp):
    Z = np.array([[0.0, 0.0], [0.0, 0.0]])
    E = np.array([[0.5, 0.0], [0.0, 0.5]])
    vals = geodesic_distances(hyp, Z, E, GeodesicOptions(control_points=5), threads=2)
    assert vals == pytest.approx([math.atanh(0.5)] * 2, rel=1e-4)
    out = geodesic_distances(hyp, [[0.0, 0.0]], [[1.5, 0.0]], GeodesicOptions(control_points=5))
    assert math.isnan(out[0])


def test_options_validation():
    with pytest.raises(ParameterError):
        GeodesicOptions(control_points=1)
    with pytest.raises(ParameterError):
        GeodesicOptions(max_iterations=0)
    with pytest.raises(ParameterError):
        GeodesicOptions(step_tolerance=0.0)
    with pytest.raises(ParameterError):
        GeodesicOptions(quadrature=1)


def test_triangle_inequality(hyp):
    opts = GeodesicOptions(control_points=17)
    triples = [([0.1, 0.2], [0.6, -0.3], [-0.2, -0.5]),
               ([-0.7, 0.1], [0.5, 0.5], [0.0, 0.1]),
               ([0.3, 0.3], [0.35, 0.25], [0.8, 0.0])]
    for a, b, c in triples:
        ab = geodesic_distance(hyp, a, b, opts).value
        ac = geodesic_distance(hyp, a, c, opts).value
        cb = geodesic_distance(hyp, c, b, opts).value
        assert ab <= ac + cb + 1e-5


def test_oracle_in_three_dimensions(ball3):
    w = builtin_weight('hyperbolic', None, ball3)
    a, b = [0.4, -0.2, 0.3], [-0.3, 0.5, 0.1]
    res = geodesic_distance(w, a, b, GeodesicOptions(control_points=17))
    assert res.value == pytest.approx(hyperbolic_distance(a, b), rel=1e-3)
