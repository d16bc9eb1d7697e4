# -*- coding: utf-8 -*-
"""
Unit tests for src/kernels.py

Locks:
1) Built-in kernels take their closed-form values.
2) symmetrize() gives a symmetric kernel and is idempotent.
3) check_admissible() passes the built-in kernels and reports witnesses for
   kernels that break a condition on purpose.
"""

import math

import numpy as np
import pytest

from conftest import random_ball_points
from src.errors import DomainError, ParameterError, UnknownNameError
from src.geodesic import GeodesicOptions
from src.geometry import box
from src.kernels import (
    ClosedFormDistance,
    GeodesicDistance,
    canonical_kernel,
    check_admissible,
    custom_kernel,
    distance_provider,
    eval_kernel,
    geometric_mean_kernel,
    kernel_from_spec,
    min_weight_kernel,
    symmetrize,
)


@pytest.fixture
def closed(ball2):
    return ClosedFormDistance(ball2)


def test_canonical_kernel_closed_form_value(hyperbolic2, closed):
    k = canonical_kernel(hyperbolic2, distance=closed)
    assert eval_kernel(k, [0.0, 0.0], [0.5, 0.0]) == pytest.approx(0.910239, rel=1e-6)
    assert eval_kernel(k, [0.5, 0.0], [0.5, 0.0]) == 0.75


def test_canonical_kernel_numerical_distance(hyperbolic2):
    k = canonical_kernel(hyperbolic2, GeodesicOptions(control_points=9))
    assert eval_kernel(k, [0.0, 0.0], [0.5, 0.0]) == pytest.approx(0.5 / math.atanh(0.5), rel=1e-4)
    # the reversed pair hits the cache and the same ordered solve
    assert eval_kernel(k, [0.5, 0.0], [0.0, 0.0]) == eval_kernel(k, [0.0, 0.0], [0.5, 0.0])


def test_geodesic_distance_provider_caches_unordered_pairs(hyperbolic2):
    dist = GeodesicDistance(hyperbolic2, GeodesicOptions(control_points=5))
    v = dist([[0.0, 0.0], [0.5, 0.0]], [[0.5, 0.0], [0.0, 0.0]])
    assert v[0] == v[1]
    assert len(dist._cache) == 1


def test_min_and_geometric_mean_values(hyperbolic2, ball2):
    kmin = min_weight_kernel(hyperbolic2)
    assert eval_kernel(kmin, [0.5, 0.0], [0.0, 0.8]) == pytest.approx(0.36)
    kgm = geometric_mean_kernel(ball2)
    assert eval_kernel(kgm, [0.0, 0.0], [0.0, 0.0]) == 1.0
    assert eval_kernel(kgm, [0.5, 0.0], [0.0, 0.8]) == pytest.approx(math.sqrt(0.75 * 0.36))


def test_min_kernel_is_below_geometric_mean(hyperbolic2, ball2, rng):
    Z = random_ball_points(rng, 500, 2, 0.95)
    E = random_ball_points(rng, 500, 2, 0.95)
    assert np.all(min_weight_kernel(hyperbolic2).values(Z, E)
                  <= geometric_mean_kernel(ball2).values(Z, E))


def test_kernel_outside_domain(ball2):
    with pytest.raises(DomainError):
        eval_kernel(geometric_mean_kernel(ball2), [0.0, 0.0], [1.0, 0.0])


def test_geometric_mean_needs_the_ball():
    with pytest.raises(ParameterError):
        geometric_mean_kernel(box([0.0, 0.0], [1.0, 1.0]))
    with pytest.raises(ParameterError):
        ClosedFormDistance(box([0.0, 0.0], [1.0, 1.0]))


def test_symmetrize(ball2, hyperbolic2):
    def lopsided(Z, E):
        return 1.0 - np.sum(Z * Z, axis=-1)

    k = custom_kernel(ball2, lopsided, hyperbolic2)
    assert not k.symmetric
    s = symmetrize(k)
    z, e = [0.5, 0.0], [0.0, 0.8]
    assert eval_kernel(s, z, e) == eval_kernel(s, e, z) == 0.75
    assert symmetrize(s) is s
    builtin = geometric_mean_kernel(ball2)
    assert symmetrize(builtin) is builtin


def test_kernel_from_spec(hyperbolic2, closed):
    assert kernel_from_spec('geometric-mean', hyperbolic2).kind == 'geometric_mean'
    assert kernel_from_spec('min', hyperbolic2).kind == 'min_weight'
    assert kernel_from_spec('canonical', hyperbolic2, distance=closed).kind == 'canonical'
    with pytest.raises(UnknownNameError):
        kernel_from_spec('gaussian', hyperbolic2)


@pytest.mark.parametrize('name', ['geometric-mean', 'min', 'canonical'])
def test_builtin_kernels_are_admissible(name, hyperbolic2, closed):
    k = kernel_from_spec(name, hyperbolic2, distance=closed)
    report = check_admissible(k, hyperbolic2, closed, sample_pairs=300)
    assert report.passed, report.to_dict()
    assert report.skipped_pairs == 0
    assert report.samples_used > 300


def test_doubled_kernel_breaks_diagonal_and_distance_conditions(ball2, hyperbolic2, closed):
    k = geometric_mean_kernel(ball2).scaled(2.0)
    report = check_admissible(k, hyperbolic2, closed, sample_pairs=300)
    assert report.verdict == {'W1': 'pass', 'W2': 'fail', 'W3': 'pass', 'W4': 'fail'}
    witness = report.w2_violations[0]
    assert witness['k_zz'] == pytest.approx(2.0 * witness['w_z'])
    assert len(report.w4_violations) <= 100
    assert report.violation_counts['W4'] >= len(report.w4_violations)


def test_kernel_with_a_low_diagonal_limit_breaks_liminf(ball2, hyperbolic2, closed):
    def func(Z, E):
        wz = 1.0 - np.sum(Z * Z, axis=-1)
        we = 1.0 - np.sum(E * E, axis=-1)
        return np.where(np.all(Z == E, axis=-1), wz, 0.5 * np.minimum(wz, we))

    k = custom_kernel(ball2, func, hyperbolic2, 'half_off_diagonal')
    report = check_admissible(k, hyperbolic2, closed, sample_pairs=200)
    assert report.verdict['W3'] == 'fail'
    assert report.verdict['W2'] == 'pass'
    assert report.w3_violations[0]['min_ratio'] == pytest.approx(0.5, rel=1e-2)
    assert not report.passed


def test_check_admissible_argument_errors(ball2, hyperbolic2, closed):
    k = geometric_mean_kernel(ball2)
    with pytest.raises(ParameterError):
        check_admissible(k, hyperbolic2, closed, sample_pairs=0)
    with pytest.raises(ParameterError):
        check_admissible(k, hyperbolic2, closed, liminf_radii=(1e-3, 1e-2))


def test_report_is_deterministic(ball2, hyperbolic2, closed):
    k = geometric_mean_kernel(ball2).scaled(1.5)
    a = check_admissible(k, hyperbolic2, closed, sample_pairs=200, seed=4).to_dict()
    b = check_admissible(k, hyperbolic2, closed, sample_pairs=200, seed=4).to_dict()
    assert a == b


def test_numerical_canonical_kernel_meets_the_distance_bound(hyperbolic2, closed, rng):
    # W4 product with the exact ρ measures the solver error of the kernel
    k = canonical_kernel(hyperbolic2, GeodesicOptions(control_points=17))
    Z = random_ball_points(rng, 12, 2, 0.9)
    E = random_ball_points(rng, 12, 2, 0.9)
    sep = np.linalg.norm(Z - E, axis=1)
    product = closed(Z, E) * k.values(Z, E)
    assert np.max(np.abs(product - sep) / sep) <= 1e-3


def test_numerical_canonical_kernel_is_admissible(hyperbolic2, closed):
    k = canonical_kernel(hyperbolic2, GeodesicOptions(control_points=9))
    report = check_admissible(k, hyperbolic2, closed, sample_pairs=40, sphere_samples=8,
                              liminf_points=4)
    assert report.passed, report.to_dict()
    ratios = [p['min_ratio'] for p in report.liminf_profile]
    assert [p['radius'] for p in report.liminf_profile] == [1e-2, 1e-3, 1e-4]
    # the diagonal limit rises toward w(z)
    assert ratios[0] < ratios[1] < ratios[2]
    assert ratios[2] >= 0.99


def test_min_weight_kernel_with_geodesic_distances(hyperbolic2):
    dist = GeodesicDistance(hyperbolic2, GeodesicOptions(control_points=9))
    report = check_admissible(min_weight_kernel(hyperbolic2), hyperbolic2, dist, sample_pairs=60)
    assert report.verdict == {'W1': 'pass', 'W2': 'pass', 'W3': 'pass', 'W4': 'pass'}
    assert report.tolerances['W4'] == 1e-3
    assert report.skipped_pairs == 0


def test_distance_provider_kinds(hyperbolic2):
    closed = distance_provider('closed_form', hyperbolic2)
    assert closed.exact and closed.label == 'closed_form'
    numeric = distance_provider('geodesic', hyperbolic2, GeodesicOptions(control_points=9))
    assert not numeric.exact and numeric.label == 'geodesic'
    a, b = np.array([[0.0, 0.0]]), np.array([[0.5, 0.0]])
    assert numeric(a, b)[0] == pytest.approx(closed(a, b)[0], rel=1e-3)
    with pytest.raises(ParameterError):
        distance_provider('chordal', hyperbolic2)
