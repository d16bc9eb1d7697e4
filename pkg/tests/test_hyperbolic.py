# -*- coding: utf-8 -*-
"""
Unit tests for src/hyperbolic.py

Locks:
1) Closed-form values at reference points.
2) The Möbius identities and the sinh² form agree to 1e-10 relative.
3) The distance inequality and its scalar form never fail.
"""

import math

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from conftest import random_ball_points
from src.errors import DomainError, ParameterError
from src.hyperbolic import (
    bracket,
    hyperbolic_distance,
    lemma_bound,
    mobius,
    mobius_modulus,
    rho_from_origin,
    scalar_gap,
    sinh2_rho,
)


def test_distance_from_origin():
    assert hyperbolic_distance([0.0, 0.0], [0.5, 0.0]) == pytest.approx(0.5493061443, rel=1e-9)
    assert rho_from_origin([0.5, 0.0]) == pytest.approx(0.5 * math.log(3.0), rel=1e-14)


def test_reference_pair():
    z, e = [0.5, 0.0], [0.0, 0.5]
    assert bracket(z, e) == pytest.approx(1.0307764064, rel=1e-9)
    expected = math.atanh(math.sqrt(0.5) / math.sqrt(1.0625))
    assert hyperbolic_distance(z, e) == pytest.approx(expected, rel=1e-12)
    assert hyperbolic_distance(z, e) == pytest.approx(0.84035, rel=1e-5)


def test_distance_is_zero_iff_equal():
    assert hyperbolic_distance([0.3, -0.2], [0.3, -0.2]) == 0.0
    assert hyperbolic_distance([0.3, -0.2], [0.3, -0.2 + 1e-9]) > 0.0


def test_mobius_sends_base_to_origin_and_origin_to_minus_base():
    z = np.array([0.3, -0.4])
    assert np.allclose(mobius(z, z), [0.0, 0.0], atol=1e-16)
    assert np.allclose(mobius(z, [0.0, 0.0]), -z, rtol=1e-15)


def test_points_on_or_outside_the_sphere_are_rejected():
    with pytest.raises(DomainError):
        hyperbolic_distance([1.0, 0.0], [0.0, 0.0])
    with pytest.raises(DomainError):
        bracket([0.0, 0.0], [0.8, 0.8])


def test_scalar_gap_values():
    assert scalar_gap(0.0) == 0.0
    assert scalar_gap(0.5) == pytest.approx(0.5 / math.sqrt(0.75) - 0.5 * math.log(3.0), rel=1e-12)
    assert scalar_gap(0.5) == pytest.approx(0.028043, rel=1e-4)
    with pytest.raises(ParameterError):
        scalar_gap(1.0)
    with pytest.raises(ParameterError):
        scalar_gap(-0.1)


def test_scalar_gap_series_matches_direct_form():
    t = 1e-3
    direct = t / math.sqrt(1 - t * t) - math.atanh(t)
    assert scalar_gap(t * (1 - 1e-12)) == pytest.approx(direct, rel=1e-6)


def test_scalar_gap_is_nonnegative_and_increasing_on_a_grid():
    t = np.linspace(0.0, 0.999, 10000)
    g = scalar_gap(t)
    assert np.all(g >= 0.0)
    assert np.all(np.diff(g) >= 0.0)


def test_lemma_reference_value():
    lhs, rhs = lemma_bound([0.0, 0.0], [0.5, 0.0])
    assert lhs == pytest.approx(0.5 * math.log(3.0) * math.sqrt(0.75), rel=1e-12)
    assert rhs == 0.5


def test_identities_on_random_pairs(rng):
    for m in (2, 3):
        Z = random_ball_points(rng, 2000, m, 0.95)
        E = random_ball_points(rng, 2000, m, 0.95)
        d2 = np.sum((Z - E) ** 2, axis=1)
        br = bracket(Z, E)
        T = mobius(Z, E)
        modT = np.linalg.norm(T, axis=1)
        assert np.allclose(mobius_modulus(Z, E), np.sqrt(d2) / br, rtol=1e-10, atol=0)
        assert np.allclose(modT, np.sqrt(d2) / br, rtol=1e-10, atol=0)
        expected = (1 - np.sum(Z * Z, 1)) * (1 - np.sum(E * E, 1)) / br ** 2
        assert np.allclose(1 - modT ** 2, expected, rtol=1e-10, atol=0)
        rho = hyperbolic_distance(Z, E)
        assert np.allclose(np.sinh(rho) ** 2, sinh2_rho(Z, E), rtol=1e-10, atol=0)


def test_lemma_never_fails_on_random_pairs(rng):
    Z = random_ball_points(rng, 20000, 2, 0.95)
    E = random_ball_points(rng, 20000, 2, 0.95)
    lhs, rhs = lemma_bound(Z, E)
    assert np.all(lhs <= rhs)


def test_lemma_ratio_near_the_diagonal(rng):
    Z = random_ball_points(rng, 500, 2, 0.9)
    u = rng.normal(size=Z.shape)
    u /= np.linalg.norm(u, axis=1)[:, None]
    lhs, rhs = lemma_bound(Z, Z + 1e-4 * u)
    assert np.all(lhs / rhs >= 0.999)


@seed(7)
@settings(max_examples=300, deadline=None)
@given(
    st.tuples(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6)),
    st.tuples(st.floats(-0.6, 0.6), st.floats(-0.6, 0.6)),
)
def test_distance_is_symmetric_and_mobius_invariant(z, e):
    z, e = np.array(z), np.array(e)
    assert hyperbolic_distance(z, e) == pytest.approx(hyperbolic_distance(e, z), rel=1e-12, abs=1e-15)
    # T_z is an isometry: ρ(T_z z, T_z e) = ρ(0, T_z e) = ρ(z, e)
    assert rho_from_origin(mobius(z, e)) == pytest.approx(hyperbolic_distance(z, e), rel=1e-9, abs=1e-12)


def test_mobius_transforms_are_isometries(rng):
    A = random_ball_points(rng, 1000, 2, 0.9)
    Z = random_ball_points(rng, 1000, 2, 0.9)
    E = random_ball_points(rng, 1000, 2, 0.9)
    before = hyperbolic_distance(Z, E)
    after = hyperbolic_distance(mobius(A, Z), mobius(A, E))
    assert np.allclose(after, before, rtol=1e-9, atol=1e-12)


def test_mobius_isometry_in_three_dimensions(rng):
    A = random_ball_points(rng, 500, 3, 0.9)
    Z = random_ball_points(rng, 500, 3, 0.9)
    E = random_ball_points(rng, 500, 3, 0.9)
    assert np.allclose(hyperbolic_distance(mobius(A, Z), mobius(A, E)), hyperbolic_distance(Z, E),
                       rtol=1e-9, atol=1e-12)


def test_triangle_inequality_on_random_triples(rng):
    A = random_ball_points(rng, 10000, 2, 0.95)
    B = random_ball_points(rng, 10000, 2, 0.95)
    C = random_ball_points(rng, 10000, 2, 0.95)
    ab = hyperbolic_distance(A, B)
    assert np.all(ab <= hyperbolic_distance(A, C) + hyperbolic_distance(C, B) + 1e-12 * (1.0 + ab))
