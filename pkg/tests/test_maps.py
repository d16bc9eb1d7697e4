# -*- coding: utf-8 -*-
"""
Unit tests for src/maps.py

Locks:
1) Catalog maps evaluate to their closed forms.
2) Exact jacobians agree with central differences; a wrong one is rejected.
3) CLI specifiers parse complex coefficients and reject malformed ones.
"""

import math

import numpy as np
import pytest

from src.errors import DimensionMismatchError, ParameterError, UnknownNameError
from src.geometry import unit_ball
from src.maps import (
    SmoothMap,
    atanh_map,
    catalog,
    colonna_map,
    fd_jacobians,
    identity_map,
    map_from_spec,
    mobius_map,
    poly_map,
    validate_jacobian,
)


def test_identity():
    f = identity_map(3)
    p = np.array([0.1, -0.2, 0.3])
    assert np.array_equal(f(p), p)
    assert np.array_equal(f.jacobians(p), np.eye(3))


def test_poly_square():
    f = map_from_spec('poly:0,0,1')
    assert f([0.5, 0.0]) == pytest.approx([0.25, 0.0])
    assert f([0.0, 0.5]) == pytest.approx([-0.25, 0.0])
    # f'(z) = 2z: at z = 0.5i the jacobian is [[0, -1], [1, 0]]
    assert np.allclose(f.jacobians([0.0, 0.5]), [[0.0, -1.0], [1.0, 0.0]])


def test_poly_complex_coefficients():
    f = map_from_spec('poly:0,1i')
    assert f([0.5, 0.0]) == pytest.approx([0.0, 0.5])
    g = map_from_spec('poly:1+2i')
    assert g([0.3, 0.3]) == pytest.approx([1.0, 2.0])
    assert np.allclose(g.jacobians([0.3, 0.3]), 0.0)


def test_atanh_values():
    f = atanh_map()
    assert f([0.5, 0.0]) == pytest.approx([math.atanh(0.5), 0.0])
    assert f([0.0, 0.5])[1] == pytest.approx(math.atan(0.5))


def test_colonna_values():
    f = colonna_map()
    assert f([0.3, 0.0]) == pytest.approx([0.0, 0.0], abs=1e-15)
    assert f([0.0, 0.5])[0] == pytest.approx(4.0 / math.pi * math.atan(0.5))
    assert np.allclose(f.jacobians([0.0, 0.0]), [[0.0, 4.0 / math.pi], [0.0, 0.0]])


def test_mobius_map_sends_base_to_origin():
    f = mobius_map([0.5, 0.0])
    assert np.allclose(f([0.5, 0.0]), 0.0, atol=1e-16)
    assert np.allclose(f([0.0, 0.0]), [-0.5, 0.0])
    with pytest.raises(ParameterError):
        mobius_map([0.8, 0.8])


@pytest.mark.parametrize('name', ['identity', 'poly:1,-2,0.5,1i', 'mobius:0.3,-0.4', 'atanh', 'colonna'])
def test_exact_jacobians_match_finite_differences(name):
    f = map_from_spec(name)
    P = np.array([[0.1, 0.2], [-0.5, 0.3], [0.6, -0.6]])
    assert np.allclose(f.jacobians(P), fd_jacobians(f, P), rtol=1e-5, atol=1e-6)


def test_mobius_in_three_dimensions():
    f = map_from_spec('mobius:0.2,0.1,-0.3')
    assert f.dimension_in == 3
    P = np.array([[0.1, 0.0, 0.2], [-0.4, 0.3, 0.1]])
    assert np.allclose(f.jacobians(P), fd_jacobians(f, P), rtol=1e-5, atol=1e-6)


def test_wrong_jacobian_is_rejected():
    f = SmoothMap(2, 2, lambda P: P.copy(), lambda P: np.broadcast_to(2.0 * np.eye(2), (P.shape[0], 2, 2)),
                  'bad')
    with pytest.raises(ParameterError):
        validate_jacobian(f, unit_ball(2))


def test_scaled_and_plus():
    f = identity_map(2)
    g = map_from_spec('poly:0,0,1')
    h = f.scaled(3.0).plus(g)
    p = np.array([0.5, 0.0])
    assert h(p) == pytest.approx([1.75, 0.0])
    assert np.allclose(h.jacobians(p), 3.0 * np.eye(2) + g.jacobians(p))
    with pytest.raises(DimensionMismatchError):
        f.plus(identity_map(3))


def test_catalog_names_and_errors():
    assert catalog('identity').label == 'identity'
    assert catalog('colonna_extremal').label == 'colonna'
    with pytest.raises(UnknownNameError):
        map_from_spec('banana')
    with pytest.raises(ParameterError):
        map_from_spec('poly:a,b')
    with pytest.raises(ParameterError):
        map_from_spec('mobius:0.5i,0')
    with pytest.raises(ParameterError):
        map_from_spec('mobius')
