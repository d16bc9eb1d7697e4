# -*- coding: utf-8 -*-
"""
Unit-ball hyperbolic machinery
==============================

Closed forms on the unit ball B^m that serve as the oracle for the numerical
geodesic solver.

Bracket:
    [ζ,η]² = 1 - 2<ζ,η> + |ζ|²|η|² = |ζ-η|² + (1-|ζ|²)(1-|η|²)

Möbius transform (the displayed representative; the orthogonal factor it is
defined up to does not change |T_ζη| or ρ):
    T_ζ(η) = [ -(1-|ζ|²)(ζ-η) - |ζ-η|² ζ ] / [ζ,η]²

Identities:
    |T_ζη| = |ζ-η| / [ζ,η]
    1 - |T_ζη|² = (1-|ζ|²)(1-|η|²) / [ζ,η]²
    ρ(ζ,η) = atanh |T_ζη|,     ρ(0,ω) = ½ log((1+|ω|)/(1-|ω|))
    sinh² ρ(ζ,η) = |ζ-η|² / ((1-|ζ|²)(1-|η|²))

Lemma:
    ρ(ζ,η) √(1-|ζ|²) √(1-|η|²) <= |ζ-η|
with scalar form ½ log((1+t)/(1-t)) <= t / √(1-t²), 0 <= t < 1.

All functions are vectorised over stacked points of shape (..., m).

Implementation Notes
--------------------
- The bracket is evaluated in its sum-of-squares form, which stays accurate
  when both points approach the sphere.
- atanh is evaluated as ½(log1p(t) - log1p(-t)); the quotient form loses
  digits near t = 1.
- Points with norm in [1-1e-9, 1) are accepted and logged as a warning.
"""

from __future__ import annotations

import logging

import numpy as np

from src.errors import DimensionMismatchError, DomainError, ParameterError

logger = logging.getLogger(__name__)

NEAR_BOUNDARY = 1e-9


def _ball_points(*points):
    out = []
    for p in points:
        arr = np.asarray(p, dtype=float)
        if arr.ndim == 0:
            arr = arr.reshape(1)
        out.append(arr)
    m = out[0].shape[-1]
    for arr in out[1:]:
        if arr.shape[-1] != m:
            raise DimensionMismatchError("points of different dimension")
    for arr in out:
        if not np.all(np.isfinite(arr)):
            raise ParameterError("point coordinates must be finite")
        sq = np.sum(arr * arr, axis=-1)
        if np.any(sq >= 1.0):
            raise DomainError("point on or outside the unit sphere")
        if np.any(sq >= (1.0 - NEAR_BOUNDARY) ** 2):
            logger.warning("point within %g of the unit sphere; results lose precision",
                           NEAR_BOUNDARY)
    return out


def _dot(a, b):
    return np.sum(a * b, axis=-1)


def _atanh(t):
    return 0.5 * (np.log1p(t) - np.log1p(-t))


def _scalar(x):
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _bracket_sq(z, e):
    d = z - e
    return _dot(d, d) + (1.0 - _dot(z, z)) * (1.0 - _dot(e, e))


def bracket(z, e):
    """[z,e] = √(1 - 2<z,e> + |z|²|e|²); always >= 1 - |z||e| > 0."""
    z, e = _ball_points(z, e)
    return _scalar(np.sqrt(_bracket_sq(z, e)))


def mobius(base, e):
    """T_base(e); maps base to 0 and the ball onto itself."""
    z, e = _ball_points(base, e)
    d = z - e
    num = -(1.0 - _dot(z, z))[..., None] * d - _dot(d, d)[..., None] * z
    return num / _bracket_sq(z, e)[..., None]


def mobius_modulus(z, e):
    """|T_z e| = |z-e| / [z,e]."""
    z, e = _ball_points(z, e)
    d = z - e
    return _scalar(np.sqrt(_dot(d, d) / _bracket_sq(z, e)))


def hyperbolic_distance(z, e):
    """ρ(z,e) = atanh |T_z e|; 0 iff z = e."""
    z, e = _ball_points(z, e)
    d = z - e
    t = np.sqrt(_dot(d, d) / _bracket_sq(z, e))
    return _scalar(_atanh(t))


def rho_from_origin(w):
    """ρ(0,ω) = ½ log((1+|ω|)/(1-|ω|))."""
    (w,) = _ball_points(w)
    return _scalar(_atanh(np.sqrt(_dot(w, w))))


def sinh2_rho(z, e):
    """sinh² ρ(z,e) from the closed form |z-e|² / ((1-|z|²)(1-|e|²))."""
    z, e = _ball_points(z, e)
    d = z - e
    return _scalar(_dot(d, d) / ((1.0 - _dot(z, z)) * (1.0 - _dot(e, e))))


def scalar_gap(t):
    """
    t/√(1-t²) - ½ log((1+t)/(1-t)) for 0 <= t < 1.

    Nonnegative, zero only at t = 0, increasing in t. Below t = 1e-3 the
    series t³/6 + 7t⁵/40 + 19t⁷/112 replaces the cancelling difference.
    """
    t = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(t)) or np.any(t < 0.0) or np.any(t >= 1.0):
        raise ParameterError("scalar_gap needs 0 <= t < 1")
    small = t < 1e-3
    with np.errstate(divide='ignore', invalid='ignore'):
        direct = t / np.sqrt(1.0 - t * t) - _atanh(t)
    t2 = t * t
    series = t * t2 * (1.0 / 6.0 + t2 * (7.0 / 40.0 + t2 * (19.0 / 112.0)))
    return _scalar(np.where(small, series, direct))


def lemma_bound(z, e):
    """
    (lhs, rhs) = (ρ(z,e)·√(1-|z|²)√(1-|e|²), |z-e|); contract lhs <= rhs.
    """
    z, e = _ball_points(z, e)
    d = z - e
    rho = _atanh(np.sqrt(_dot(d, d) / _bracket_sq(z, e)))
    lhs = rho * np.sqrt(1.0 - _dot(z, z)) * np.sqrt(1.0 - _dot(e, e))
    rhs = np.sqrt(_dot(d, d))
    return _scalar(lhs), _scalar(rhs)
