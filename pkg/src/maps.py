# -*- coding: utf-8 -*-
"""
Smooth maps and the test-map catalog
====================================

A SmoothMap f: Ω ⊂ R^m → R^n carries a vectorised evaluator and, when the
closed form is known, an exact jacobian. Exact jacobians are checked against
central differences on 100 points when a catalog map is built.

Catalog (planar maps identify (x, y) with z = x + iy):

    identity(m)   f(ζ) = ζ
    poly(c0,c1..) f(z) = Σ c_k z^k,  complex coefficients
    mobius(ζ0)    f(η) = T_ζ0(η), unit ball automorphism
    atanh         f(z) = ½ log((1+z)/(1-z))
    colonna       f(z) = ((2/π) Arg((1+z)/(1-z)), 0)

Jacobians of holomorphic maps are [[a, -b], [b, a]] with f'(z) = a + ib.
The colonna map is harmonic, not holomorphic: its first component is
Im h with h = (2/π) log((1+z)/(1-z)), so its gradient is (Im h', Re h').

CLI specifiers: "identity", "poly:0,0,1" (coefficients as "re+imi" or bare
reals), "mobius:0.5,0", "atanh", "colonna".
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from src.errors import DimensionMismatchError, ParameterError, UnknownNameError
from src.geometry import as_point, unit_ball
from src.hyperbolic import mobius as _mobius

logger = logging.getLogger(__name__)

CATALOG = {
    'identity': 'f(ζ) = ζ on R^m',
    'poly': 'planar polynomial Σ c_k z^k; poly:c0,c1,... with c = re+imi or a real',
    'mobius': 'unit-ball automorphism T_ζ0; mobius:x1,...,xm with |ζ0| < 1',
    'atanh': 'planar ½ log((1+z)/(1-z)); Bloch semi-norm 1 for 1-|ζ|²',
    'colonna': 'harmonic (2/π)·Arg((1+z)/(1-z)) into (-1,1)×{0}; Bloch semi-norm 4/π',
}
JACOBIAN_CHECK_POINTS = 100
JACOBIAN_RTOL = 1e-5
FD_STEP = 1e-6


@dataclass(frozen=True, eq=False)
class SmoothMap(object):
    """
    Map R^m ⊃ Ω → R^n.

    evaluator : (k, m) array -> (k, n) array
    jacobian  : (k, m) array -> (k, n, m) array, or None
    differentiable : False marks a merely continuous map; estimators flag
        their results as outside the equality theorem's hypotheses.
    """
    dimension_in: int
    dimension_out: int
    evaluator: Callable = field(repr=False)
    jacobian: Optional[Callable] = field(default=None, repr=False)
    label: str = ''
    differentiable: bool = True

    def values(self, P):
        P = as_point(P, self.dimension_in)
        flat = P.reshape(-1, self.dimension_in)
        out = np.asarray(self.evaluator(flat), dtype=float).reshape(-1, self.dimension_out)
        return out.reshape(P.shape[:-1] + (self.dimension_out,))

    def jacobians(self, P):
        """Exact jacobians (..., n, m); None when no closed form is attached."""
        if self.jacobian is None:
            return None
        P = as_point(P, self.dimension_in)
        flat = P.reshape(-1, self.dimension_in)
        J = np.asarray(self.jacobian(flat), dtype=float)
        return J.reshape(P.shape[:-1] + (self.dimension_out, self.dimension_in))

    def __call__(self, p):
        return self.values(p)

    def scaled(self, c):
        c = float(c)
        ev, jac = self.evaluator, self.jacobian
        return SmoothMap(self.dimension_in, self.dimension_out, lambda P: c * ev(P),
                         None if jac is None else (lambda P: c * jac(P)),
                         '%r*%s' % (c, self.label), self.differentiable)

    def plus(self, other):
        if (other.dimension_in, other.dimension_out) != (self.dimension_in, self.dimension_out):
            raise DimensionMismatchError("cannot add maps of different shapes")
        f, g = self, other
        jac = None
        if f.jacobian is not None and g.jacobian is not None:
            jac = lambda P: f.jacobian(P) + g.jacobian(P)  # noqa: E731
        return SmoothMap(f.dimension_in, f.dimension_out,
                         lambda P: f.evaluator(P) + g.evaluator(P), jac,
                         '%s+%s' % (f.label, g.label), f.differentiable and g.differentiable)


def fd_jacobians(f, P, h=FD_STEP):
    """Central-difference jacobians (k, n, m) at stacked points, fixed step h."""
    P = np.atleast_2d(as_point(P, f.dimension_in))
    k, m = P.shape
    J = np.empty((k, f.dimension_out, m))
    for j in range(m):
        step = np.zeros(m)
        step[j] = h
        J[:, :, j] = (f.values(P + step) - f.values(P - step)) / (2.0 * h)
    return J


def validate_jacobian(f, domain, points=JACOBIAN_CHECK_POINTS, rtol=JACOBIAN_RTOL, seed=0,
                      margin=0.05):
    """
    Compare f's exact jacobian with central differences.

    Raises ParameterError when any entry differs by more than
    rtol·max(|J|, 1) at one of `points` low-discrepancy points of `domain`.
    """
    if f.jacobian is None:
        return f
    from src.sampling import low_discrepancy_points

    P = low_discrepancy_points(domain, points, seed=seed, margin=margin)
    J = f.jacobians(P)
    J_fd = fd_jacobians(f, P)
    scale = np.maximum(np.max(np.abs(J), axis=(1, 2)), 1.0)
    err = np.max(np.abs(J - J_fd), axis=(1, 2)) / scale
    worst = int(np.argmax(err))
    if err[worst] > rtol:
        raise ParameterError("jacobian of %s disagrees with finite differences by %.3g at %s"
                             % (f.label, err[worst], P[worst].tolist()))
    logger.debug("jacobian of %s verified, max relative error %.3g", f.label, err[worst])
    return f


def _complex(P):
    return P[:, 0] + 1j * P[:, 1]


def _planar(values):
    return np.stack([values.real, values.imag], axis=-1)


def _holomorphic_jacobian(deriv):
    a, b = deriv.real, deriv.imag
    return np.stack([np.stack([a, -b], axis=-1), np.stack([b, a], axis=-1)], axis=-2)


def identity_map(m=2):
    m = int(m)
    if m < 1:
        raise ParameterError("dimension must be >= 1")
    return SmoothMap(m, m, lambda P: P.copy(),
                     lambda P: np.broadcast_to(np.eye(m), (P.shape[0], m, m)).copy(),
                     'identity' if m == 2 else 'identity:%d' % m)


def poly_map(coefficients):
    """Planar polynomial with complex coefficients c0, c1, ... (lowest order first)."""
    c = np.asarray([complex(x) for x in coefficients], dtype=complex)
    if c.size == 0 or not np.all(np.isfinite(c)):
        raise ParameterError("poly needs at least one finite coefficient")
    high_first = c[::-1]
    deriv = np.polyder(high_first) if c.size > 1 else np.zeros(1, dtype=complex)
    label = 'poly:%s' % ','.join(_format_complex(x) for x in c)
    return SmoothMap(2, 2, lambda P: _planar(np.polyval(high_first, _complex(P))),
                     lambda P: _holomorphic_jacobian(np.polyval(deriv, _complex(P))), label)


def _format_complex(x):
    if x.imag == 0.0:
        return repr(float(x.real))
    return '%r%+ri' % (float(x.real), float(x.imag))


def mobius_map(base):
    """
    T_ζ0 with its exact jacobian.

    With d = ζ0 - η, N = -(1-|ζ0|²)d - |d|²ζ0 and D = |d|² + (1-|ζ0|²)(1-|η|²):
        DN = (1-|ζ0|²) I + 2 ζ0 d^T
        DD = -2 ζ0^T + 2|ζ0|² η^T
        J  = DN/D - N DD / D²
    """
    z0 = as_point(base)
    m = z0.shape[0]
    s = float(np.dot(z0, z0))
    if s >= 1.0:
        raise ParameterError("mobius base must satisfy |ζ0| < 1")

    def jac(P):
        d = z0[None, :] - P
        dd = np.sum(d * d, axis=1)
        D = dd + (1.0 - s) * (1.0 - np.sum(P * P, axis=1))
        N = -(1.0 - s) * d - dd[:, None] * z0[None, :]
        DN = (1.0 - s) * np.eye(m)[None, :, :] + 2.0 * z0[None, :, None] * d[:, None, :]
        DD = -2.0 * z0[None, :] + 2.0 * s * P
        return DN / D[:, None, None] - N[:, :, None] * DD[:, None, :] / (D * D)[:, None, None]

    label = 'mobius:%s' % ','.join(repr(float(x)) for x in z0)
    return SmoothMap(m, m, lambda P: _mobius(z0, P), jac, label)


def atanh_map():
    """½ log((1+z)/(1-z)) with derivative 1/(1-z²)."""
    return SmoothMap(2, 2, lambda P: _planar(np.arctanh(_complex(P))),
                     lambda P: _holomorphic_jacobian(1.0 / (1.0 - _complex(P) ** 2)), 'atanh')


def colonna_map():
    """(2/π)·Arg((1+z)/(1-z)) as a map into (-1,1)×{0}."""
    def ev(P):
        z = _complex(P)
        g = (2.0 / math.pi) * np.angle((1.0 + z) / (1.0 - z))
        return np.stack([g, np.zeros_like(g)], axis=-1)

    def jac(P):
        hp = (4.0 / math.pi) / (1.0 - _complex(P) ** 2)
        J = np.zeros((P.shape[0], 2, 2))
        J[:, 0, 0] = hp.imag
        J[:, 0, 1] = hp.real
        return J

    return SmoothMap(2, 2, ev, jac, 'colonna')


def catalog(name, parameters=None, dimension=2, domain=None):
    """
    Build a catalog map and verify its jacobian on `domain`.

    Parameters
    ----------
    name : str
        identity, poly, mobius, atanh or colonna.
    parameters : sequence or None
        Coefficients for poly, base point coordinates for mobius.
    dimension : int
        Dimension of identity.
    domain : src.geometry.Domain or None
        Where the jacobian is checked (default: unit ball of the map's dimension).

    Raises
    ------
    UnknownNameError, ParameterError
    """
    params = list(parameters or [])
    if name == 'identity':
        f = identity_map(int(params[0].real) if params else dimension)
    elif name == 'poly':
        f = poly_map(params)
    elif name == 'mobius':
        if not params:
            raise ParameterError("mobius needs a base point")
        f = mobius_map([float(np.real(x)) for x in params])
    elif name in ('atanh', 'atanh_map'):
        f = atanh_map()
    elif name in ('colonna', 'colonna_extremal'):
        f = colonna_map()
    else:
        raise UnknownNameError("unknown map %r (expected one of %s)"
                               % (name, ', '.join(sorted(CATALOG))))
    if domain is None or domain.dim != f.dimension_in:
        domain = unit_ball(f.dimension_in)
    return validate_jacobian(f, domain)


def _parse_coefficient(tok):
    text = tok.strip().replace(' ', '')
    if not text:
        raise ParameterError("empty coefficient")
    try:
        return complex(text.replace('i', 'j'))
    except ValueError:
        raise ParameterError("malformed coefficient %r" % tok)


def map_from_spec(spec, dimension=2, domain=None):
    """Map from a CLI specifier such as 'poly:0,0,1' or 'mobius:0.5,0'."""
    head, sep, tail = str(spec).strip().partition(':')
    params = [_parse_coefficient(t) for t in tail.split(',')] if sep and tail.strip() else []
    if head in ('mobius', 'identity'):
        for p in params:
            if p.imag != 0.0:
                raise ParameterError("%s takes real parameters" % head)
    return catalog(head, params, dimension, domain)
