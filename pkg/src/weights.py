# -*- coding: utf-8 -*-
"""
Weight functions
================

A weight w(ζ) is an everywhere positive continuous function on a domain Ω.
Built-in families:

    hyperbolic        w(ζ) = 1 - |ζ|²
    power(α), α > 0   w(ζ) = (1 - |ζ|²)^α
    constant(c), c>0  w(ζ) = c

plus weights parsed from the expression language in src.expr.

Positivity:
    evaluation raises PositivityError when w <= 1e-12. 1/w enters every
    integrand and supremum, and near-zero weights are boundary artifacts.
    At construction, 256 Halton points of the domain are spot-checked for a
    positive finite value; that catches sign errors without proving positivity.

Continuity of a parsed expression is the caller's responsibility; the
expression language cannot verify it.

CLI specifiers: "hyperbolic", "power:2.0", "constant:1", "expr:1-r^2".
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple

import numpy as np

from src import expr as _expr
from src.errors import (
    DomainError,
    ParameterError,
    PositivityError,
    UnknownNameError,
)
from src.geometry import as_point
from src.sampling import low_discrepancy_points, random_unit_vectors

logger = logging.getLogger(__name__)

POSITIVITY_THRESHOLD = 1e-12
SPOT_CHECK_POINTS = 256
BUILTIN_NAMES = ('hyperbolic', 'power', 'constant')

# re-exported: parsing belongs to the weights surface
parse_weight = _expr.parse_weight


def _hyperbolic(pts):
    return 1.0 - np.sum(pts * pts, axis=-1)


@dataclass(frozen=True, eq=False)
class Weight(object):
    """
    Positive weight on a domain.

    Use builtin_weight() or expression_weight() rather than the constructor.
    """
    name: str
    domain: object
    func: Callable = field(repr=False)
    params: Tuple[float, ...] = ()
    tree: Optional[object] = field(default=None, repr=False)
    threshold: float = POSITIVITY_THRESHOLD

    @property
    def label(self):
        if self.tree is not None:
            return 'expr:%s' % _expr.to_text(self.tree)
        if self.params:
            return '%s:%s' % (self.name, ','.join(repr(p) for p in self.params))
        return self.name

    def raw(self, points):
        """Unchecked vectorised values; invalid operations give nan/inf."""
        return np.asarray(self.func(np.asarray(points, dtype=float), False), dtype=float)

    def values(self, points):
        """
        Checked vectorised values at points of shape (..., m).

        Raises
        ------
        DomainError, PositivityError, WeightDomainError
        """
        pts = as_point(points, self.domain.dim)
        if not np.all(self.domain.contains(pts)):
            raise DomainError("weight evaluated outside its domain")
        vals = np.asarray(self.func(pts, True), dtype=float)
        bad = ~(np.isfinite(vals) & (vals > self.threshold))
        if np.any(bad):
            where = pts[bad][0] if pts.ndim > 1 else pts
            raise PositivityError(
                "weight %s is not > %g at %s" % (self.label, self.threshold, np.round(where, 12).tolist()))
        return vals

    def __call__(self, p):
        return eval_weight(self, p)


def eval_weight(w, p):
    """Value w(p) > 0 at a single point p of the domain."""
    return float(w.values(as_point(p, w.domain.dim)))


def _spot_check(w):
    pts = low_discrepancy_points(w.domain, SPOT_CHECK_POINTS, seed=0)
    vals = np.asarray(w.func(pts, True), dtype=float)
    bad = ~(np.isfinite(vals) & (vals > 0.0))
    if np.any(bad):
        raise PositivityError("weight %s is not positive at %s"
                              % (w.label, np.round(pts[bad][0], 12).tolist()))
    return w


def _params(parameters):
    if parameters is None:
        return ()
    if np.isscalar(parameters):
        return (float(parameters),)
    return tuple(float(p) for p in parameters)


def builtin_weight(name, parameters=None, domain=None):
    """
    Weight from a built-in family.

    Parameters
    ----------
    name : str
        'hyperbolic', 'power' (parameter α > 0) or 'constant' (parameter c > 0).
    parameters : float, sequence or None
    domain : src.geometry.Domain

    Raises
    ------
    UnknownNameError, ParameterError
    """
    if domain is None:
        raise ParameterError("a weight needs a domain")
    params = _params(parameters)
    if name == 'hyperbolic':
        if params:
            raise ParameterError("hyperbolic weight takes no parameters")
        w = Weight('hyperbolic', domain, lambda pts, strict: _hyperbolic(pts))
    elif name == 'power':
        if len(params) != 1:
            raise ParameterError("power weight takes exactly one exponent α")
        alpha = params[0]
        if not (alpha > 0.0) or not np.isfinite(alpha):
            raise ParameterError("power weight needs α > 0, got %r" % alpha)

        def func(pts, strict, alpha=alpha):
            base = _hyperbolic(pts)
            with np.errstate(invalid='ignore'):
                return np.power(base, alpha)
        w = Weight('power', domain, func, params=(alpha,))
    elif name == 'constant':
        if len(params) != 1:
            raise ParameterError("constant weight takes exactly one value c")
        c = params[0]
        if not (c > 0.0) or not np.isfinite(c):
            raise ParameterError("constant weight needs c > 0, got %r" % c)
        w = Weight('constant', domain, lambda pts, strict, c=c: np.full(pts.shape[:-1], c),
                   params=(c,))
    else:
        raise UnknownNameError("unknown builtin weight %r (expected one of %s)"
                               % (name, ', '.join(BUILTIN_NAMES)))
    return _spot_check(w)


def expression_weight(text, domain):
    """Weight given by an expression in the weight language."""
    tree = parse_weight(text, domain.dim)
    w = Weight('expr', domain, lambda pts, strict: _expr.evaluate(tree, pts, strict),
               tree=tree)
    return _spot_check(w)


def weight_from_spec(spec, domain):
    """
    Weight from a CLI specifier: 'hyperbolic', 'power:2.0', 'constant:1',
    'expr:1-r^2'.
    """
    spec = str(spec).strip()
    head, sep, tail = spec.partition(':')
    if head == 'expr':
        return expression_weight(tail, domain)
    if head in BUILTIN_NAMES:
        if not sep:
            return builtin_weight(head, None, domain)
        try:
            params = [float(x) for x in tail.split(',') if x.strip()]
        except ValueError:
            raise ParameterError("malformed weight parameters %r" % tail)
        return builtin_weight(head, params, domain)
    raise UnknownNameError("unknown weight specifier %r" % spec)


def is_radially_decreasing(w, rays=64, samples_per_ray=32, seed=0, rtol=1e-9):
    """
    Sampled check that w depends on |ζ| only and does not increase with it.

    Along `rays` random rays from the origin, values must be non-increasing;
    at equal radii, values on different rays must agree to `rtol`. This is
    a predicate for the min-weight kernel, not an invariant of Weight.
    """
    d = w.domain
    if not d.contains(np.zeros(d.dim)):
        return False
    rng = np.random.default_rng(int(seed))
    dirs = random_unit_vectors(rng, rays, d.dim)
    lo, hi = d.bounds
    rmax = float(np.max(np.abs(np.concatenate([lo, hi])))) * np.sqrt(d.dim)
    t = np.linspace(0.0, rmax, int(samples_per_ray) + 1)
    pts = t[None, :, None] * dirs[:, None, :]
    inside = np.asarray(d.contains(pts), dtype=bool)
    # keep the initial run of inside samples on every ray
    run = np.cumprod(inside, axis=1).astype(bool)
    n_common = int(np.min(np.sum(run, axis=1)))
    if n_common < 2:
        return False
    vals = w.raw(pts[:, :n_common, :])
    if not np.all(np.isfinite(vals)):
        return False
    scale = np.maximum(np.abs(vals), 1e-300)
    if np.any(np.diff(vals, axis=1) > rtol * scale[:, 1:]):
        return False
    spread = np.max(vals, axis=0) - np.min(vals, axis=0)
    return bool(np.all(spread <= rtol * np.max(scale, axis=0)))
