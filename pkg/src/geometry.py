# -*- coding: utf-8 -*-
"""
Points, domains and piecewise-linear paths
==========================================

The substrate shared by every other module.

Points are numpy float arrays of shape (m,); stacked points have shape (..., m).
A Domain is one of

    unit_ball(m)                      |ζ| < 1
    box(lower, upper)                 lower < ζ < upper componentwise
    predicate(m, test, inner_radius)  caller-supplied open, path-connected set

Path cost is the composite Gauss–Legendre approximation of

    ∫_γ |dω| / w(ω)

over a polyline γ, with n nodes per segment (default 8).

Notes:
- Predicate domains must be open and path-connected. This cannot be checked
  and is a documented obligation of the caller. The membership test is
  vectorised: it receives an array of shape (k, m) and returns k booleans.
- The inner-radius hint of a predicate domain bounds finite-difference steps
  and sets the pitch of the geodesic solver's grid seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from src.errors import DimensionMismatchError, DomainError, ParameterError

DEFAULT_QUADRATURE = 8


def as_point(p, dim=None):
    """Coerce p to a finite float array of shape (m,) (or (..., m))."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.shape[-1] < 1:
        raise ParameterError("a point needs at least one coordinate")
    if not np.all(np.isfinite(arr)):
        raise ParameterError("point coordinates must be finite")
    if dim is not None and arr.shape[-1] != int(dim):
        raise DimensionMismatchError(
            "point of dimension %d used in a dimension-%d context" % (arr.shape[-1], dim))
    return arr


def norm(p):
    """Euclidean norm along the last axis; 0 iff p is the zero vector."""
    return np.linalg.norm(np.asarray(p, dtype=float), axis=-1)


@dataclass(frozen=True, eq=False)
class Domain(object):
    """
    Open domain in R^m.

    Parameters
    ----------
    kind : str
        'unit_ball', 'box' or 'predicate'.
    dim : int
        Dimension m.
    lower, upper : ndarray
        Box corners; for a predicate domain, a bounding box of the set.
    test : callable or None
        Vectorised membership test of a predicate domain.
    inner_radius_hint : float or None
        Radius of a ball known to fit around typical interior points.
    """
    kind: str
    dim: int
    lower: np.ndarray = field(default=None)
    upper: np.ndarray = field(default=None)
    test: Optional[Callable] = field(default=None, repr=False)
    inner_radius_hint: Optional[float] = None

    @property
    def convex(self):
        return self.kind in ('unit_ball', 'box')

    @property
    def inner_radius(self):
        if self.kind == 'unit_ball':
            return 1.0
        if self.kind == 'box':
            return 0.5 * float(np.min(self.upper - self.lower))
        return float(self.inner_radius_hint)

    @property
    def bounds(self):
        """Bounding box (lower, upper) of the domain."""
        if self.kind == 'unit_ball':
            return -np.ones(self.dim), np.ones(self.dim)
        return self.lower.copy(), self.upper.copy()

    def _check_dim(self, pts):
        if pts.shape[-1] != self.dim:
            raise DimensionMismatchError(
                "point of dimension %d tested against a dimension-%d domain"
                % (pts.shape[-1], self.dim))

    def contains(self, p):
        """True iff p lies in the open domain (vectorised over leading axes)."""
        pts = np.asarray(p, dtype=float)
        if pts.ndim == 0:
            pts = pts.reshape(1)
        self._check_dim(pts)
        finite = np.all(np.isfinite(pts), axis=-1)
        if self.kind == 'unit_ball':
            inside = np.sum(pts * pts, axis=-1) < 1.0
        elif self.kind == 'box':
            inside = np.all((pts > self.lower) & (pts < self.upper), axis=-1)
        else:
            flat = pts.reshape(-1, self.dim)
            inside = np.asarray(self.test(flat), dtype=bool).reshape(pts.shape[:-1])
            inside &= np.all((pts > self.lower) & (pts < self.upper), axis=-1)
        out = finite & inside
        if out.ndim == 0:
            return bool(out)
        return out

    def contains_shrunk(self, p, margin):
        """Membership in the domain shrunk by `margin`."""
        pts = np.asarray(p, dtype=float)
        self._check_dim(pts)
        margin = float(margin)
        if self.kind == 'unit_ball':
            out = np.sqrt(np.sum(pts * pts, axis=-1)) < 1.0 - margin
        elif self.kind == 'box':
            out = np.all((pts > self.lower + margin) & (pts < self.upper - margin), axis=-1)
        else:
            # axis samples at distance `margin` stand in for a boundary distance
            out = self.contains(pts)
            for j in range(self.dim):
                step = np.zeros(self.dim)
                step[j] = margin
                out = out & self.contains(pts + step) & self.contains(pts - step)
        if np.ndim(out) == 0:
            return bool(out)
        return out


def unit_ball(m):
    m = int(m)
    if m < 1:
        raise ParameterError("dimension must be >= 1")
    return Domain(kind='unit_ball', dim=m)


def box(lower, upper):
    lo = as_point(lower)
    hi = as_point(upper)
    if lo.shape != hi.shape:
        raise DimensionMismatchError("box corners differ in dimension")
    if not np.all(lo < hi):
        raise DomainError("box lower corner must be below the upper corner componentwise")
    return Domain(kind='box', dim=lo.shape[0], lower=lo, upper=hi)


def predicate_domain(m, test, inner_radius, lower, upper):
    """
    Domain given by a vectorised membership test.

    The set must be open and path-connected; that is the caller's obligation.
    """
    lo = as_point(lower, m)
    hi = as_point(upper, m)
    if not np.all(lo < hi):
        raise DomainError("bounding box lower corner must be below the upper corner")
    if not (inner_radius > 0.0):
        raise ParameterError("inner_radius hint must be positive")
    return Domain(kind='predicate', dim=int(m), lower=lo, upper=hi, test=test,
                  inner_radius_hint=float(inner_radius))


def contains(d, p):
    """Membership test for a single point; raises on dimension mismatch."""
    return d.contains(as_point(p))


@dataclass(frozen=True, eq=False)
class Path(object):
    """Polyline through ordered control points (endpoints first and last)."""
    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2:
            raise ParameterError("a path needs at least two control points")
        if not np.all(np.isfinite(pts)):
            raise ParameterError("path control points must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, 'points', pts)

    @property
    def dim(self):
        return self.points.shape[1]

    def __len__(self):
        return self.points.shape[0]

    def reversed(self):
        return Path(self.points[::-1])

    def concat(self, other):
        """Join two paths; other must start where self ends."""
        if not np.array_equal(self.points[-1], other.points[0]):
            raise ParameterError("paths do not share the junction point")
        return Path(np.vstack([self.points, other.points[1:]]))

    def euclidean_length(self):
        return float(np.sum(norm(np.diff(self.points, axis=0))))

    def to_list(self):
        return self.points.tolist()


def segment(a, b):
    return Path(np.vstack([as_point(a), as_point(b)]))


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """
    Gauss–Legendre nodes and weights mapped to [0, 1].

    The weights sum to 1, so a constant integrand is integrated exactly.
    """
    n = int(n)
    if n < 2:
        raise ParameterError("quadrature needs at least 2 nodes per segment")
    x, w = np.polynomial.legendre.leggauss(n)
    t = 0.5 * (x + 1.0)
    wt = 0.5 * w
    t.setflags(write=False)
    wt.setflags(write=False)
    return t, wt


def segment_costs(A, B, w, n=DEFAULT_QUADRATURE, strict=True):
    """
    Costs ∫_[a,b] |dω| / w(ω) for stacked segments.

    Parameters
    ----------
    A, B : ndarray, shape (k, m)
        Segment start and end points.
    w : src.weights.Weight
    n : int
        Gauss–Legendre nodes per segment.
    strict : bool
        If True, nodes outside the domain raise DomainError and nonpositive
        weights raise PositivityError. If False, such segments cost +inf.

    Returns
    -------
    ndarray, shape (k,)
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    t, wt = gauss_legendre(n)
    diff = B - A
    lengths = norm(diff)
    nodes = A[:, None, :] + t[None, :, None] * diff[:, None, :]
    inside = w.domain.contains(nodes)
    if strict:
        if not np.all(inside):
            raise DomainError("path leaves the domain of the weight")
        vals = w.values(nodes)
        return lengths * np.sum(wt[None, :] / vals, axis=1)

    safe = np.where(inside[..., None], nodes, 0.0)
    with np.errstate(all='ignore'):
        vals = w.raw(safe)
        ok = inside & np.isfinite(vals) & (vals > w.threshold)
        inv = np.where(ok, 1.0 / np.where(ok, vals, 1.0), np.inf)
        costs = lengths * np.sum(wt[None, :] * inv, axis=1)
    # zero-length segments cost nothing even when nodes sit on the boundary
    return np.where(lengths == 0.0, 0.0, costs)


def path_cost(path, w, quadrature_points_per_segment=DEFAULT_QUADRATURE):
    """
    Composite quadrature approximation of ∫_γ |dω| / w(ω).

    Parameters
    ----------
    path : Path
    w : src.weights.Weight
    quadrature_points_per_segment : int
        Gauss–Legendre nodes per segment (>= 2).

    Raises
    ------
    DomainError
        A control point or quadrature node lies outside the weight's domain.
    PositivityError
        The weight is <= 1e-12 at a quadrature node.
    """
    if path.dim != w.domain.dim:
        raise DimensionMismatchError("path and weight differ in dimension")
    pts = path.points
    if not np.all(w.domain.contains(pts)):
        raise DomainError("path control point outside the domain")
    A, B = pts[:-1], pts[1:]
    keep = np.any(A != B, axis=1)
    if not np.any(keep):
        return 0.0
    costs = segment_costs(A[keep], B[keep], w, quadrature_points_per_segment, strict=True)
    return math.fsum(costs.tolist())


def segment_inside(d, a, b, samples=16):
    """True iff endpoints and `samples` interior points of [a,b] lie in d."""
    a = as_point(a, d.dim)
    b = as_point(b, d.dim)
    if not (d.contains(a) and d.contains(b)):
        return False
    if d.convex:
        return True
    t = np.linspace(0.0, 1.0, int(samples) + 2)[1:-1]
    inner = a[None, :] + t[:, None] * (b - a)[None, :]
    return bool(np.all(d.contains(inner)))
