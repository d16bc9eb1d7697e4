# -*- coding: utf-8 -*-
"""
Admissible kernels
==================

A kernel W(ζ,η) is admissible for a weight w when

    W1  W(ζ,η) = W(η,ζ)
    W2  W(ζ,ζ) = w(ζ)
    W3  liminf_{η→ζ} W(ζ,η) >= w(ζ)
    W4  d_w(ζ,η) · W(ζ,η) <= |ζ-η|

Built-in kinds:

    canonical(w)       |ζ-η| / d_w(ζ,η) off the diagonal, w(ζ) on it
    geometric_mean     √(1-|ζ|²) √(1-|η|²)     (unit ball, hyperbolic weight)
    min_weight(w)      min{w(ζ), w(η)}         (w radially decreasing, Ω convex)
    custom(evaluator)  anything; symmetrize() makes it satisfy W1

check_admissible() tests W1-W4 on sampled pairs and reports witnesses. It never
raises on a violation: breaking a condition on purpose is a legitimate use.

W3 cannot be decided from finitely many radii. A point z is a violation when
the deficit 1 - min_u W(z, z+r·u)/w(z) at the smallest radius exceeds the
tolerance and has not shrunk relative to the largest radius at least like
√(r_min / r_max). A kernel that is continuous on the diagonal passes; a kernel
whose diagonal limit stays below w fails.

Distance providers
------------------
ClosedFormDistance   ρ(ζ,η) on the unit ball (exact)
GeodesicDistance     numerical d_w from src.geodesic (cached per unordered pair)

Both return NaN for pairs they cannot evaluate; callers count those as skipped.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional

import numpy as np

from src.errors import (
    DomainError,
    GeodesicError,
    ParameterError,
    PositivityError,
    UnknownNameError,
)
from src.geodesic import GeodesicOptions, geodesic_distances
from src.geometry import as_point, norm
from src.hyperbolic import hyperbolic_distance
from src.parallel import map_chunks
from src.sampling import (
    DEFAULT_MARGIN,
    NEAR_DIAGONAL,
    Sampler,
    low_discrepancy_points,
    random_unit_vectors,
)
from src.weights import builtin_weight, is_radially_decreasing

logger = logging.getLogger(__name__)

KERNEL_KINDS = ('canonical', 'geometric_mean', 'min_weight', 'custom')
LIMINF_RADII = (1e-2, 1e-3, 1e-4)
MAX_WITNESSES = 100

_EVAL_ERRORS = (ArithmeticError, GeodesicError, DomainError)


# ---------------------------------------------------------------------
# distance providers
# ---------------------------------------------------------------------
class ClosedFormDistance(object):
    """Hyperbolic distance ρ on the unit ball."""

    exact = True
    label = 'closed_form'

    def __init__(self, domain):
        if domain.kind != 'unit_ball':
            raise ParameterError("the closed-form distance needs the unit ball")
        self.domain = domain

    def __call__(self, Z, E):
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        E = np.atleast_2d(np.asarray(E, dtype=float))
        try:
            return np.atleast_1d(np.asarray(hyperbolic_distance(Z, E), dtype=float))
        except _EVAL_ERRORS + (ValueError,):
            out = np.full(Z.shape[0], np.nan)
            for i in range(Z.shape[0]):
                try:
                    out[i] = hyperbolic_distance(Z[i], E[i])
                except _EVAL_ERRORS + (ValueError,):
                    pass
            return out


class GeodesicDistance(object):
    """Numerical d_w; one solve per unordered pair, then cached."""

    exact = False
    label = 'geodesic'

    def __init__(self, weight, opts=None, threads=None):
        self.weight = weight
        self.domain = weight.domain
        self.opts = opts or GeodesicOptions()
        self.threads = threads
        self._cache = {}

    def __call__(self, Z, E):
        Z = np.atleast_2d(np.asarray(Z, dtype=float))
        E = np.atleast_2d(np.asarray(E, dtype=float))
        keys = [_pair_key(Z[i], E[i]) for i in range(Z.shape[0])]
        todo = sorted({k for k in keys if k not in self._cache})
        if todo:
            A = np.array([k[0] for k in todo])
            B = np.array([k[1] for k in todo])
            vals = geodesic_distances(self.weight, A, B, self.opts, self.threads)
            for k, v in zip(todo, vals):
                self._cache[k] = float(v)
        return np.array([self._cache[k] for k in keys], dtype=float)


def _pair_key(z, e):
    a, b = tuple(float(x) for x in z), tuple(float(x) for x in e)
    return (a, b) if a <= b else (b, a)


def distance_provider(kind, weight, opts=None, threads=None):
    """'closed_form' (unit ball, hyperbolic weight) or 'geodesic'."""
    if kind == 'closed_form':
        if weight.name != 'hyperbolic':
            logger.warning("closed-form ρ used with weight %s; it is d_w only for 1-|ζ|²",
                           weight.label)
        return ClosedFormDistance(weight.domain)
    if kind == 'geodesic':
        return GeodesicDistance(weight, opts, threads)
    raise ParameterError("unknown distance provider %r" % kind)


# ---------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class Kernel(object):
    """
    Two-point function W on a domain.

    `func(Z, E)` is vectorised over stacked pairs and may return NaN where
    evaluation failed. Use the constructors below.
    """
    kind: str
    domain: object
    func: Callable = field(repr=False)
    weight: Optional[object] = field(default=None, repr=False)
    symmetric: bool = True
    label: str = ''
    distance: Optional[object] = field(default=None, repr=False)

    def values(self, Z, E):
        Z = as_point(Z, self.domain.dim)
        E = as_point(E, self.domain.dim)
        if not (np.all(self.domain.contains(Z)) and np.all(self.domain.contains(E))):
            raise DomainError("kernel evaluated outside its domain")
        return np.asarray(self.func(Z, E), dtype=float)

    def scaled(self, c):
        """c·W; for c != 1 it breaks W2 wherever W satisfied it."""
        c = float(c)
        if not (c > 0.0) or not math.isfinite(c):
            raise ParameterError("kernel scale must be positive, got %r" % c)
        f = self.func
        return Kernel('custom', self.domain, lambda Z, E: c * f(Z, E), self.weight,
                      self.symmetric, '%r*%s' % (c, self.label), self.distance)

    def __call__(self, z, e):
        return eval_kernel(self, z, e)


def eval_kernel(k, z, e):
    """
    W(z,e) at a single pair.

    Raises
    ------
    GeodesicError
        The canonical kernel's distance solve failed.
    PositivityError
        The value is not positive and finite.
    """
    v = float(k.values(as_point(z), as_point(e)))
    if math.isnan(v) and k.kind == 'canonical':
        raise GeodesicError("distance solve failed for %s" % k.label)
    if not (v > 0.0) or not math.isfinite(v):
        raise PositivityError("kernel %s is not positive at the pair" % k.label)
    return v


def safe_values(k, Z, E):
    """Vectorised values, NaN where a pair cannot be evaluated."""
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    E = np.atleast_2d(np.asarray(E, dtype=float))
    try:
        return np.atleast_1d(k.values(Z, E))
    except _EVAL_ERRORS + (ValueError,):
        out = np.full(Z.shape[0], np.nan)
        for i in range(Z.shape[0]):
            try:
                out[i] = float(k.values(Z[i], E[i]))
            except _EVAL_ERRORS + (ValueError,):
                pass
        return out


def _diagonal(Z, E):
    return np.all(Z == E, axis=-1)


def canonical_kernel(w, opts=None, distance=None, threads=None):
    """
    |ζ-η| / d_w(ζ,η), and w(ζ) on the diagonal.

    Admissible for every weight and extremal for W4. Each pair is evaluated
    in a fixed order of its two points, so symmetry holds exactly.
    """
    dist = distance if distance is not None else GeodesicDistance(w, opts, threads)

    def func(Z, E):
        Z2 = np.atleast_2d(Z)
        E2 = np.atleast_2d(E)
        diag = _diagonal(Z2, E2)
        out = np.empty(Z2.shape[0])
        if np.any(diag):
            out[diag] = w.values(Z2[diag])
        off = ~diag
        if np.any(off):
            A, B = Z2[off], E2[off]
            swap = np.array([tuple(a) > tuple(b) for a, b in zip(A.tolist(), B.tolist())], dtype=bool)
            A2 = np.where(swap[:, None], B, A)
            B2 = np.where(swap[:, None], A, B)
            d = dist(A2, B2)
            with np.errstate(divide='ignore', invalid='ignore'):
                out[off] = norm(A2 - B2) / d
        return out.reshape(np.shape(Z)[:-1])

    return Kernel('canonical', w.domain, func, w, True, 'canonical(%s)' % w.label, dist)


def geometric_mean_kernel(domain, weight=None):
    """√(1-|ζ|²) √(1-|η|²) on the unit ball."""
    if domain.kind != 'unit_ball':
        raise ParameterError("the geometric-mean kernel is defined on the unit ball only")
    w = weight if weight is not None else builtin_weight('hyperbolic', None, domain)
    if w.name != 'hyperbolic':
        logger.warning("geometric-mean kernel paired with weight %s; W2 holds only for 1-|ζ|²",
                       w.label)

    def func(Z, E):
        az = 1.0 - np.sum(Z * Z, axis=-1)
        ae = 1.0 - np.sum(E * E, axis=-1)
        return np.sqrt(az) * np.sqrt(ae)

    return Kernel('geometric_mean', domain, func, w, True, 'geometric_mean')


def min_weight_kernel(w):
    """min{w(ζ), w(η)}; admissible when w is radially decreasing on a convex domain."""
    if not w.domain.convex:
        logger.warning("min-weight kernel on a non-convex domain; W4 is not guaranteed")
    elif not is_radially_decreasing(w):
        logger.warning("weight %s is not radially decreasing; W4 is not guaranteed", w.label)

    def func(Z, E):
        return np.minimum(w.values(Z), w.values(E))

    return Kernel('min_weight', w.domain, func, w, True, 'min_weight(%s)' % w.label)


def custom_kernel(domain, func, weight=None, label='custom'):
    """Caller-supplied vectorised W(Z, E); not assumed symmetric."""
    return Kernel('custom', domain, func, weight, False, label)


def symmetrize(k):
    """
    max{W(ζ,η), W(η,ζ)}.

    Kernels already symmetric (every built-in, and every symmetrized kernel)
    are returned unchanged, which makes the operation idempotent.
    """
    if k.symmetric:
        return k
    f = k.func
    return Kernel('custom', k.domain, lambda Z, E: np.maximum(f(Z, E), f(E, Z)), k.weight,
                  True, 'sym(%s)' % k.label, k.distance)


KERNEL_ALIASES = {
    'canonical': 'canonical',
    'geometric-mean': 'geometric_mean',
    'geometric_mean': 'geometric_mean',
    'min': 'min_weight',
    'min_weight': 'min_weight',
}


def kernel_from_spec(name, w, opts=None, distance=None, threads=None):
    """Kernel from a CLI name: canonical, geometric-mean or min."""
    kind = KERNEL_ALIASES.get(str(name).strip())
    if kind == 'canonical':
        return canonical_kernel(w, opts, distance, threads)
    if kind == 'geometric_mean':
        return geometric_mean_kernel(w.domain, w)
    if kind == 'min_weight':
        return min_weight_kernel(w)
    raise UnknownNameError("unknown kernel %r (expected canonical, geometric-mean or min)" % name)


# ---------------------------------------------------------------------
# admissibility
# ---------------------------------------------------------------------
@dataclass
class AdmissibilityReport(object):
    """Witnesses per condition; a condition fails iff it has a witness."""
    w1_violations: List[Dict] = field(default_factory=list)
    w2_violations: List[Dict] = field(default_factory=list)
    w3_violations: List[Dict] = field(default_factory=list)
    w4_violations: List[Dict] = field(default_factory=list)
    violation_counts: Dict[str, int] = field(default_factory=dict)
    samples_used: int = 0
    skipped_pairs: int = 0
    tolerances: Dict[str, float] = field(default_factory=dict)
    liminf_profile: List[Dict] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)

    @property
    def verdict(self):
        return {
            'W1': 'fail' if self.w1_violations else 'pass',
            'W2': 'fail' if self.w2_violations else 'pass',
            'W3': 'fail' if self.w3_violations else 'pass',
            'W4': 'fail' if self.w4_violations else 'pass',
        }

    @property
    def passed(self):
        return all(v == 'pass' for v in self.verdict.values())

    def to_dict(self):
        return {
            'verdict': self.verdict,
            'passed': self.passed,
            'samples_used': int(self.samples_used),
            'skipped_pairs': int(self.skipped_pairs),
            'violation_counts': dict(self.violation_counts),
            'tolerances': dict(self.tolerances),
            'liminf_profile': list(self.liminf_profile),
            'flags': list(self.flags),
            'w1_violations': self.w1_violations,
            'w2_violations': self.w2_violations,
            'w3_violations': self.w3_violations,
            'w4_violations': self.w4_violations,
        }


def _chunked(func, Z, E, threads):
    """func over stacked pairs, split into per-thread chunks, order kept."""
    if Z.shape[0] == 0:
        return np.zeros(0)
    return map_chunks(lambda s: func(Z[s], E[s]), Z.shape[0], threads)


def _witness_list(mask, make):
    idx = np.nonzero(mask)[0][:MAX_WITNESSES]
    return [make(int(i)) for i in idx]


def check_admissible(k, w, dist, sample_pairs=1000, liminf_radii=LIMINF_RADII, tolerance=1e-6,
                     *, approx_tolerance=1e-3, sphere_samples=32, liminf_points=16,
                     margin=DEFAULT_MARGIN, seed=0, threads=None):
    """
    Test W1-W4 for kernel k and weight w on a deterministic sample.

    Parameters
    ----------
    k : Kernel
    w : src.weights.Weight
    dist : distance provider
        ClosedFormDistance or GeodesicDistance; used by W4.
    sample_pairs : int
        Random pairs for W1 and W4 (>= 1). A near-diagonal schedule on a
        subset of the base points is added.
    liminf_radii : decreasing positive floats
        Sphere radii for W3.
    tolerance : float
        Relative tolerance of the exact conditions.
    approx_tolerance : float
        Tolerance for W4 with a numerical distance and W3 with a numerical
        canonical kernel.

    Returns
    -------
    AdmissibilityReport
    """
    if int(sample_pairs) < 1:
        raise ParameterError("sample_pairs must be >= 1")
    radii = tuple(float(r) for r in liminf_radii)
    if not radii or any(r <= 0.0 for r in radii) or any(b >= a for a, b in zip(radii, radii[1:])):
        raise ParameterError("liminf_radii must be decreasing positive reals")
    if k.domain is not w.domain and (k.domain.kind != w.domain.kind or k.domain.dim != w.domain.dim):
        raise ParameterError("kernel and weight live on different domains")

    domain = w.domain
    numeric_kernel = k.distance is not None and not getattr(k.distance, 'exact', False)
    tol_w3 = approx_tolerance if numeric_kernel else tolerance
    tol_w4 = tolerance if getattr(dist, 'exact', False) else approx_tolerance
    report = AdmissibilityReport(tolerances={'W1': tolerance, 'W2': tolerance,
                                             'W3': tol_w3, 'W4': tol_w4})

    n_base = max(2, min(256, int(sample_pairs)))
    base = low_discrepancy_points(domain, n_base, seed=seed, margin=margin)
    near_base = base[:max(1, int(sample_pairs) // 20)]
    random_pairs = Sampler(seed=seed, boundary_margin=margin, pair_budget=int(sample_pairs),
                           near_diagonal=()).pairs(domain, base)
    near_pairs = Sampler(seed=seed, boundary_margin=margin, pair_budget=0,
                         near_diagonal=NEAR_DIAGONAL).pairs(domain, near_base)
    Z = np.vstack([random_pairs.z, near_pairs.z])
    E = np.vstack([random_pairs.e, near_pairs.e])

    # W1
    k_ze = _chunked(lambda a, b: safe_values(k, a, b), Z, E, threads)
    k_ez = _chunked(lambda a, b: safe_values(k, a, b), E, Z, threads)
    ok1 = np.isfinite(k_ze) & np.isfinite(k_ez)
    bad1 = ok1 & (np.abs(k_ze - k_ez) > tolerance * np.abs(k_ze))
    report.w1_violations = _witness_list(bad1, lambda i: {
        'z': Z[i].tolist(), 'e': E[i].tolist(), 'k_ze': float(k_ze[i]), 'k_ez': float(k_ez[i])})

    # W2
    w_base = w.values(base)
    k_diag = safe_values(k, base, base)
    ok2 = np.isfinite(k_diag)
    bad2 = ok2 & (np.abs(k_diag - w_base) > tolerance * w_base)
    report.w2_violations = _witness_list(bad2, lambda i: {
        'z': base[i].tolist(), 'k_zz': float(k_diag[i]), 'w_z': float(w_base[i])})

    # W3
    rng = np.random.default_rng(int(seed))
    centers = base[:max(1, min(int(liminf_points), base.shape[0]))]
    dirs = random_unit_vectors(rng, int(sphere_samples), domain.dim)
    w_c = w.values(centers)
    ratios = np.full((centers.shape[0], len(radii)), np.nan)
    for j, r in enumerate(radii):
        Zc = np.repeat(centers, dirs.shape[0], axis=0)
        Ec = Zc + r * np.tile(dirs, (centers.shape[0], 1))
        inside = np.asarray(domain.contains(Ec), dtype=bool)
        vals = np.full(Zc.shape[0], np.nan)
        if np.any(inside):
            vals[inside] = _chunked(lambda a, b: safe_values(k, a, b), Zc[inside], Ec[inside], threads)
        vals = vals.reshape(centers.shape[0], dirs.shape[0])
        finite = np.isfinite(vals)
        mins = np.min(np.where(finite, vals, np.inf), axis=1)
        ratios[:, j] = np.where(np.any(finite, axis=1), mins / w_c, np.nan)
    deficit = np.maximum(0.0, 1.0 - ratios)
    decay = math.sqrt(radii[-1] / radii[0])
    ok3 = np.all(np.isfinite(ratios), axis=1)
    bad3 = ok3 & (deficit[:, -1] > tol_w3) & (deficit[:, -1] > deficit[:, 0] * decay)
    report.w3_violations = _witness_list(bad3, lambda i: {
        'z': centers[i].tolist(), 'radius': radii[-1], 'min_ratio': float(ratios[i, -1]),
        'ratios_by_radius': [float(x) for x in ratios[i]]})
    # worst centre per radius; rises toward 1 for kernels continuous on the diagonal
    report.liminf_profile = [
        {'radius': r, 'min_ratio': float(np.nanmin(ratios[:, j])) if np.any(np.isfinite(ratios[:, j]))
         else float('nan')}
        for j, r in enumerate(radii)]

    # W4
    d_ze = _chunked(lambda a, b: dist(a, b), Z, E, threads)
    ok4 = np.isfinite(d_ze) & np.isfinite(k_ze)
    sep = norm(Z - E)
    product = d_ze * k_ze
    bad4 = ok4 & (product > sep * (1.0 + tol_w4))
    report.w4_violations = _witness_list(bad4, lambda i: {
        'z': Z[i].tolist(), 'e': E[i].tolist(), 'distance': float(d_ze[i]),
        'kernel': float(k_ze[i]), 'product': float(product[i]), 'separation': float(sep[i])})

    report.violation_counts = {'W1': int(np.sum(bad1)), 'W2': int(np.sum(bad2)),
                               'W3': int(np.sum(bad3)), 'W4': int(np.sum(bad4))}
    skipped = int(np.sum(~(ok1 & ok4))) + int(np.sum(~ok2)) + int(np.sum(~ok3))
    report.samples_used = int(Z.shape[0] + base.shape[0] + centers.shape[0] * dirs.shape[0] * len(radii))
    report.skipped_pairs = skipped
    if skipped:
        report.flags.append('flag_samples_skipped')
        logger.warning("admissibility check skipped %d samples", skipped)
    return report
