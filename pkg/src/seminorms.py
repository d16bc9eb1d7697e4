# -*- coding: utf-8 -*-
"""
Bloch and Lipschitz-type semi-norm estimators
=============================================

Definitions (docs/seminorms.md is authoritative):

    Bloch         ‖f‖_b = sup_ζ w(ζ) ‖Df(ζ)‖
    W-Lipschitz   ‖f‖_W = sup_{ζ≠η} W(ζ,η) |f(ζ)-f(η)| / |ζ-η|
    d_w quotient  sup_{ζ≠η} |f(ζ)-f(η)| / d_w(ζ,η)

For an admissible W the three numbers coincide. Each estimator is a maximum
over a deterministic sample, hence a lower bound of the supremum, and is
reported with its sampling parameters. The witness is the first sample in
sample order attaining the maximum, and the value is the estimated quantity
at the witness.

Per-sample failures (a stencil that cannot stay inside the domain, a kernel or
distance that cannot be evaluated) skip the sample; the count and
'flag_samples_skipped' are reported. Maps marked differentiable=False are
estimated anyway and flagged 'flag_outside_theorem_hypotheses'.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.errors import DomainError, ParameterError, StencilError
from src.geometry import as_point, norm
from src.hyperbolic import hyperbolic_distance
from src.kernels import safe_values
from src.maps import fd_jacobians
from src.parallel import map_chunks

logger = logging.getLogger(__name__)

FD_RELATIVE_STEP = 1e-6
_MAX_HALVINGS = 40


@dataclass
class SeminormEstimate(object):
    """Sampled supremum with its witness and sampling parameters."""
    kind: str
    value: float
    witness: Optional[List] = None
    samples_used: int = 0
    skipped: int = 0
    flags: List[str] = field(default_factory=list)
    sampling: Dict = field(default_factory=dict)

    def to_dict(self):
        return {
            'kind': self.kind,
            'value': float(self.value),
            'witness': self.witness,
            'samples_used': int(self.samples_used),
            'skipped': int(self.skipped),
            'flags': list(self.flags),
            'sampling': dict(self.sampling),
        }


# ---------------------------------------------------------------------
# jacobians and operator norms
# ---------------------------------------------------------------------
def _stencil_step(p, domain, step):
    h = float(step) if step is not None else FD_RELATIVE_STEP * max(1.0, float(norm(p)))
    if domain is None:
        return h
    m = p.shape[0]
    eye = np.eye(m)
    for _ in range(_MAX_HALVINGS):
        stencil = np.vstack([p + h * eye, p - h * eye])
        if np.all(domain.contains(stencil)):
            return h
        h *= 0.5
    raise StencilError("finite-difference stencil at %s cannot stay inside the domain"
                       % np.round(p, 12).tolist())


def jacobian_at(f, p, step=None, domain=None):
    """
    Df(p) as an (n, m) array.

    The exact jacobian when f carries one; otherwise central differences with
    step h (default 1e-6·max(1, |p|)), halved until the 2m stencil points lie
    in `domain`.

    Raises
    ------
    DomainError
        p is outside the domain.
    StencilError
        No step keeps the stencil inside the domain.
    """
    p = as_point(p, f.dimension_in)
    if domain is not None and not domain.contains(p):
        raise DomainError("jacobian requested outside the domain")
    if f.jacobian is not None:
        return f.jacobians(p)
    h = _stencil_step(p, domain, step)
    return fd_jacobians(f, p, h)[0]


def jacobians_at(f, P, domain=None):
    """
    Stacked jacobians (k, n, m) with NaN entries where the stencil failed.
    """
    P = np.atleast_2d(as_point(P, f.dimension_in))
    if f.jacobian is not None:
        return f.jacobians(P)
    out = np.full((P.shape[0], f.dimension_out, f.dimension_in), np.nan)
    h = FD_RELATIVE_STEP * np.maximum(1.0, norm(P))
    pending = np.ones(P.shape[0], dtype=bool)
    eye = np.eye(f.dimension_in)
    for _ in range(_MAX_HALVINGS):
        idx = np.nonzero(pending)[0]
        if idx.size == 0:
            break
        ok = np.ones(idx.size, dtype=bool)
        if domain is not None:
            for j in range(f.dimension_in):
                step = h[idx, None] * eye[j]
                ok &= np.asarray(domain.contains(P[idx] + step), dtype=bool)
                ok &= np.asarray(domain.contains(P[idx] - step), dtype=bool)
        good = idx[ok]
        for hv in np.unique(h[good]):
            sel = good[h[good] == hv]
            out[sel] = fd_jacobians(f, P[sel], hv)
        pending[good] = False
        h[pending] *= 0.5
    return out


def operator_norm(M):
    """Largest singular value; vectorised over leading axes."""
    M = np.asarray(M, dtype=float)
    if M.ndim < 2:
        raise ParameterError("operator_norm needs a matrix")
    if not np.all(np.isfinite(M)):
        raise ParameterError("matrix entries must be finite")
    s = np.linalg.svd(M, compute_uv=False)[..., 0]
    return float(s) if np.ndim(s) == 0 else s


def operator_norm_2x2(M):
    """Closed-form largest singular value of a 2×2 matrix."""
    (a, b), (c, d) = np.asarray(M, dtype=float)
    return 0.5 * (math.hypot(a + d, c - b) + math.hypot(a - d, b + c))


def _safe_operator_norms(J):
    out = np.full(J.shape[0], np.nan)
    ok = np.all(np.isfinite(J), axis=(1, 2))
    if np.any(ok):
        out[ok] = np.linalg.svd(J[ok], compute_uv=False)[:, 0]
    return out


def _safe_weights(w, P):
    try:
        return w.values(P)
    except (ArithmeticError, DomainError):
        vals = w.raw(P)
        inside = np.asarray(w.domain.contains(P), dtype=bool)
        return np.where(inside & np.isfinite(vals) & (vals > w.threshold), vals, np.nan)


def _finish(kind, q, witness_of, used_total, flags, sampling):
    valid = np.isfinite(q)
    skipped = int(np.sum(~valid))
    if skipped:
        flags.append('flag_samples_skipped')
        logger.warning("%s estimate skipped %d of %d samples", kind, skipped, used_total)
    if not np.any(valid):
        return SeminormEstimate(kind, 0.0, None, 0, skipped, flags + ['flag_no_valid_samples'],
                                sampling)
    qv = np.where(valid, q, -np.inf)
    i = int(np.argmax(qv))
    return SeminormEstimate(kind, float(q[i]), witness_of(i), int(np.sum(valid)), skipped,
                            flags, sampling)


def _hypothesis_flags(f):
    return [] if f.differentiable else ['flag_outside_theorem_hypotheses']


# ---------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------
def bloch_seminorm(f, w, s, threads=None, points=None):
    """
    max over sampled points p of w(p)·‖Df(p)‖.

    Parameters
    ----------
    f : src.maps.SmoothMap
    w : src.weights.Weight
    s : src.sampling.Sampler
    threads : int or None
    points : ndarray or None
        Explicit sample points, overriding s.

    Returns
    -------
    SeminormEstimate
    """
    if f.dimension_in != w.domain.dim:
        raise ParameterError("map and weight differ in dimension")
    P = s.points(w.domain) if points is None else np.atleast_2d(np.asarray(points, dtype=float))
    if P.shape[0] == 0:
        raise ParameterError("the sampler produced no points in the domain")

    def chunk(sl):
        J = jacobians_at(f, P[sl], w.domain)
        return _safe_weights(w, P[sl]) * _safe_operator_norms(J)

    q = map_chunks(chunk, P.shape[0], threads)
    return _finish('bloch', q, lambda i: P[i].tolist(), P.shape[0], _hypothesis_flags(f),
                   s.describe())


def _pair_quotients(f, Z, E):
    diff = norm(f.values(Z) - f.values(E))
    return diff, norm(Z - E)


def _kernel_quotients(f, k, Z, E, threads):
    def chunk(sl):
        kv = safe_values(k, Z[sl], E[sl])
        diff, sep = _pair_quotients(f, Z[sl], E[sl])
        return kv * diff / sep

    return map_chunks(chunk, Z.shape[0], threads)


def lipschitz_seminorm(f, k, s, threads=None, pairs=None):
    """
    max over sampled distinct pairs of W(z,e)·|f(z)-f(e)| / |z-e|.

    Pairs are the sampler's random pairs followed by its near-diagonal
    schedule (or `pairs`, a src.sampling.PairSet).
    """
    if f.dimension_in != k.domain.dim:
        raise ParameterError("map and kernel differ in dimension")
    ps = s.pairs(k.domain) if pairs is None else pairs
    if len(ps) == 0:
        raise ParameterError("pair_budget must be >= 1 for a Lipschitz estimate")
    Z, E = ps.z, ps.e
    q = _kernel_quotients(f, k, Z, E, threads)
    return _finish('lipschitz', q, lambda i: [Z[i].tolist(), E[i].tolist()], Z.shape[0],
                   _hypothesis_flags(f), dict(s.describe(), kernel=k.label))


def dw_quotient_seminorm(f, dist, s, threads=None, pairs=None, domain=None):
    """max over sampled distinct pairs of |f(z)-f(e)| / dist(z,e)."""
    domain = domain if domain is not None else dist.domain
    if f.dimension_in != domain.dim:
        raise ParameterError("map and distance differ in dimension")
    ps = s.pairs(domain) if pairs is None else pairs
    if len(ps) == 0:
        raise ParameterError("pair_budget must be >= 1 for a quotient estimate")
    Z, E = ps.z, ps.e

    def chunk(sl):
        d = np.asarray(dist(Z[sl], E[sl]), dtype=float)
        diff, _ = _pair_quotients(f, Z[sl], E[sl])
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(d > 0.0, diff / d, np.nan)

    q = map_chunks(chunk, Z.shape[0], threads)
    return _finish('dw_quotient', q, lambda i: [Z[i].tolist(), E[i].tolist()], Z.shape[0],
                   _hypothesis_flags(f), dict(s.describe(), distance=getattr(dist, 'label', '')))


# ---------------------------------------------------------------------
# equality harness
# ---------------------------------------------------------------------
@dataclass
class EqualityReport(object):
    bloch: SeminormEstimate
    lipschitz: SeminormEstimate
    tolerance: float
    pairs_above_bloch: int
    near_diagonal_max: float
    flags: List[str] = field(default_factory=list)

    @property
    def upper_check(self):
        """Every pair quotient is <= B·(1+tol)."""
        return self.pairs_above_bloch == 0

    @property
    def diagonal_check(self):
        """Near-diagonal quotients reach B·(1-tol) from below."""
        return self.near_diagonal_max >= self.bloch.value * (1.0 - self.tolerance)

    @property
    def difference(self):
        return abs(self.bloch.value - self.lipschitz.value)

    @property
    def verdict(self):
        ok = self.difference <= self.tolerance * max(self.bloch.value, 1.0)
        return 'pass' if ok else 'fail'

    def to_dict(self):
        return {
            'verdict': self.verdict,
            'bloch': self.bloch.value,
            'lipschitz': self.lipschitz.value,
            'difference': self.difference,
            'tolerance': self.tolerance,
            'checks': {
                'pair_quotients_below_bloch': {'passed': self.upper_check,
                                               'violations': int(self.pairs_above_bloch)},
                'near_diagonal_reaches_bloch': {'passed': self.diagonal_check,
                                                'max_quotient': float(self.near_diagonal_max)},
            },
            'bloch_estimate': self.bloch.to_dict(),
            'lipschitz_estimate': self.lipschitz.to_dict(),
            'flags': list(self.flags),
        }


def verify_equality(f, w, k, s, tol=1e-2, threads=None, bloch_sampler=None):
    """
    Compare the Bloch and W-Lipschitz estimates of f.

    Parameters
    ----------
    f : SmoothMap
    w : Weight
    k : Kernel
        Assumed admissible for w.
    s : Sampler
        Pair sampler for the Lipschitz side.
    tol : float
        Relative tolerance.
    bloch_sampler : Sampler or None
        Point sampler for the Bloch side (default s).

    Returns
    -------
    EqualityReport
        Verdict pass iff |B - L| <= tol·max(B, 1).
    """
    if not (tol > 0.0):
        raise ParameterError("tolerance must be positive")
    B = bloch_seminorm(f, w, bloch_sampler or s, threads)
    ps = s.pairs(k.domain)
    if len(ps) == 0:
        raise ParameterError("pair_budget must be >= 1 for a Lipschitz estimate")
    Z, E = ps.z, ps.e
    q = _kernel_quotients(f, k, Z, E, threads)
    L = _finish('lipschitz', q, lambda i: [Z[i].tolist(), E[i].tolist()], Z.shape[0],
                _hypothesis_flags(f), dict(s.describe(), kernel=k.label))
    finite = np.isfinite(q)
    above = int(np.sum(finite & (q > B.value * (1.0 + tol))))
    near = finite & (ps.separation > 0.0)
    near_max = float(np.max(q[near])) if np.any(near) else 0.0
    flags = sorted(set(B.flags) | set(L.flags))
    report = EqualityReport(B, L, float(tol), above, near_max, flags)
    logger.info("verify %s / %s: B=%.9g L=%.9g verdict=%s", f.label, k.label,
                B.value, L.value, report.verdict)
    return report


def hyperbolic_lipschitz_check(f, bloch_value, pairs, slack=1e-3):
    """
    Count pairs with |f(z)-f(e)| > (B + slack)·ρ(z,e) on the unit ball.

    Returns a dict with the violation count, the pair count and the largest
    ratio |f(z)-f(e)| / ρ(z,e) with its pair.
    """
    Z, E = pairs.z, pairs.e
    rho = np.atleast_1d(hyperbolic_distance(Z, E))
    diff = norm(f.values(Z) - f.values(E))
    with np.errstate(divide='ignore', invalid='ignore'):
        ratio = np.where(rho > 0.0, diff / rho, 0.0)
    bound = (float(bloch_value) + float(slack)) * rho
    violations = int(np.sum(diff > bound))
    i = int(np.argmax(ratio)) if ratio.size else 0
    return {
        'violations': violations,
        'pairs': int(Z.shape[0]),
        'max_ratio': float(ratio[i]) if ratio.size else 0.0,
        'witness': [Z[i].tolist(), E[i].tolist()] if ratio.size else None,
    }
