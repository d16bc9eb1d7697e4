# -*- coding: utf-8 -*-
"""
Numerical w-distance
====================

    d_w(a,b) = inf_γ ∫_γ |dω| / w(ω)

estimated by optimising piecewise-linear paths with fixed endpoints. The
returned value is the cost of the best polyline found, an upper bound on the
infimum that tightens as control_points grows. For the hyperbolic weight the
closed form in src.hyperbolic is the calibration oracle.

Algorithm
---------
1. Seed: the straight segment when it lies in the domain; otherwise a
   Dijkstra shortest path on a uniform grid graph (pitch = inner radius / 8)
   fitted to control_points.
2. Coarse to fine: straight-seeded paths are optimised at 3, 5, 9, 17, ...
   control points, inserting segment midpoints between levels, then at the
   requested count. A run with 2N-1 points passes through the same N-point
   optimum, so doubling never makes the value worse.
3. Each level moves interior control points along directions normal to the
   local chord p[i+1]-p[i-1]. Every segment's cost is fitted by a local
   quadratic from a finite-difference stencil; the banded fits assemble into
   a Newton step for all normal displacements at once.
4. The step is tried at full length, then by golden-section search on its
   length. Only cost decreases are accepted. Control points that would leave
   the domain are pulled back along their update by bisection.
5. A level stops when the cost decrease < cost_tolerance and the largest
   control-point displacement < step_tolerance, or when no descent remains.

The reported value uses 16 Gauss–Legendre nodes per segment on the final
path; the optimisation uses 8.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from src.errors import DomainError, GeodesicError, ParameterError
from src.geometry import Path, as_point, norm, path_cost, segment_costs, segment_inside
from src.parallel import parallel_map

logger = logging.getLogger(__name__)

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
FD_SCALE = 1e-4
MAX_GRID_NODES = 250000
_GOLDEN_STEPS = 40
_BISECTIONS = 40


@dataclass(frozen=True)
class GeodesicOptions(object):
    """
    Solver settings.

    Parameters
    ----------
    control_points : int
        Polyline control points, endpoints included (>= 2).
    max_iterations : int
        Newton iterations allowed per refinement level.
    step_tolerance : float
        Largest control-point displacement counted as converged.
    cost_tolerance : float
        Cost decrease counted as converged.
    seed : int
        Offsets the grid-graph lattice used when the straight seed fails.
    quadrature : int
        Gauss–Legendre nodes per segment during optimisation.
    report_quadrature : int
        Nodes per segment for the reported value.
    """
    control_points: int = 33
    max_iterations: int = 500
    step_tolerance: float = 1e-8
    cost_tolerance: float = 1e-9
    seed: int = 0
    quadrature: int = 8
    report_quadrature: int = 16

    def __post_init__(self):
        if int(self.control_points) < 2:
            raise ParameterError("control_points must be >= 2")
        if int(self.max_iterations) < 1:
            raise ParameterError("max_iterations must be >= 1")
        if not (self.step_tolerance > 0.0 and self.cost_tolerance > 0.0):
            raise ParameterError("tolerances must be positive")
        if int(self.quadrature) < 2 or int(self.report_quadrature) < 2:
            raise ParameterError("quadrature needs at least 2 nodes per segment")


@dataclass(frozen=True)
class GeodesicResult(object):
    value: float
    path: Path
    iterations: int
    converged: bool
    flags: Tuple[str, ...] = field(default=())

    def to_dict(self):
        return {
            'value': float(self.value),
            'converged': bool(self.converged),
            'iterations': int(self.iterations),
            'path': self.path.to_list(),
            'euclidean_length': self.path.euclidean_length(),
            'flags': list(self.flags),
        }


def _soft_cost(P, w, n):
    return float(np.sum(segment_costs(P[:-1], P[1:], w, n, strict=False)))


def level_schedule(n):
    """Control-point counts visited for a straight-seeded solve with n points."""
    n = int(n)
    if n <= 3:
        return [n]
    levels = []
    k = 3
    while k < n:
        levels.append(k)
        k = 2 * k - 1
    levels.append(n)
    return levels


def _refine(P, count):
    """Midpoint insertion when count = 2·len-1, arc-length resampling otherwise."""
    k = P.shape[0]
    if k == count:
        return P
    if count == 2 * k - 1:
        out = np.empty((count, P.shape[1]))
        out[0::2] = P
        out[1::2] = 0.5 * (P[:-1] + P[1:])
        return out
    s = np.concatenate([[0.0], np.cumsum(norm(np.diff(P, axis=0)))])
    t = np.linspace(0.0, s[-1], count)
    out = np.stack([np.interp(t, s, P[:, j]) for j in range(P.shape[1])], axis=1)
    out[0] = P[0]
    out[-1] = P[-1]
    return out


def _normal_frames(P):
    """Orthonormal bases (k, m, m-1) of the complement of each local chord."""
    chord = P[2:] - P[:-2]
    k, m = chord.shape
    length = norm(chord)
    u = np.where(length[:, None] > 0.0, chord / np.where(length > 0.0, length, 1.0)[:, None], 0.0)
    u[length == 0.0, 0] = 1.0
    A = np.concatenate([u[:, :, None], np.broadcast_to(np.eye(m), (k, m, m))], axis=2)
    Q, _ = np.linalg.qr(A)
    return Q[:, :, 1:]


def _project(P, D, alpha, domain):
    """P + alpha·D with outside points pulled back toward P by bisection."""
    Pn = P + alpha * D
    inner = Pn[1:-1]
    outside = ~np.asarray(domain.contains(inner), dtype=bool)
    for i in np.nonzero(outside)[0]:
        lo, hi = 0.0, 1.0
        for _ in range(_BISECTIONS):
            mid = 0.5 * (lo + hi)
            if domain.contains(P[i + 1] + mid * alpha * D[i + 1]):
                lo = mid
            else:
                hi = mid
        inner[i] = P[i + 1] + lo * alpha * D[i + 1]
    return Pn


def _stencil_model(P, w, n):
    """
    Gradient and Hessian of the path cost in normal coordinates.

    Each segment's cost is a function of the normal displacements of its two
    endpoints; a central-difference stencil fits its local quadratic, and the
    fits are summed into the banded global model.
    """
    N, m = P.shape
    r = m - 1
    k = N - 2
    Q = _normal_frames(P)
    Qfull = np.zeros((N, m, r))
    Qfull[1:-1] = Q
    QL, QR = Qfull[:-1], Qfull[1:]
    A0, B0 = P[:-1], P[1:]
    h = FD_SCALE * float(np.mean(norm(B0 - A0)))
    d = 2 * r

    def seg(vec):
        A = A0 + QL @ vec[:r]
        B = B0 + QR @ vec[r:]
        return segment_costs(A, B, w, n, strict=False)

    eye = np.eye(d) * h
    f0 = seg(np.zeros(d))
    fp = [seg(eye[a]) for a in range(d)]
    fm = [seg(-eye[a]) for a in range(d)]
    g_loc = np.empty((N - 1, d))
    H_loc = np.empty((N - 1, d, d))
    finite = np.isfinite(f0)
    for a in range(d):
        g_loc[:, a] = (fp[a] - fm[a]) / (2.0 * h)
        H_loc[:, a, a] = (fp[a] - 2.0 * f0 + fm[a]) / (h * h)
        finite &= np.isfinite(fp[a]) & np.isfinite(fm[a])
    for a in range(d):
        for b in range(a + 1, d):
            fpp = seg(eye[a] + eye[b])
            fpm = seg(eye[a] - eye[b])
            fmp = seg(-eye[a] + eye[b])
            fmm = seg(-eye[a] - eye[b])
            H_loc[:, a, b] = H_loc[:, b, a] = (fpp - fpm - fmp + fmm) / (4.0 * h * h)
            finite &= np.isfinite(fpp) & np.isfinite(fpm) & np.isfinite(fmp) & np.isfinite(fmm)

    # global variable index of each local variable; -1 for fixed endpoints
    seg_ids = np.arange(N - 1)
    idx = np.full((N - 1, d), -1, dtype=int)
    for a in range(d):
        point = seg_ids if a < r else seg_ids + 1
        j = a % r
        interior = (point >= 1) & (point <= N - 2)
        idx[interior, a] = (point[interior] - 1) * r + j

    K = k * r
    G = np.zeros(K)
    H = np.zeros((K, K))
    for a in range(d):
        ok = finite & (idx[:, a] >= 0)
        np.add.at(G, idx[ok, a], g_loc[ok, a])
        for b in range(d):
            okb = ok & (idx[:, b] >= 0)
            np.add.at(H, (idx[okb, a], idx[okb, b]), H_loc[okb, a, b])

    frozen = set()
    for s in np.nonzero(~finite)[0]:
        for a in range(d):
            if idx[s, a] >= 0:
                frozen.add(int(idx[s, a]))
    if frozen:
        fz = np.array(sorted(frozen))
        G[fz] = 0.0
        H[fz, :] = 0.0
        H[:, fz] = 0.0
        H[fz, fz] = 1.0
    return G, H, Q


def _solve_psd(H, G):
    """Newton step -H⁻¹G, damped until H + λI is positive definite."""
    scale = max(float(np.mean(np.abs(np.diag(H)))), 1e-300)
    lam = 0.0
    eye = np.eye(H.shape[0])
    for _ in range(30):
        try:
            L = np.linalg.cholesky(H + lam * scale * eye)
        except np.linalg.LinAlgError:
            lam = 1e-8 if lam == 0.0 else lam * 10.0
            continue
        y = np.linalg.solve(L, -G)
        return np.linalg.solve(L.T, y)
    return -G / scale


def _line_search(P, D, cost0, w, n):
    """Full step, else golden-section search on the step length."""
    domain = w.domain
    full = _project(P, D, 1.0, domain)
    c_full = _soft_cost(full, w, n)
    if c_full < cost0:
        return full, c_full

    def f(alpha):
        return _soft_cost(_project(P, D, alpha, domain), w, n)

    lo, hi = 0.0, 1.0
    c = hi - INV_PHI * (hi - lo)
    e = lo + INV_PHI * (hi - lo)
    fc, fe = f(c), f(e)
    for _ in range(_GOLDEN_STEPS):
        if fc < fe:
            hi, e, fe = e, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, e, fe
            e = lo + INV_PHI * (hi - lo)
            fe = f(e)
    alpha = c if fc < fe else e
    best = _project(P, D, alpha, domain)
    c_best = _soft_cost(best, w, n)
    if c_best < cost0:
        return best, c_best
    return None, cost0


def _optimize_level(P, w, opts):
    """Newton iterations on one level; returns (path, iterations, converged)."""
    N, m = P.shape
    if m < 2 or N < 3:
        return P, 0, True
    n = int(opts.quadrature)
    cost = _soft_cost(P, w, n)
    if not np.isfinite(cost):
        raise GeodesicError("initial path is not admissible for the weight")
    for it in range(1, int(opts.max_iterations) + 1):
        G, H, Q = _stencil_model(P, w, n)
        step = _solve_psd(H, G).reshape(N - 2, m - 1)
        D = np.zeros_like(P)
        D[1:-1] = np.einsum('kmr,kr->km', Q, step)
        proposed = float(np.max(norm(D)))
        if proposed < opts.step_tolerance:
            return P, it, True
        newP, new_cost = _line_search(P, D, cost, w, n)
        if newP is None:
            logger.debug("level %d: no descent after %d iterations", N, it)
            return P, it, True
        moved = float(np.max(norm(newP - P)))
        decrease = cost - new_cost
        P, cost = newP, new_cost
        logger.debug("level %d iter %d: cost=%.15g decrease=%.3g moved=%.3g",
                     N, it, cost, decrease, moved)
        if decrease < opts.cost_tolerance and moved < opts.step_tolerance:
            return P, it, True
    return P, int(opts.max_iterations), False


def _fit_control_points(V, count):
    """Fit a vertex chain to exactly `count` control points."""
    V = np.asarray(V, dtype=float)
    while V.shape[0] < count:
        lengths = norm(np.diff(V, axis=0))
        i = int(np.argmax(lengths))
        V = np.insert(V, i + 1, 0.5 * (V[i] + V[i + 1]), axis=0)
    if V.shape[0] > count:
        pick = np.unique(np.round(np.linspace(0, V.shape[0] - 1, count)).astype(int))
        V = V[pick]
    return V


def grid_seed(w, a, b, opts):
    """
    Shortest path on a uniform grid graph of the domain, as control points.

    Nodes are lattice points inside the domain with a valid weight; edges join
    lattice neighbours (including diagonals) whose midpoint is inside, with
    cost |Δ| / w(midpoint).
    """
    d = w.domain
    m = d.dim
    lo, hi = d.bounds
    pitch = d.inner_radius / 8.0
    while True:
        shape = np.floor((hi - lo) / pitch).astype(int) + 1
        if int(np.prod(shape)) <= MAX_GRID_NODES:
            break
        pitch *= 1.25
    rng = np.random.default_rng(int(opts.seed))
    origin = lo + rng.uniform(0.0, 1.0, m) * (hi - lo - (shape - 1) * pitch)
    axes = [origin[j] + pitch * np.arange(shape[j]) for j in range(m)]
    coords = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing='ij')], axis=-1)
    vals = w.raw(coords)
    # nodes keep half a pitch from the boundary so fitted chords stay inside
    ok = (np.asarray(d.contains_shrunk(coords, 0.5 * pitch), dtype=bool)
          & np.isfinite(vals) & (vals > w.threshold))

    offsets = [np.array(o) for o in np.ndindex(*(3,) * m)]
    offsets = [o - 1 for o in offsets if np.any(o != 1)]
    strides = np.array([int(np.prod(shape[j + 1:])) for j in range(m)])
    multi = np.stack(np.unravel_index(np.arange(coords.shape[0]), tuple(shape)), axis=-1)
    edge_cost = []
    for o in offsets:
        mid = coords + 0.5 * pitch * o
        with np.errstate(all='ignore'):
            wm = w.raw(mid)
        good = np.asarray(d.contains(mid), dtype=bool) & np.isfinite(wm) & (wm > w.threshold)
        cost = np.where(good, pitch * float(np.linalg.norm(o)) / np.where(good, wm, 1.0), np.inf)
        edge_cost.append(cost)

    def attach(p):
        dist = norm(coords - p)
        cand = np.nonzero(ok & (dist <= 2.0 * pitch * math.sqrt(m)))[0]
        out = {}
        for c in cand:
            if segment_inside(d, p, coords[c]):
                cc = segment_costs(p[None, :], coords[c][None, :], w, opts.quadrature, strict=False)[0]
                if np.isfinite(cc):
                    out[int(c)] = float(cc)
        return out

    starts = attach(a)
    goals = attach(b)
    if not starts or not goals:
        raise GeodesicError("endpoints cannot be attached to the grid graph")

    GOAL = -1
    best = {}
    came_from = {}
    queue = []
    for c, cc in starts.items():
        best[c] = cc
        came_from[c] = None
        heapq.heappush(queue, (cc, c))
    done = set()
    goal_cost = math.inf
    while queue:
        dist, u = heapq.heappop(queue)
        if u == GOAL:
            break
        if u in done:
            continue
        done.add(u)
        if u in goals and dist + goals[u] < goal_cost:
            goal_cost = dist + goals[u]
            came_from[GOAL] = u
            heapq.heappush(queue, (goal_cost, GOAL))
        mu = multi[u]
        for o, ec in zip(offsets, edge_cost):
            nb = mu + o
            if np.any(nb < 0) or np.any(nb >= shape):
                continue
            v = int(nb @ strides)
            if not ok[v] or v in done:
                continue
            nd = dist + ec[u]
            if nd < best.get(v, math.inf):
                best[v] = nd
                came_from[v] = u
                heapq.heappush(queue, (nd, v))
    if GOAL not in came_from:
        raise GeodesicError("no admissible initial path: grid graph does not connect the endpoints")

    chain = []
    node = came_from[GOAL]
    while node is not None:
        chain.append(coords[node])
        node = came_from[node]
    V = np.vstack([a] + chain[::-1] + [b])
    P = _fit_control_points(V, int(opts.control_points))
    for i in range(P.shape[0] - 1):
        if not segment_inside(d, P[i], P[i + 1]):
            raise GeodesicError("grid seed cannot be represented with %d control points"
                                % opts.control_points)
    return P


def geodesic_distance(w, a, b, opts=None):
    """
    Estimate d_w(a,b) by polyline optimisation.

    Parameters
    ----------
    w : src.weights.Weight
    a, b : array_like
        Endpoints in the weight's domain.
    opts : GeodesicOptions or None

    Returns
    -------
    GeodesicResult

    Raises
    ------
    DomainError
        An endpoint lies outside the domain.
    GeodesicError
        No admissible initial path was found.
    PositivityError
        The weight is not positive at an endpoint.
    """
    opts = opts or GeodesicOptions()
    d = w.domain
    a = as_point(a, d.dim)
    b = as_point(b, d.dim)
    if not (d.contains(a) and d.contains(b)):
        raise DomainError("geodesic endpoints must lie in the domain")
    w.values(np.vstack([a, b]))
    if np.array_equal(a, b):
        return GeodesicResult(0.0, Path(np.vstack([a, b])), 0, True)

    count = int(opts.control_points)
    flags = []
    straight = _refine(np.vstack([a, b]), count) if count > 2 else np.vstack([a, b])
    if segment_inside(d, a, b) and np.isfinite(_soft_cost(straight, w, opts.quadrature)):
        P = np.vstack([a, b])
        iterations = 0
        converged = True
        for level in level_schedule(count):
            P = _refine(P, level)
            P, it, converged = _optimize_level(P, w, opts)
            iterations += it
    else:
        flags.append('flag_grid_seed')
        P = grid_seed(w, a, b, opts)
        P, iterations, converged = _optimize_level(P, w, opts)

    if not converged:
        flags.append('flag_not_converged')
    path = Path(P)
    value = path_cost(path, w, opts.report_quadrature)
    return GeodesicResult(value, path, iterations, converged, tuple(flags))


def straight_or_min_cost(w, a, b, pieces=32, quadrature=16):
    """
    Cost of the straight segment [a,b], split into `pieces` equal parts.

    An upper bound for d_w(a,b); for a weight decreasing in |ζ| on a convex
    domain it is at most |a-b| / min{w(a), w(b)}.

    Raises
    ------
    DomainError
        The segment leaves the domain.
    """
    d = w.domain
    a = as_point(a, d.dim)
    b = as_point(b, d.dim)
    if not segment_inside(d, a, b):
        raise DomainError("segment exits the domain")
    if np.array_equal(a, b):
        return 0.0
    P = _refine(np.vstack([a, b]), int(pieces) + 1)
    return path_cost(Path(P), w, quadrature)


def geodesic_distances(w, Z, E, opts=None, threads=None):
    """Values d_w(z_i, e_i) for stacked pairs, NaN where the solver failed."""
    Z = np.asarray(Z, dtype=float)
    E = np.asarray(E, dtype=float)

    def one(i):
        try:
            return geodesic_distance(w, Z[i], E[i], opts).value
        except (GeodesicError, ArithmeticError, DomainError) as exc:
            logger.warning("geodesic failed for pair %d: %s", i, exc)
            return float('nan')

    return np.array(parallel_map(one, range(Z.shape[0]), threads), dtype=float)
