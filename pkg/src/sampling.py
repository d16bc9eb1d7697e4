# -*- coding: utf-8 -*-
"""
Point and pair samplers for supremum estimation
===============================================

The semi-norms are suprema over Ω and over Ω×Ω. They are estimated as maxima
over deterministic sample sets:

    grid(resolution)             nodes linspace(lower, upper, resolution+1) per
                                 axis; doubling the resolution keeps every node
    low_discrepancy(count, seed) scrambled Halton points (scipy.stats.qmc)

Every generated point lies in the domain shrunk by `boundary_margin`.

Pair schedules combine `pair_budget` random pairs with a near-diagonal
schedule: each sample point z is paired with z + h·u for every separation h
(default 1e-2, 1e-3) and every direction u of a fixed set (the coordinate axes
and the diagonals (e_j ± e_k)/√2). Random pairs undershoot suprema that are
attained in the diagonal limit, so the schedule is not optional.

Random pair endpoints are uniform points of the shrunk domain drawn from the
seed alone, so they do not change when the resolution or the point count
grows. Grid nodes and Halton prefixes are nested too, which makes every pair
estimate non-decreasing under refinement.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy.stats import qmc

from src.errors import ParameterError

logger = logging.getLogger(__name__)

DEFAULT_MARGIN = 0.02
NEAR_DIAGONAL = (1e-2, 1e-3)
_MAX_ROUNDS = 64


def low_discrepancy_points(domain, count, seed=0, margin=0.0):
    """
    `count` scrambled Halton points inside `domain` shrunk by `margin`.

    Points are drawn in the bounding box and filtered, in draw order, so the
    first k points of a larger request equal a request for k points.
    """
    count = int(count)
    if count < 1:
        raise ParameterError("sample count must be >= 1")
    lo, hi = domain.bounds
    engine = qmc.Halton(d=domain.dim, scramble=True, seed=int(seed))
    kept = []
    n_kept = 0
    batch = max(64, 2 * count)
    for _ in range(_MAX_ROUNDS):
        pts = qmc.scale(engine.random(batch), lo, hi)
        if margin > 0.0:
            inside = np.asarray(domain.contains_shrunk(pts, margin), dtype=bool)
        else:
            inside = np.asarray(domain.contains(pts), dtype=bool)
        pts = pts[inside]
        kept.append(pts)
        n_kept += pts.shape[0]
        if n_kept >= count:
            break
    out = np.vstack(kept)[:count]
    if out.shape[0] < count:
        logger.warning("only %d of %d sample points landed in the domain", out.shape[0], count)
    return out


def grid_points(domain, resolution, margin=0.0):
    """Grid nodes of the bounding box, filtered to the shrunk domain, in C order."""
    resolution = int(resolution)
    if resolution < 1:
        raise ParameterError("grid resolution must be >= 1")
    lo, hi = domain.bounds
    axes = [np.linspace(lo[j], hi[j], resolution + 1) for j in range(domain.dim)]
    mesh = np.meshgrid(*axes, indexing='ij')
    pts = np.stack([g.ravel() for g in mesh], axis=-1)
    if margin > 0.0:
        inside = np.asarray(domain.contains_shrunk(pts, margin), dtype=bool)
    else:
        inside = np.asarray(domain.contains(pts), dtype=bool)
    return pts[inside]


def diagonal_directions(m):
    """Unit directions e_j and (e_j ± e_k)/√2, j < k."""
    eye = np.eye(m)
    dirs = [eye[j] for j in range(m)]
    for j in range(m):
        for k in range(j + 1, m):
            dirs.append((eye[j] + eye[k]) / np.sqrt(2.0))
            dirs.append((eye[j] - eye[k]) / np.sqrt(2.0))
    return np.array(dirs)


def uniform_points(domain, count, rng, margin=0.0):
    """`count` uniform points of the shrunk domain by rejection from the bounding box."""
    lo, hi = domain.bounds
    kept = []
    n_kept = 0
    for _ in range(_MAX_ROUNDS):
        pts = rng.uniform(lo, hi, size=(max(64, 2 * int(count)), domain.dim))
        if margin > 0.0:
            inside = np.asarray(domain.contains_shrunk(pts, margin), dtype=bool)
        else:
            inside = np.asarray(domain.contains(pts), dtype=bool)
        kept.append(pts[inside])
        n_kept += int(np.sum(inside))
        if n_kept >= count:
            break
    out = np.vstack(kept)[:int(count)]
    if out.shape[0] < count:
        logger.warning("only %d of %d random points landed in the domain", out.shape[0], count)
    return out


def random_unit_vectors(rng, count, m):
    v = rng.normal(size=(int(count), int(m)))
    n = np.linalg.norm(v, axis=1)
    n[n == 0.0] = 1.0
    return v / n[:, None]


@dataclass(frozen=True)
class PairSet(object):
    """Sampled pairs; separation is 0 for random pairs, h for near-diagonal ones."""
    z: np.ndarray
    e: np.ndarray
    separation: np.ndarray

    def __len__(self):
        return self.z.shape[0]

    def subset(self, mask):
        return PairSet(self.z[mask], self.e[mask], self.separation[mask])


@dataclass(frozen=True)
class Sampler(object):
    """
    Deterministic sampling plan for supremum estimates.

    Parameters
    ----------
    strategy : str
        'grid' or 'low_discrepancy'.
    resolution : int
        Grid subdivisions per axis ('grid').
    count : int
        Number of points ('low_discrepancy').
    seed : int
        Seed of the Halton scrambling and of the random pair draw.
    boundary_margin : float
        Points are kept in the domain shrunk by this margin.
    pair_budget : int
        Number of random pairs for the Lipschitz-type estimators.
    near_diagonal : tuple of float
        Separations of the near-diagonal schedule.
    """
    strategy: str = 'low_discrepancy'
    resolution: int = 200
    count: int = 4096
    seed: int = 0
    boundary_margin: float = DEFAULT_MARGIN
    pair_budget: int = 10000
    near_diagonal: Tuple[float, ...] = NEAR_DIAGONAL

    def __post_init__(self):
        if self.strategy not in ('grid', 'low_discrepancy'):
            raise ParameterError("unknown sampling strategy %r" % self.strategy)
        if not (self.boundary_margin >= 0.0):
            raise ParameterError("boundary_margin must be >= 0")
        if int(self.pair_budget) < 0:
            raise ParameterError("pair_budget must be >= 0")

    def describe(self):
        d = {'strategy': self.strategy, 'seed': int(self.seed),
             'boundary_margin': float(self.boundary_margin),
             'pair_budget': int(self.pair_budget),
             'near_diagonal': [float(h) for h in self.near_diagonal]}
        if self.strategy == 'grid':
            d['resolution'] = int(self.resolution)
        else:
            d['count'] = int(self.count)
        return d

    def points(self, domain):
        if self.strategy == 'grid':
            return grid_points(domain, self.resolution, self.boundary_margin)
        return low_discrepancy_points(domain, self.count, self.seed, self.boundary_margin)

    def pairs(self, domain, base=None):
        """
        Random pairs followed by the near-diagonal schedule, in a fixed order.

        Without `base`, random pairs are uniform points of the shrunk domain
        and depend only on the seed and the budget. With `base`, they are drawn
        among the given points.
        """
        pts = self.points(domain) if base is None else np.asarray(base, dtype=float)
        m = domain.dim
        rng = np.random.default_rng(int(self.seed))
        zs, es, seps = [], [], []

        n = pts.shape[0]
        budget = int(self.pair_budget)
        if budget > 0 and base is None:
            ends = uniform_points(domain, 2 * budget, rng, self.boundary_margin)
            z, e = ends[0::2], ends[1::2]
            z = z[:e.shape[0]]
            keep = np.any(z != e, axis=1)
            zs.append(z[keep])
            es.append(e[keep])
            seps.append(np.zeros(int(np.sum(keep))))
        elif budget > 0 and n >= 2:
            i = rng.integers(0, n, budget)
            j = rng.integers(0, n, budget)
            keep = np.any(pts[i] != pts[j], axis=1)
            zs.append(pts[i[keep]])
            es.append(pts[j[keep]])
            seps.append(np.zeros(int(np.sum(keep))))

        dirs = diagonal_directions(m)
        for h in self.near_diagonal:
            z = np.repeat(pts, dirs.shape[0], axis=0)
            e = z + float(h) * np.tile(dirs, (n, 1))
            keep = np.asarray(domain.contains_shrunk(e, self.boundary_margin), dtype=bool)
            zs.append(z[keep])
            es.append(e[keep])
            seps.append(np.full(int(np.sum(keep)), float(h)))

        if not zs:
            empty = np.zeros((0, m))
            return PairSet(empty, empty, np.zeros(0))
        return PairSet(np.vstack(zs), np.vstack(es), np.concatenate(seps))


def grid_sampler(resolution=200, **kwargs):
    return Sampler(strategy='grid', resolution=resolution, **kwargs)


def low_discrepancy_sampler(count=4096, seed=0, **kwargs):
    return Sampler(strategy='low_discrepancy', count=count, seed=seed, **kwargs)
