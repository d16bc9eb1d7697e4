import os, sys

import numpy as np
import pytest

# Ensure project root is importable during pytest collection.
PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

from src.geometry import unit_ball  # noqa: E402
from src.weights import builtin_weight  # noqa: E402


@pytest.fixture
def ball2():
    return unit_ball(2)


@pytest.fixture
def ball3():
    return unit_ball(3)


@pytest.fixture
def hyperbolic2(ball2):
    return builtin_weight('hyperbolic', None, ball2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_ball_points(rng, count, m, rmax):
    """count points of B^m with norm <= rmax, uniform in radius and direction."""
    v = rng.normal(size=(count, m))
    v /= np.linalg.norm(v, axis=1)[:, None]
    r = rmax * rng.uniform(0.0, 1.0, count)
    return v * r[:, None]
