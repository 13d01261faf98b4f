import random
from fractions import Fraction

import pytest


@pytest.fixture
def rng():
    return random.Random(20261014)


def random_point_set(rng, max_dim=6, max_points=8):
    dim = rng.randint(1, max_dim)
    k = rng.randint(1, max_points)
    pts = [[Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2, 3])) for _ in range(dim)] for _ in range(k)]
    metric = [Fraction(rng.randint(1, 4), rng.choice([1, 2])) for _ in range(dim)]
    return pts, metric
