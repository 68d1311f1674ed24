import random

import pytest

from pachner import build
from pachner.moves import zero_move

STANDARD_TRIANGLES = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]


@pytest.fixture
def standard():
    return build(4, STANDARD_TRIANGLES)


def random_stacked_sphere(n, seed):
    """Random stacking sequence from the standard sphere up to n vertices."""
    rng = random.Random(seed)
    t = build(4, STANDARD_TRIANGLES)
    while t.n < n:
        t = zero_move(t, rng.choice(t.triangles))
    return t


def apply_permutation(t, perm):
    """Relabel by a permutation given as a dict old -> new."""
    return build(t.n, [tuple(sorted(perm[v] for v in tri))
                       for tri in t.triangles])


def random_permutation(n, seed):
    rng = random.Random(seed)
    labels = list(range(1, n + 1))
    rng.shuffle(labels)
    return {i + 1: labels[i] for i in range(n)}
