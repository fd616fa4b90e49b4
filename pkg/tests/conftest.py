from __future__ import annotations

import random

import pytest

from tourwidth.bags import Bag


def random_bag(rng: random.Random, k: int, n_vertices: int, first_id: int = 0) -> Bag:
    """An arbitrary bag: random internal tournament, boundary, colouring and recolouring."""
    verts = tuple(range(first_id, first_id + n_vertices))
    edges = set()
    for i, u in enumerate(verts):
        for v in verts[i + 1:]:
            edges.add((u, v) if rng.random() < 0.5 else (v, u))
    boundary = {v: tuple(rng.randint(0, 1) for _ in range(k)) for v in verts}
    colour = {v: rng.randrange(k) for v in verts}
    rho = tuple(rng.randrange(k) for _ in range(k))
    return Bag(k, verts, frozenset(edges), boundary, colour, rho)


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20261016)
