import random

import pytest

from stochmatch.graph import Graph, Matching


def random_graph(rng: random.Random, n_max: int = 10, edge_cap: int | None = None) -> Graph:
    n = rng.randint(1, n_max)
    density = rng.random()
    pairs = [
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if rng.random() < density
    ]
    if edge_cap is not None and len(pairs) > edge_cap:
        pairs = sorted(rng.sample(pairs, edge_cap))
    return Graph(n, pairs)


def random_maximal_matching(rng: random.Random, g: Graph) -> Matching:
    ids = list(range(g.m))
    rng.shuffle(ids)
    used = set()
    chosen = []
    for eid in ids:
        u, v = g.edge(eid)
        if u not in used and v not in used:
            used.add(u)
            used.add(v)
            chosen.append(eid)
    return Matching(frozenset(chosen))


def random_submatching(rng: random.Random, g: Graph) -> Matching:
    m = random_maximal_matching(rng, g)
    keep = frozenset(e for e in m.edges if rng.random() < 0.7)
    return Matching(keep)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)
