from __future__ import annotations

import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from chordal_recolor.graph import Graph

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("default")


def grow_chordal(n: int, max_clique: int, rnd: random.Random) -> tuple[Graph, list[list[int]]]:
    """Chordal graph built by repeatedly adding a vertex onto an existing clique.

    Returns the graph and the clique each vertex was attached to.
    """
    cliques: list[list[int]] = [[]]
    attached: list[list[int]] = []
    edges = []
    for v in range(n):
        base = rnd.choice(cliques)
        size = rnd.randint(0, min(len(base), max_clique - 1))
        sub = sorted(rnd.sample(base, size))
        edges += [(u, v) for u in sub]
        attached.append(sub)
        cliques.append(sub + [v])
    return Graph.from_edges(n, edges), attached


def greedy_coloring(g: Graph, attached: list[list[int]], k: int, rnd: random.Random) -> list[int]:
    # insertion order: earlier neighbours of v are exactly attached[v], a clique
    color = [0] * g.n
    for v in range(g.n):
        used = {color[u] for u in attached[v]}
        color[v] = rnd.choice([c for c in range(1, k + 1) if c not in used])
    return color


@st.composite
def chordal_instances(draw, max_n: int = 14, max_clique: int = 4, extra: int = 0):
    """(graph, omega, k, c1, c2) with ``k = omega + 3 + extra``."""
    n = draw(st.integers(0, max_n))
    w = draw(st.integers(1, max_clique))
    rnd = random.Random(draw(st.integers(0, 2**32 - 1)))
    g, attached = grow_chordal(n, w, rnd)
    omega = max([len(a) + 1 for a in attached], default=1)
    k = omega + 3 + extra
    return g, omega, k, greedy_coloring(g, attached, k, rnd), greedy_coloring(g, attached, k, rnd)


@pytest.fixture
def triangle():
    return Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])
