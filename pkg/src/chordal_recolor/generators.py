"""Seeded generators of chordal graphs and proper colorings."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from itertools import combinations
from typing import List, Optional, Tuple

from .exceptions import InfeasibleSpec
from .graph import Graph, canonical_coloring, maximum_cardinality_search
from .rng import SplitMix64

MODELS = ("ktree", "interval", "pathpower", "path")


@dataclass(frozen=True)
class GenSpec:
    """What to generate.

    ``omega`` is the clique-size target (for ``pathpower`` the power is
    ``omega - 1``; ``path`` ignores it).  ``max_degree`` caps the degree,
    ``None`` meaning no cap.
    """

    model: str
    n: int
    omega: int = 2
    max_degree: Optional[int] = None
    seed: int = 0


def ktree(n: int, omega: int, max_degree: Optional[int], rng: SplitMix64) -> Graph:
    """Partial ``(omega-1)``-tree grown from ``K_omega``.

    Each new vertex is attached to a uniformly chosen ``(omega-1)``-clique
    whose members all still have degree below the cap.
    """
    if omega < 1 or n < omega:
        raise InfeasibleSpec(f"ktree needs n >= omega >= 1 (n={n}, omega={omega})")
    cap = max_degree if max_degree is not None else n
    if n > omega and cap < omega:
        raise InfeasibleSpec(f"degree cap {cap} leaves no room to attach to a {omega - 1}-clique")
    if omega - 1 > cap:
        raise InfeasibleSpec(f"K_{omega} already exceeds the degree cap {cap}")
    deg = [0] * n
    edges: List[Tuple[int, int]] = []
    for u, v in combinations(range(omega), 2):
        edges.append((u, v))
        deg[u] += 1
        deg[v] += 1
    pool: List[tuple] = [tuple(c) for c in combinations(range(omega), omega - 1)]
    for v in range(omega, n):
        while True:
            if not pool:
                raise InfeasibleSpec(f"degree cap {cap} exhausted after {v} vertices")
            i = rng.below(len(pool))
            base = pool[i]
            if all(deg[u] < cap for u in base):
                break
            pool[i] = pool[-1]
            pool.pop()
        for u in base:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
        clique = base + (v,)
        pool.extend(tuple(c) for c in combinations(clique, omega - 1) if v in c)
        if omega == 1:
            pool.append(())
    return Graph.from_edges(n, edges)


def pathpower(n: int, p: int) -> Graph:
    """``p``-th power of the path on ``n`` vertices."""
    if n < 0 or p < 0:
        raise InfeasibleSpec("pathpower needs n >= 0 and p >= 0")
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, min(n, i + p + 1))])


def path(n: int) -> Graph:
    return pathpower(n, 1)


def interval(n: int, omega: int, max_degree: Optional[int], rng: SplitMix64) -> Graph:
    """Interval graph from a random sequence of open/close events.

    An opened interval overlaps every interval open at that moment.  At
    most ``omega`` intervals are open at once and an interval only opens
    when every open interval still has degree below the cap.
    """
    if omega < 1 or n < 0:
        raise InfeasibleSpec("interval needs omega >= 1 and n >= 0")
    cap = max_degree if max_degree is not None else n
    if cap < omega - 1 and n >= omega:
        raise InfeasibleSpec(f"degree cap {cap} is below omega-1={omega - 1}")
    deg = [0] * n
    edges: List[Tuple[int, int]] = []
    active: List[int] = []
    v = 0
    while v < n:
        can_open = len(active) < omega and all(deg[u] < cap for u in active)
        if can_open and (not active or rng.random() < 0.6):
            for u in active:
                edges.append((u, v))
                deg[u] += 1
                deg[v] += 1
            active.append(v)
            v += 1
        else:
            i = rng.below(len(active))
            active[i] = active[-1]
            active.pop()
    return Graph.from_edges(n, edges)


def gen_graph(spec: GenSpec) -> Tuple[Graph, dict]:
    """Generate a chordal graph and certify it.

    Returns
    -------
    (Graph, dict)
        The graph and its metadata: measured ``omega``, ``delta`` and
        degeneracy ``d = omega - 1`` plus the generating spec.
    """
    if spec.model not in MODELS:
        raise InfeasibleSpec(f"unknown model {spec.model!r}; expected one of {', '.join(MODELS)}")
    rng = SplitMix64(spec.seed)
    if spec.model == "ktree":
        g = ktree(spec.n, spec.omega, spec.max_degree, rng)
    elif spec.model == "interval":
        g = interval(spec.n, spec.omega, spec.max_degree, rng)
    elif spec.model == "pathpower":
        g = pathpower(spec.n, max(spec.omega - 1, 0))
    else:
        g = path(spec.n)
    if spec.max_degree is not None and g.max_degree > spec.max_degree:
        raise InfeasibleSpec(f"{spec.model} on {spec.n} vertices has degree {g.max_degree} > {spec.max_degree}")
    omega = canonical_coloring(g, maximum_cardinality_search(g)).omega
    meta = {"omega": omega, "delta": g.max_degree, "d": max(omega - 1, 0), "spec": asdict(spec)}
    return g, meta


def gen_coloring(g: Graph, k: int, seed: int = 0) -> List[int]:
    """Random proper coloring with colors in ``1..k``.

    Vertices are colored greedily in a seeded random order, each taking a
    uniformly random admissible color.  If some vertex is left without a
    color (possible when ``k`` is close to ``omega``), the attempt restarts
    along the reverse of a perfect elimination ordering, where at most
    ``omega - 1`` neighbours are colored before each vertex.
    """
    rng = SplitMix64(seed)
    color = _greedy(g, k, rng.permutation(g.n), rng)
    if color is None:
        order = list(reversed(maximum_cardinality_search(g).order))
        color = _greedy(g, k, order, rng)
    if color is None:
        raise InfeasibleSpec(f"{k} colors are not enough for this graph")
    return color


def _greedy(g: Graph, k: int, order, rng: SplitMix64) -> Optional[List[int]]:
    color = [0] * g.n
    for v in order:
        used = {color[u] for u in g.adjacency[v]}
        free = [c for c in range(1, k + 1) if c not in used]
        if not free:
            return None
        color[v] = rng.choice(free)
    return color
