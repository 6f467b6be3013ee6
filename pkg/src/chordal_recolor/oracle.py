"""Brute-force reconfiguration graph of small instances.

States are proper colorings encoded as base-``k`` integers over the vertex
order (digit ``v`` is ``color[v] - 1``).  Two states are adjacent when they
differ on exactly one vertex.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .exceptions import Disconnected, InvalidColoring, NoProperColoring, NotChordal, StateSpaceTooLarge
from .graph import Graph, maximum_cardinality_search

DEFAULT_CAP = 5_000_000


def encode(coloring: Sequence[int], k: int) -> int:
    code = 0
    for c in reversed(coloring):
        code = code * k + (c - 1)
    return code


def decode(code: int, n: int, k: int) -> list:
    out = []
    for _ in range(n):
        code, d = divmod(code, k)
        out.append(d + 1)
    return out


def _digit(codes: np.ndarray, v: int, k: int) -> np.ndarray:
    return (codes // (k ** v)) % k


def _enumeration_order(g: Graph) -> list:
    # along a reversed elimination ordering every partial coloring extends
    # as soon as k >= omega, so the intermediate sets never overshoot
    try:
        return list(reversed(maximum_cardinality_search(g).order))
    except NotChordal:
        return list(range(g.n))


def proper_colorings(g: Graph, k: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Sorted codes of every proper ``k``-coloring of ``g``.

    Raises
    ------
    StateSpaceTooLarge
        When more than ``cap`` partial or complete colorings appear.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if g.n and k ** g.n >= 2 ** 63:
        # codes no longer fit in int64; the state space is huge anyway
        raise StateSpaceTooLarge(f"k^n = {k}^{g.n} exceeds the encodable range")
    codes = np.zeros(1, dtype=np.int64)
    done = []
    for v in _enumeration_order(g):
        earlier = [u for u in g.adjacency[v] if u in done]
        digits = [_digit(codes, u, k) for u in earlier]
        parts = []
        for c in range(k):
            mask = np.ones(len(codes), dtype=bool)
            for d in digits:
                mask &= d != c
            parts.append(codes[mask] + c * k ** v)
        codes = np.concatenate(parts) if parts else codes[:0]
        done.append(v)
        if len(codes) > cap:
            raise StateSpaceTooLarge(f"more than {cap} colorings with k={k} on {g.n} vertices")
    codes.sort()
    return codes


class ReconfigurationGraph:
    """Implicit reconfiguration graph: states plus a neighbour expansion."""

    def __init__(self, g: Graph, k: int, cap: int = DEFAULT_CAP):
        self.g = g
        self.k = k
        self.states = proper_colorings(g, k, cap)
        if len(self.states) == 0:
            raise NoProperColoring(f"no proper coloring with {k} colors")

    def __len__(self) -> int:
        return len(self.states)

    def index(self, coloring: Sequence[int]) -> int:
        if len(coloring) != self.g.n:
            raise InvalidColoring("coloring length does not match the graph")
        code = encode(coloring, self.k)
        i = int(np.searchsorted(self.states, code))
        if i >= len(self.states) or self.states[i] != code:
            raise InvalidColoring("not a proper coloring of the graph")
        return i

    def expand(self, frontier: np.ndarray) -> np.ndarray:
        """Indices of all states one recoloring away from ``frontier``."""
        k = self.k
        codes = self.states[frontier]
        out = []
        for v in range(self.g.n):
            mine = _digit(codes, v, k)
            nbr = [_digit(codes, u, k) for u in self.g.adjacency[v]]
            for c in range(k):
                mask = mine != c
                for d in nbr:
                    mask &= d != c
                if mask.any():
                    moved = codes[mask] + (c - mine[mask]) * k ** v
                    out.append(np.searchsorted(self.states, moved))
        if not out:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(out))

    def bfs(self, source: int) -> np.ndarray:
        """Distances from ``source`` (``-1`` where unreachable)."""
        dist = np.full(len(self.states), -1, dtype=np.int64)
        dist[source] = 0
        frontier = np.array([source], dtype=np.int64)
        level = 0
        while len(frontier):
            level += 1
            nxt = self.expand(frontier)
            nxt = nxt[dist[nxt] < 0]
            dist[nxt] = level
            frontier = nxt
        return dist


def bfs_distance(g: Graph, k: int, c1: Sequence[int], c2: Sequence[int], cap: int = DEFAULT_CAP) -> Optional[int]:
    """Exact number of recolorings from ``c1`` to ``c2``; ``None`` if unreachable."""
    if list(c1) == list(c2):
        ReconfigurationGraph(g, k, cap).index(c1)
        return 0
    rg = ReconfigurationGraph(g, k, cap)
    dist = rg.bfs(rg.index(c1))
    d = int(dist[rg.index(c2)])
    return d if d >= 0 else None


def components(g: Graph, k: int, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Component label of every proper coloring (sorted by code)."""
    rg = ReconfigurationGraph(g, k, cap)
    label = np.full(len(rg), -1, dtype=np.int64)
    comp = 0
    for s in range(len(rg)):
        if label[s] >= 0:
            continue
        label[rg.bfs(s) >= 0] = comp
        comp += 1
    return label


def reconfig_connected(g: Graph, k: int, cap: int = DEFAULT_CAP) -> bool:
    rg = ReconfigurationGraph(g, k, cap)
    return bool((rg.bfs(0) >= 0).all())


def reconfig_diameter(g: Graph, k: int, cap: int = DEFAULT_CAP) -> int:
    """Largest distance between two proper colorings.

    Raises
    ------
    Disconnected
        When the reconfiguration graph has several components.
    """
    rg = ReconfigurationGraph(g, k, cap)
    best = 0
    for s in range(len(rg)):
        dist = rg.bfs(s)
        if (dist < 0).any():
            raise Disconnected(f"reconfiguration graph of {len(rg)} colorings is disconnected")
        best = max(best, int(dist.max()))
    return best
