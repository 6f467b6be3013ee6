"""Graphs, chordality certification, canonical coloring and clique trees."""

from __future__ import annotations

import heapq
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .exceptions import GraphFormatError, InternalInvariantError, NotChordal, VertexNotInSubtree


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``adjacency[v]`` is the sorted tuple of neighbours of ``v``.
    """

    n: int
    adjacency: tuple

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        if not isinstance(n, int) or isinstance(n, bool) or n < 0:
            raise GraphFormatError(f"vertex count must be a non-negative integer, got {n!r}")
        nbrs: List[set] = [set() for _ in range(n)]
        for e in edges:
            if len(e) != 2:
                raise GraphFormatError(f"edge {e!r} is not a pair")
            u, v = e
            for x in (u, v):
                if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < n:
                    raise GraphFormatError(f"vertex {x!r} out of range [0, {n})")
            if u == v:
                raise GraphFormatError(f"self-loop on vertex {u}")
            if v in nbrs[u]:
                raise GraphFormatError(f"duplicate edge {u}-{v}")
            nbrs[u].add(v)
            nbrs[v].add(u)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs))

    @property
    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def edges(self):
        for u, nb in enumerate(self.adjacency):
            for v in nb:
                if u < v:
                    yield (u, v)

    def neighbor_sets(self) -> List[frozenset]:
        return [frozenset(a) for a in self.adjacency]

    def components(self) -> List[List[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp, todo = [s], [s]
            while todo:
                u = todo.pop()
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        todo.append(w)
            comps.append(sorted(comp))
        return comps

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges()]}


def load_graph(data) -> Graph:
    """Parse the ``{"n": int, "edges": [[u, v], ...]}`` format (bytes, str or dict)."""
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, dict) or "n" not in data or "edges" not in data:
        raise GraphFormatError('graph JSON must be an object with "n" and "edges"')
    if not isinstance(data["edges"], list):
        raise GraphFormatError('"edges" must be a list')
    return Graph.from_edges(data["n"], data["edges"])


def load_coloring(data) -> List[int]:
    if isinstance(data, (bytes, bytearray)):
        data = data.decode("utf-8")
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(data, list) or not all(
        isinstance(c, int) and not isinstance(c, bool) for c in data
    ):
        raise GraphFormatError("coloring JSON must be an array of integers")
    return list(data)


# ---------------------------------------------------------------------------
# Perfect elimination orderings


@dataclass(frozen=True)
class Peo:
    order: tuple
    position: tuple  # position[v] = index of v in order


def _make_peo(order: Sequence[int]) -> Peo:
    pos = [0] * len(order)
    for i, v in enumerate(order):
        pos[v] = i
    return Peo(tuple(order), tuple(pos))


def later_neighbors(g: Graph, peo: Peo, v: int) -> List[int]:
    pv = peo.position[v]
    return sorted((u for u in g.adjacency[v] if peo.position[u] > pv), key=peo.position.__getitem__)


def is_perfect_elimination_ordering(g: Graph, order: Sequence[int]) -> bool:
    """Check that every vertex's later neighbourhood is a clique (pairwise test)."""
    if sorted(order) != list(range(g.n)):
        return False
    peo = _make_peo(order)
    nbrs = g.neighbor_sets()
    for v in order:
        later = later_neighbors(g, peo, v)
        for i, a in enumerate(later):
            for b in later[i + 1:]:
                if b not in nbrs[a]:
                    return False
    return True


def peo_from_order(g: Graph, order: Sequence[int]) -> Peo:
    """Wrap a user-supplied ordering after checking it is a PEO of ``g``."""
    if not is_perfect_elimination_ordering(g, order):
        raise ValueError(f"{list(order)} is not a perfect elimination ordering")
    return _make_peo(list(order))


def find_hole(g: Graph) -> Optional[List[int]]:
    """Return an induced cycle of length >= 4, or None when ``g`` is chordal."""
    nbrs = g.neighbor_sets()
    for v in range(g.n):
        nv = g.adjacency[v]
        for i, u in enumerate(nv):
            for w in nv[i + 1:]:
                if w in nbrs[u]:
                    continue
                blocked = set(nv) | {v}
                blocked.discard(u)
                blocked.discard(w)
                prev = {u: None}
                queue = deque([u])
                while queue:
                    x = queue.popleft()
                    if x == w:
                        break
                    for y in g.adjacency[x]:
                        if y not in prev and y not in blocked:
                            prev[y] = x
                            queue.append(y)
                if w in prev:
                    path = []
                    x = w
                    while x is not None:
                        path.append(x)
                        x = prev[x]
                    return [v] + path[::-1]
    return None


def maximum_cardinality_search(g: Graph) -> Peo:
    """Perfect elimination ordering by maximum cardinality search.

    Ties are broken by the smallest vertex id.  The candidate ordering is
    always verified; a failure raises :class:`NotChordal` carrying a hole.
    """
    n = g.n
    weight = [0] * n
    numbered = [False] * n
    heap = [(0, v) for v in range(n)]
    heapq.heapify(heap)
    picked = []
    while heap:
        w, v = heapq.heappop(heap)
        if numbered[v] or -w != weight[v]:
            continue
        numbered[v] = True
        picked.append(v)
        for u in g.adjacency[v]:
            if not numbered[u]:
                weight[u] += 1
                heapq.heappush(heap, (-weight[u], u))
    order = picked[::-1]
    peo = _make_peo(order)
    if not _verify_peo_fast(g, peo):
        raise NotChordal(find_hole(g))
    return peo


def _verify_peo_fast(g: Graph, peo: Peo) -> bool:
    # later(v) \ {parent(v)} must lie in N(parent(v)); equivalent to the clique test
    nbrs = g.neighbor_sets()
    for v in peo.order:
        later = later_neighbors(g, peo, v)
        if len(later) < 2:
            continue
        parent = later[0]
        np_ = nbrs[parent]
        for u in later[1:]:
            if u not in np_:
                return False
    return True


def is_chordal(g: Graph) -> bool:
    try:
        maximum_cardinality_search(g)
    except NotChordal:
        return False
    return True


# ---------------------------------------------------------------------------
# Canonical coloring


@dataclass(frozen=True)
class CanonicalClasses:
    """Canonical coloring ``c0`` (colors ``1..omega``) and its classes.

    Class ``p`` (0-based) is the set of vertices with canonical color ``p + 1``.
    """

    c0: tuple
    classes: tuple
    omega: int

    def class_of(self, v: int) -> int:
        return self.c0[v] - 1


def canonical_coloring(g: Graph, peo: Peo) -> CanonicalClasses:
    c0 = [0] * g.n
    for v in reversed(peo.order):
        used = {c0[u] for u in g.adjacency[v] if c0[u]}
        c = 1
        while c in used:
            c += 1
        c0[v] = c
    omega = max(c0, default=0)
    classes = [[] for _ in range(omega)]
    for v, c in enumerate(c0):
        classes[c - 1].append(v)
    return CanonicalClasses(tuple(c0), tuple(frozenset(x) for x in classes), omega)


# ---------------------------------------------------------------------------
# Clique trees


@dataclass
class CliqueTree:
    """Clique forest; one tree per connected component.

    ``height`` and ``height_table`` are filled by :func:`root_and_heights`.
    """

    bags: List[frozenset]
    adj: List[List[int]]
    roots: List[int] = field(default_factory=list)
    parent: List[int] = field(default_factory=list)
    children: List[List[int]] = field(default_factory=list)
    height: List[int] = field(default_factory=list)
    height_table: Dict[int, List[int]] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.bags)

    def tree_components(self) -> List[List[int]]:
        seen = [False] * len(self.bags)
        out = []
        for s in range(len(self.bags)):
            if seen[s]:
                continue
            seen[s] = True
            comp, todo = [], [s]
            while todo:
                x = todo.pop()
                comp.append(x)
                for y in self.adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        todo.append(y)
            out.append(sorted(comp))
        return out


def build_clique_tree(g: Graph, peo: Peo, check: bool = True) -> CliqueTree:
    """Clique forest built by sweeping the PEO from its last vertex back.

    ``later(v)`` is always contained in the clique holding its earliest
    member ``p``; ``v`` either extends that clique (when ``later(v)`` is all
    of it) or opens a new clique attached to it.
    """
    node_of = [-1] * g.n
    bags: List[set] = []
    edges: List[tuple] = []
    for v in reversed(peo.order):
        later = later_neighbors(g, peo, v)
        if not later:
            node_of[v] = len(bags)
            bags.append({v})
            continue
        x = node_of[later[0]]
        if len(bags[x]) == len(later):
            bags[x].add(v)
            node_of[v] = x
        else:
            node_of[v] = len(bags)
            bags.append({v, *later})
            edges.append((x, node_of[v]))
    adj: List[List[int]] = [[] for _ in bags]
    for x, y in edges:
        adj[x].append(y)
        adj[y].append(x)
    tree = CliqueTree(bags=[frozenset(b) for b in bags], adj=[sorted(a) for a in adj])
    if check:
        problems = clique_tree_violations(g, tree)
        if problems:
            raise InternalInvariantError("clique tree invariant failed: " + problems[0])
    return tree


def clique_tree_violations(g: Graph, tree: CliqueTree, omega: Optional[int] = None) -> List[str]:
    """Return human-readable violations of the clique-tree conditions."""
    out = []
    nbrs = g.neighbor_sets()
    for x, bag in enumerate(tree.bags):
        members = sorted(bag)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                if b not in nbrs[a]:
                    out.append(f"bag {x} is not a clique ({a},{b})")
        if omega is not None and len(bag) > omega:
            out.append(f"bag {x} larger than omega")
    holders: List[List[int]] = [[] for _ in range(g.n)]
    for x, bag in enumerate(tree.bags):
        for v in bag:
            holders[v].append(x)
    for v in range(g.n):
        hs = holders[v]
        if not hs:
            out.append(f"vertex {v} in no bag")
            continue
        hset = set(hs)
        seen = {hs[0]}
        todo = [hs[0]]
        while todo:
            x = todo.pop()
            for y in tree.adj[x]:
                if y in hset and y not in seen:
                    seen.add(y)
                    todo.append(y)
        if len(seen) != len(hset):
            out.append(f"bags of vertex {v} are not connected")
    for x in range(len(tree.bags)):
        for y in tree.adj[x]:
            if x < y and (not (tree.bags[x] - tree.bags[y]) or not (tree.bags[y] - tree.bags[x])):
                out.append(f"edge {x}-{y} has nested bags")
    n_edges = sum(len(a) for a in tree.adj) // 2
    if n_edges != len(tree.bags) - len(tree.tree_components()):
        out.append("clique graph is not a forest")
    for u, v in g.edges():
        if not any(u in b and v in b for b in (tree.bags[x] for x in holders[u])):
            out.append(f"edge {u}-{v} not covered by a bag")
    return out


def root_and_heights(tree: CliqueTree, roots: Optional[Sequence[int]] = None) -> CliqueTree:
    """Root every tree of the forest and fill heights and the height table.

    By default each tree is rooted at its smallest node id.
    """
    m = len(tree.bags)
    if roots is None:
        roots = [comp[0] for comp in tree.tree_components()]
    tree.roots = list(roots)
    tree.parent = [-1] * m
    tree.children = [[] for _ in range(m)]
    tree.height = [-1] * m
    tree.height_table = {}
    for r in roots:
        tree.height[r] = 0
        queue = deque([r])
        while queue:
            x = queue.popleft()
            tree.height_table.setdefault(tree.height[x], []).append(x)
            for y in tree.adj[x]:
                if tree.height[y] < 0:
                    tree.height[y] = tree.height[x] + 1
                    tree.parent[y] = x
                    tree.children[x].append(y)
                    queue.append(y)
    if any(h < 0 for h in tree.height):
        raise InternalInvariantError("roots do not cover every tree of the forest")
    return tree


def subtree_start_heights(tree: CliqueTree, root: int, limit: Optional[int] = None) -> Dict[int, int]:
    """Start height of every vertex of the subtree rooted at ``root``.

    The start height of ``v`` is the largest height, relative to ``root``,
    of a bag of the subtree containing ``v``.  With ``limit`` set, only
    bags at relative height ``<= limit`` are explored; vertices reaching
    that depth are reported with height ``limit`` (meaning "at least").
    """
    start: Dict[int, int] = {}
    stack = [(root, 0)]
    while stack:
        x, h = stack.pop()
        for v in tree.bags[x]:
            if start.get(v, -1) < h:
                start[v] = h
        if limit is not None and h >= limit:
            continue
        for y in tree.children[x]:
            stack.append((y, h + 1))
    return start


def start_height(tree: CliqueTree, subtree_root: int, v: int) -> int:
    heights = subtree_start_heights(tree, subtree_root)
    if v not in heights:
        raise VertexNotInSubtree(f"vertex {v} does not appear below node {subtree_root}")
    return heights[v]
