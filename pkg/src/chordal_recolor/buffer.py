"""Buffers below a clique, color vectors, region kinds and validity.

Conventions used throughout the package:

* classes are 0-based: class ``p`` holds the vertices of canonical color ``p + 1``;
* colors are 1-based; colors ``1..omega`` are canonical, the rest non-canonical;
* blocks are 0-based (``0 .. 3N-1``), block 0 being the deepest one;
* regions are 1-based (``1 .. N``); region ``j`` is made of blocks
  ``3j-3, 3j-2, 3j-1`` (its A, B and C blocks).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .exceptions import InternalInvariantError, KTooSmall, PropernessViolation
from .graph import CanonicalClasses, CliqueTree, Graph, subtree_start_heights

Vector = Tuple[int, ...]


@dataclass(frozen=True)
class BufferParams:
    omega: int
    delta: int
    k: int

    def __post_init__(self):
        if self.k < self.omega + 3:
            raise KTooSmall(f"k={self.k} colors is below omega+3={self.omega + 3}")
        if self.delta < 1:
            raise ValueError("delta must be >= 1")

    @property
    def pairs(self) -> int:
        """Number of class pairs, ``omega choose 2``."""
        return comb(self.omega, 2)

    @property
    def s(self) -> int:
        return 3 * self.pairs + 2

    @property
    def big_n(self) -> int:
        return self.s + self.k - self.omega + 1

    @property
    def n_blocks(self) -> int:
        return 3 * self.big_n

    @property
    def depth(self) -> int:
        return 3 * self.delta * self.big_n

    @property
    def temporaries(self) -> Tuple[int, int]:
        return (self.omega + 1, self.omega + 2)

    def canonical(self) -> Vector:
        return tuple(range(1, self.omega + 1))


def A(j: int) -> int:
    return 3 * j - 3


def B(j: int) -> int:
    return 3 * j - 2


def C(j: int) -> int:
    return 3 * j - 1


# ---------------------------------------------------------------------------
# Vectors and regions


def swap_coordinates(nu: Sequence[int], p: int, l: int) -> Vector:
    if p == l:
        raise ValueError("swap needs two distinct coordinates")
    out = list(nu)
    out[p], out[l] = out[l], out[p]
    return tuple(out)


def vector_difference(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(1 for a, b in zip(u, v) if a != b)


@dataclass(frozen=True)
class Waiting:
    name = "waiting"


@dataclass(frozen=True)
class ColorRegion:
    p: int
    c1: int
    z: int
    name = "color"


@dataclass(frozen=True)
class Transposition:
    p: int
    q: int
    c1: int
    c2: int
    z: int
    zp: int
    name = "transposition"

    @property
    def classes(self) -> frozenset:
        return frozenset((self.p, self.q))

    @property
    def colors(self) -> frozenset:
        return frozenset((self.c1, self.c2))

    @property
    def temporaries(self) -> frozenset:
        return frozenset((self.z, self.zp))


@dataclass(frozen=True)
class Irregular:
    reason: str
    name = "irregular"


RegionKind = Union[Waiting, ColorRegion, Transposition, Irregular]
WAITING = Waiting()


def classify_region(nu_a: Sequence[int], nu_b: Sequence[int], nu_c: Sequence[int], omega: int) -> RegionKind:
    for vec in (nu_a, nu_b, nu_c):
        if len(set(vec)) != len(vec):
            return Irregular("repeated color in a vector")
    if tuple(nu_a) == tuple(nu_b) == tuple(nu_c):
        return WAITING
    diff = [m for m in range(len(nu_a)) if not nu_a[m] == nu_b[m] == nu_c[m]]
    if len(diff) == 1:
        (p,) = diff
        c1, z = nu_a[p], nu_b[p]
        if nu_c[p] == z and c1 <= omega < z:
            return ColorRegion(p, c1, z)
        return Irregular(f"class {p} changes without forming a color region")
    if len(diff) == 2:
        p, q = diff
        c1, c2 = nu_a[p], nu_a[q]
        z, zp = nu_b[p], nu_b[q]
        if (
            nu_c[p] == c2
            and nu_c[q] == c1
            and c1 <= omega
            and c2 <= omega
            and z > omega
            and zp > omega
            and all(nu_a[m] <= omega for m in range(len(nu_a)) if m not in (p, q))
        ):
            return Transposition(p, q, c1, c2, z, zp)
        return Irregular(f"classes {p},{q} change without forming a transposition region")
    return Irregular(f"{len(diff)} classes change inside the region")


def region_vectors(nu: Sequence[Vector], j: int) -> Tuple[Vector, Vector, Vector]:
    return nu[A(j)], nu[B(j)], nu[C(j)]


def region_kind(nu: Sequence[Vector], j: int, omega: int) -> RegionKind:
    return classify_region(*region_vectors(nu, j), omega)


def transposition_of(nu: Sequence[Vector], j: int, omega: int) -> Optional[frozenset]:
    """Classes swapped by region ``j`` of the transposition buffer (None for identity)."""
    kind = region_kind(nu, j, omega)
    if isinstance(kind, Waiting):
        return None
    if isinstance(kind, Transposition):
        return kind.classes
    raise InternalInvariantError(f"region {j} is neither waiting nor a transposition: {kind}")


# ---------------------------------------------------------------------------
# Validity


VALID = "Valid"
ALMOST_VALID = "AlmostValid"
INVALID = "Invalid"


@dataclass(frozen=True)
class ValidityReport:
    status: str
    prop: Optional[str] = None
    region: Optional[int] = None
    detail: str = ""

    @property
    def valid(self) -> bool:
        return self.status == VALID

    @property
    def almost_valid(self) -> bool:
        return self.status in (VALID, ALMOST_VALID)


def check_validity(nu: Sequence[Vector], params: BufferParams) -> ValidityReport:
    """Classify a vector tuple as Valid, AlmostValid or Invalid."""
    big_n, s, omega = params.big_n, params.s, params.omega
    if len(nu) != params.n_blocks:
        return ValidityReport(INVALID, "length", None, f"expected {params.n_blocks} vectors")
    for b, vec in enumerate(nu):
        if len(vec) != omega or len(set(vec)) != omega or not all(1 <= c <= params.k for c in vec):
            return ValidityReport(INVALID, "vector", b // 3 + 1, f"block {b} is not a color vector")
    for j in range(1, big_n):
        if nu[C(j)] != nu[A(j + 1)]:
            return ValidityReport(INVALID, "1", j, "continuity broken")
    canon = params.canonical()
    if not nu[A(1)] == nu[B(1)] == nu[C(1)] == canon:
        return ValidityReport(INVALID, "2", 1, "first region not canonical")
    kinds = {j: region_kind(nu, j, omega) for j in range(1, big_n + 1)}
    temps = None
    for j in range(2, s):
        kind = kinds[j]
        if isinstance(kind, Transposition):
            if temps is None:
                temps = kind.temporaries
            elif kind.temporaries != temps:
                return ValidityReport(INVALID, "3", j, "temporary colors differ")
        elif not isinstance(kind, Waiting):
            return ValidityReport(INVALID, "3", j, f"{kind.name} region in transposition buffer")
    for j in range(s + 1, big_n):
        if not isinstance(kinds[j], (Waiting, ColorRegion)):
            return ValidityReport(INVALID, "4", j, f"{kinds[j].name} region in color buffer")
    if not isinstance(kinds[big_n], Waiting):
        return ValidityReport(INVALID, "5", big_n, "last region not waiting")
    ks = kinds[s]
    if isinstance(ks, Waiting):
        return ValidityReport(VALID)
    if isinstance(ks, Transposition):
        return ValidityReport(ALMOST_VALID, "5", s, "middle region is a transposition")
    return ValidityReport(INVALID, "5'", s, f"{ks.name} region in the middle")


def is_vectorially_proper(nu: Sequence[Vector]) -> bool:
    for u, v in zip(nu, nu[1:]):
        pos = {c: p for p, c in enumerate(u)}
        for q, c in enumerate(v):
            if c in pos and pos[c] != q:
                return False
    return True


def border_error(nu_c: Sequence[int], nu: Sequence[Vector]) -> int:
    return vector_difference(nu[-1], nu_c)


def clique_vector(bag, coloring: Sequence[int], classes: CanonicalClasses, k: int) -> Vector:
    """Vector of a clique: colors of its vertices, completed with the smallest free colors."""
    omega = classes.omega
    vec = [0] * omega
    for v in bag:
        vec[classes.c0[v] - 1] = coloring[v]
    used = set(vec)
    nxt = 1
    for p in range(omega):
        if vec[p] == 0:
            while nxt in used:
                nxt += 1
            vec[p] = nxt
            used.add(nxt)
    if max(vec, default=0) > k:
        raise InternalInvariantError("clique vector exceeds the palette")
    return tuple(vec)


def construct_valid_tuple(target: Sequence[int], params: BufferParams) -> List[Vector]:
    """A valid tuple whose last vector is ``target``.

    The canonical part of ``target`` is reached by transpositions in the
    earliest transposition-buffer regions; the non-canonical entries are
    introduced by color regions at the start of the color buffer.
    """
    omega, s, big_n = params.omega, params.s, params.big_n
    target = tuple(target)
    if len(target) != omega or len(set(target)) != omega:
        raise ValueError(f"{target} is not a color vector")
    free = iter(sorted(set(range(1, omega + 1)) - set(target)))
    middle = tuple(c if c <= omega else next(free) for c in target)
    z, zp = params.temporaries
    canon = params.canonical()
    nu = [canon] * (3 * big_n)
    cur = canon
    j = 2
    for p in range(omega):
        if cur[p] == middle[p]:
            continue
        q = cur.index(middle[p])
        after = swap_coordinates(cur, p, q)
        mid = list(cur)
        mid[p], mid[q] = z, zp
        nu[A(j)], nu[B(j)], nu[C(j)] = cur, tuple(mid), after
        cur = after
        j += 1
    for b in range(A(j), 3 * big_n):
        nu[b] = cur
    j = s + 1
    for p in range(omega):
        if target[p] > omega:
            nxt = list(cur)
            nxt[p] = target[p]
            nxt = tuple(nxt)
            nu[A(j)] = cur
            for b in range(B(j), 3 * big_n):
                nu[b] = nxt
            cur = nxt
            j += 1
    return nu


def dump_tuple(nu: Sequence[Vector], params: BufferParams) -> str:
    """One line per region: ``R<j> <kind> A=<vec> B=<vec> C=<vec>``."""

    def fmt(v):
        return "(" + ",".join(map(str, v)) + ")"

    lines = []
    for j in range(1, params.big_n + 1):
        a, b, c = region_vectors(nu, j)
        kind = classify_region(a, b, c, params.omega)
        lines.append(f"R{j} {kind.name} A={fmt(a)} B={fmt(b)} C={fmt(c)}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Buffer decomposition


@dataclass
class Buffer:
    """Vertices of the subtree below ``root`` split into ``3N`` height blocks.

    ``blocks[b]`` maps a class to the vertices of that class in block ``b``;
    ``tops[b]`` is the same for the vertices sitting at the highest start
    height of the block's band (they move one block down when the buffer is
    re-rooted at the parent clique).
    """

    params: BufferParams
    root: int
    start: Dict[int, int]
    blocks: List[Dict[int, List[int]]]
    tops: List[Dict[int, List[int]]]
    block_of: Dict[int, int] = field(default_factory=dict)

    def block_vertices(self, b: int) -> List[int]:
        return [v for vs in self.blocks[b].values() for v in vs]

    def region_vertices(self, j: int) -> List[int]:
        return [v for b in (A(j), B(j), C(j)) for v in self.block_vertices(b)]


def block_index(height: int, params: BufferParams) -> int:
    """0-based block index of a start height (band ``i`` lands in block ``3N-1-i``)."""
    return params.n_blocks - 1 - height // params.delta


def decompose_buffer(tree: CliqueTree, root: int, params: BufferParams, classes: CanonicalClasses) -> Buffer:
    heights = subtree_start_heights(tree, root, limit=params.depth)
    start = {v: h for v, h in heights.items() if h < params.depth}
    return _buffer_from_start(root, start, params, classes)


def separation_violations(g: Graph, buf: Buffer) -> List[Tuple[int, int]]:
    """Edges of the buffer joining blocks more than one apart.

    Neighbours outside the buffer must belong to the canonical zone (for
    block 0) or to the area above the buffer (for the top block).
    """
    bad = []
    last = buf.params.n_blocks - 1
    for v, b in buf.block_of.items():
        for u in g.adjacency[v]:
            bu = buf.block_of.get(u)
            if bu is None:
                if b not in (0, last):
                    bad.append((v, u))
            elif abs(bu - b) > 1:
                bad.append((v, u))
    return bad


def internal_classes(buf: Buffer, g: Graph, classes: CanonicalClasses) -> set:
    """Classes whose vertices in the last region only see the last two regions."""
    big_n = buf.params.big_n
    low = A(big_n - 1)
    out = set()
    for p in range(classes.omega):
        ok = True
        for b in (A(big_n), B(big_n), C(big_n)):
            for v in buf.blocks[b].get(p, ()):
                for u in g.adjacency[v]:
                    bu = buf.block_of.get(u)
                    if bu is None or bu < low:
                        ok = False
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            out.add(p)
    return out


def well_colored_violations(buf: Buffer, nu: Sequence[Vector], coloring: Sequence[int]) -> List[int]:
    bad = []
    for b, per_class in enumerate(buf.blocks):
        for p, vs in per_class.items():
            for v in vs:
                if coloring[v] != nu[b][p]:
                    bad.append(v)
    return bad


# ---------------------------------------------------------------------------
# Working state


class Recorder:
    """Owns the working coloring and the list of emitted recolorings."""

    def __init__(self, g: Graph, coloring: Sequence[int], k: int, debug: bool = False):
        self.g = g
        self.color = list(coloring)
        self.k = k
        self.debug = debug
        self.steps: List[Tuple[int, int, int]] = []

    def recolor(self, v: int, c: int) -> None:
        old = self.color[v]
        if old == c:
            raise PropernessViolation(f"vertex {v} already has color {c}")
        if self.debug:
            if not 1 <= c <= self.k:
                raise PropernessViolation(f"color {c} outside the palette")
            for u in self.g.adjacency[v]:
                if self.color[u] == c:
                    raise PropernessViolation(f"recoloring {v} to {c} clashes with neighbour {u}")
        self.color[v] = c
        self.steps.append((v, old, c))


class WorkingBuffer:
    """A buffer together with its vector tuple and the shared recorder.

    All vectorial recolorings go through :meth:`set`, which recolors the
    vertices of one (block, class) pair and updates the tuple.
    """

    def __init__(self, buf: Buffer, nu: Sequence[Vector], rec: Recorder, internal: Optional[set] = None):
        self.buf = buf
        self.params = buf.params
        self.nu: List[Vector] = [tuple(v) for v in nu]
        self.rec = rec
        self.internal = internal
        self.counts: Counter = Counter()
        self._kinds: Dict[int, RegionKind] = {}

    @property
    def omega(self) -> int:
        return self.params.omega

    def kind(self, j: int) -> RegionKind:
        kind = self._kinds.get(j)
        if kind is None:
            kind = self._kinds[j] = region_kind(self.nu, j, self.params.omega)
        return kind

    def set(self, b: int, p: int, c: int) -> None:
        nu = self.nu
        vec = nu[b]
        if vec[p] == c:
            return
        if c in vec:
            raise InternalInvariantError(f"color {c} already used in block {b}: {vec}")
        if b == 0:
            raise InternalInvariantError("the deepest block is never recolored")
        last = len(nu) - 1
        if b == last:
            if self.internal is not None and p not in self.internal:
                raise InternalInvariantError(f"class {p} is not internal but its top block is recolored")
        else:
            other = nu[b + 1]
            if c in other and other[p] != c:
                raise PropernessViolation(f"color {c} for class {p} in block {b} clashes with block {b + 1}")
        other = nu[b - 1]
        if c in other and other[p] != c:
            raise PropernessViolation(f"color {c} for class {p} in block {b} clashes with block {b - 1}")
        vs = self.buf.blocks[b].get(p)
        if vs:
            recolor = self.rec.recolor
            for v in vs:
                recolor(v, c)
        nu[b] = vec[:p] + (c,) + vec[p + 1:]
        self._kinds.pop(b // 3 + 1, None)
        self.counts[(b, p)] += 1

    def track(self) -> "_Tracker":
        """Context manager collecting the coordinate counts of a code section."""
        return _Tracker(self)

    def set_range(self, b0: int, b1: int, p: int, c: int) -> None:
        """Recolor class ``p`` with ``c`` on blocks ``b0..b1`` (inclusive)."""
        for b in range(b0, b1 + 1):
            self.set(b, p, c)

    def validity(self) -> ValidityReport:
        return check_validity(self.nu, self.params)

    def max_count(self, blocks: Optional[range] = None) -> int:
        if blocks is None:
            return max(self.counts.values(), default=0)
        return max((n for (b, _), n in self.counts.items() if b in blocks), default=0)


def apply_vector_change(wb: WorkingBuffer, block: int, p: int, color: int) -> List[Tuple[int, int, int]]:
    """Single vectorial recoloring; returns the emitted vertex steps."""
    before = len(wb.rec.steps)
    wb.set(block, p, color)
    return wb.rec.steps[before:]


class _Tracker:
    def __init__(self, wb: WorkingBuffer):
        self.wb = wb
        self.counts: Counter = Counter()

    def __enter__(self) -> Counter:
        self._saved = self.wb.counts
        self.wb.counts = self.counts
        return self.counts

    def __exit__(self, *exc):
        self._saved.update(self.counts)
        self.wb.counts = self._saved
        return False


def lift_buffer(
    node: int,
    bag,
    child_buffers: Sequence[Buffer],
    params: BufferParams,
    classes: CanonicalClasses,
) -> Buffer:
    """Buffer rooted at ``node`` built from the buffers of its children.

    A vertex starting at height ``h`` below a child starts at ``h + 1``
    below ``node``; the vertices of ``node``'s own bag start at 0.
    """
    depth = params.depth
    start: Dict[int, int] = {}
    for cb in child_buffers:
        for v, h in cb.start.items():
            if start.get(v, -1) < h + 1:
                start[v] = h + 1
    for v in bag:
        start.setdefault(v, 0)
    start = {v: h for v, h in start.items() if h < depth}
    return _buffer_from_start(node, start, params, classes)


def _buffer_from_start(root: int, start: Dict[int, int], params: BufferParams, classes: CanonicalClasses) -> Buffer:
    blocks: List[Dict[int, List[int]]] = [dict() for _ in range(params.n_blocks)]
    tops: List[Dict[int, List[int]]] = [dict() for _ in range(params.n_blocks)]
    block_of = {}
    delta = params.delta
    last = params.n_blocks - 1
    for v in sorted(start):
        h = start[v]
        b = last - h // delta
        p = classes.c0[v] - 1
        blocks[b].setdefault(p, []).append(v)
        block_of[v] = b
        if h % delta == delta - 1:
            tops[b].setdefault(p, []).append(v)
    return Buffer(params, root, start, blocks, tops, block_of)
