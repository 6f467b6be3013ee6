"""Vectorial recoloring procedures acting on one working buffer.

Every procedure only changes the tuple through :meth:`WorkingBuffer.set`,
so each vector change is replayed on the graph and checked for local
vectorial properness.  Region indices are 1-based, classes 0-based.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Sequence, Tuple

from .buffer import (
    A,
    B,
    C,
    ColorRegion,
    Transposition,
    Vector,
    Waiting,
    WorkingBuffer,
    region_kind,
    swap_coordinates,
)
from .exceptions import InternalInvariantError


# ---------------------------------------------------------------------------
# small helpers


def _transposition(wb: WorkingBuffer, j: int) -> Transposition:
    kind = wb.kind(j)
    if not isinstance(kind, Transposition):
        raise InternalInvariantError(f"region {j} should be a transposition region, found {kind.name}")
    return kind


def _waiting(wb: WorkingBuffer, j: int) -> None:
    if not isinstance(wb.kind(j), Waiting):
        raise InternalInvariantError(f"region {j} should be waiting, found {wb.kind(j).name}")


def spare_color(wb: WorkingBuffer, avoid=()) -> int:
    """Smallest non-canonical color outside the two global temporaries and ``avoid``."""
    omega, k = wb.omega, wb.params.k
    banned = set(wb.params.temporaries) | set(avoid)
    for c in range(omega + 1, k + 1):
        if c not in banned:
            return c
    raise InternalInvariantError("no spare non-canonical color")


def tau(wb: WorkingBuffer, j: int) -> Optional[frozenset]:
    """Classes swapped by region ``j`` (None when it is waiting)."""
    kind = wb.kind(j)
    if isinstance(kind, Waiting):
        return None
    if isinstance(kind, Transposition):
        return kind.classes
    raise InternalInvariantError(f"region {j} is {kind.name} inside the transposition buffer")


def transposition_program(wb: WorkingBuffer, lo: int, hi: int) -> List[Optional[frozenset]]:
    return [tau(wb, j) for j in range(lo, hi + 1)]


def apply_program(start: Sequence[int], program: Sequence[Optional[frozenset]]) -> Vector:
    """Vector obtained from ``start`` by applying the coordinate swaps in order."""
    vec = tuple(start)
    for t in program:
        if t is not None:
            p, q = sorted(t)
            vec = swap_coordinates(vec, p, q)
    return vec


def color_region_of(wb: WorkingBuffer, p: int) -> Optional[Tuple[int, ColorRegion]]:
    s, big_n = wb.params.s, wb.params.big_n
    for j in range(s + 1, big_n):
        kind = wb.kind(j)
        if isinstance(kind, ColorRegion) and kind.p == p:
            return j, kind
    return None


def normalize_temporaries(wb: WorkingBuffer, j: int) -> None:
    """Bring the temporary colors of transposition region ``j`` back to the global pair."""
    kind = _transposition(wb, j)
    pair = wb.params.temporaries
    for x in (kind.p, kind.q):
        cur = wb.nu[B(j)][x]
        if cur in pair:
            continue
        free = [t for t in pair if t not in wb.nu[B(j)]]
        wb.set(B(j), x, free[0])


def choose_temporary(wb: WorkingBuffer, j: int, new: int) -> None:
    """Replace one temporary color of transposition region ``j`` by ``new``.

    The class whose temporary color is the larger one is recolored.
    """
    kind = _transposition(wb, j)
    if new <= wb.omega or new in wb.nu[B(j)]:
        raise InternalInvariantError(f"{new} cannot become a temporary color of region {j}")
    x = kind.p if kind.z > kind.zp else kind.q
    wb.set(B(j), x, new)


def orient_temporaries(wb: WorkingBuffer, j: int) -> None:
    """Give the first temporary to the smaller class of region ``j``, the second to the larger."""
    kind = _transposition(wb, j)
    z1, z2 = wb.params.temporaries
    lo, hi = sorted((kind.p, kind.q))
    normalize_temporaries(wb, j)
    if wb.nu[B(j)][lo] == z1:
        return
    extra = spare_color(wb)
    wb.set(B(j), lo, extra)
    wb.set(B(j), hi, z2)
    wb.set(B(j), lo, z1)


# ---------------------------------------------------------------------------
# border error (step 1)


def create_cancel_color(wb: WorkingBuffer, i: int, p: int, c: int, case: int) -> None:
    """Recolor class ``p`` with ``c`` from ``B_i`` up to the top block."""
    s, big_n, omega = wb.params.s, wb.params.big_n, wb.omega
    if not s < i < big_n:
        raise InternalInvariantError(f"region {i} outside the color buffer")
    kind = wb.kind(i)
    if case == 1:
        ok = isinstance(kind, Waiting) and c > omega and color_region_of(wb, p) is None
    elif case == 2:
        ok = isinstance(kind, ColorRegion) and kind.p == p and c > omega
    elif case == 3:
        ok = isinstance(kind, ColorRegion) and kind.p == p and kind.c1 == c
    else:
        ok = False
    if not ok:
        raise InternalInvariantError(f"create/cancel case {case} hypotheses fail at region {i}")
    wb.set_range(B(i), C(big_n), p, c)


def _carriers(wb: WorkingBuffer, c: int) -> set:
    s = wb.params.s
    return {vec.index(c) for vec in wb.nu[A(s):] if c in vec}


def _step1_case1(wb: WorkingBuffer, p: int, c: int) -> None:
    s, big_n = wb.params.s, wb.params.big_n
    found = color_region_of(wb, p)
    if found is not None:
        create_cancel_color(wb, found[0], p, c, 2)
        return
    for i in range(s + 1, big_n):
        if isinstance(wb.kind(i), Waiting):
            create_cancel_color(wb, i, p, c, 1)
            return
    raise InternalInvariantError("no waiting region in the color buffer")


def _pick_temporaries(wb: WorkingBuffer, avoid) -> Tuple[int, int]:
    omega, k = wb.omega, wb.params.k
    pref = list(wb.params.temporaries) + list(range(omega + 3, k + 1))
    out = [t for t in pref if t not in avoid]
    return out[0], out[1]


def step1_decrease_border_error(wb: WorkingBuffer, nu_c: Sequence[int]) -> int:
    """Lower the border error by one; returns the case number that was applied."""
    params, nu = wb.params, wb.nu
    s, big_n, omega, k = params.s, params.big_n, params.omega, params.k
    top = nu[-1]
    mism = [p for p in range(omega) if top[p] != nu_c[p]]
    if not mism:
        raise InternalInvariantError("border error is already zero")
    if not isinstance(wb.kind(s), Waiting):
        raise InternalInvariantError("the middle region must be waiting before lowering the border error")
    p = mism[0]
    c = nu_c[p]
    carriers = _carriers(wb, c)
    if not carriers:
        _step1_case1(wb, p, c)
        return 1
    if p in carriers:
        found = color_region_of(wb, p)
        if found is None or found[1].c1 != c:
            raise InternalInvariantError("class keeps a color it should have lost")
        create_cancel_color(wb, found[0], p, c, 3)
        return 2
    if len(carriers) != 1:
        raise InternalInvariantError(f"color {c} carried by several classes in the upper buffer")
    (l,) = carriers
    if c > omega:
        j, kind = color_region_of(wb, l)
        create_cancel_color(wb, j, l, kind.c1, 3)
        _step1_case1(wb, p, c)
        return 3
    c1 = nu[A(s)][p]
    if top[l] == c:
        # c is canonical and stays on class l up to the top
        used = set(nu[B(s)]) | set(nu[C(s)])
        for vec in nu[A(s + 1):]:
            used.update(vec)
        free = [y for y in range(1, k + 1) if y not in used]
        q_fix = None
        if free:
            y = free[0]
            zpp = None
        else:
            for q in range(omega):
                if q in (p, l):
                    continue
                found = color_region_of(wb, q)
                if found is not None:
                    q_fix = (q, found[0])
                    y, zpp = found[1].c1, found[1].z
                    break
            if q_fix is None:
                raise InternalInvariantError("no color can be freed for the swap")
            wb.set_range(B(s), A(q_fix[1]), q_fix[0], zpp)
        avoid = set(nu[A(s)]) | set(nu[B(s)]) | set(nu[C(s)]) | {y}
        z, zp = _pick_temporaries(wb, avoid)
        wb.set(B(s), p, z)
        wb.set(B(s), l, zp)
        wb.set_range(C(s), C(big_n), l, y)
        wb.set_range(C(s), C(big_n), p, c)
        wb.set_range(C(s), C(big_n), l, c1)
        if q_fix is not None:
            wb.set_range(B(s), A(q_fix[1]), q_fix[0], y)
        normalize_temporaries(wb, s)
        return 4
    # c is canonical and disappears in the color region of class l
    j, kind = color_region_of(wb, l)
    z = kind.z
    wb.set_range(B(s), A(j), l, z)
    avoid = set(nu[A(s)]) | set(nu[B(s)]) | set(nu[C(s)])
    zp = _pick_temporaries(wb, avoid)[0]
    wb.set(B(s), p, zp)
    wb.set_range(C(s), C(big_n), p, c)
    wb.set_range(C(s), A(j), l, c1)
    normalize_temporaries(wb, s)
    return 5


# ---------------------------------------------------------------------------
# transposition buffer moves (step 2)


def transp_shift(wb: WorkingBuffer, i: int) -> None:
    """Move the transposition of ``R_{i+1}`` down into the waiting region ``R_i``."""
    if not 1 < i < wb.params.s:
        raise InternalInvariantError(f"transp_shift index {i} out of range")
    _waiting(wb, i)
    kind = _transposition(wb, i + 1)
    p, l = kind.p, kind.q
    c2, c1 = kind.c1, kind.c2
    z, zp = kind.z, kind.zp
    wb.set_range(B(i), A(i + 1), p, z)
    wb.set_range(B(i), A(i + 1), l, zp)
    wb.set_range(C(i), B(i + 1), p, c1)
    wb.set_range(C(i), B(i + 1), l, c2)


def shift_transpo_right(wb: WorkingBuffer, i: int) -> None:
    """Move the transposition of ``R_i`` up into the waiting region ``R_{i+1}``."""
    if not 1 < i < wb.params.s:
        raise InternalInvariantError(f"shift_transpo_right index {i} out of range")
    kind = _transposition(wb, i)
    _waiting(wb, i + 1)
    p, l = kind.p, kind.q
    a_p, a_l = kind.c1, kind.c2
    z, zp = kind.z, kind.zp
    wb.set_range(C(i), B(i + 1), p, z)
    wb.set_range(C(i), B(i + 1), l, zp)
    wb.set_range(B(i), A(i + 1), p, a_p)
    wb.set_range(B(i), A(i + 1), l, a_l)


def transp_cancel(wb: WorkingBuffer, i: int, j: int) -> None:
    """Turn two transposition regions exchanging the same two colors into waiting regions."""
    if not 1 < i < j <= wb.params.s:
        raise InternalInvariantError(f"transp_cancel indices {i},{j} out of range")
    first, second = _transposition(wb, i), _transposition(wb, j)
    if first.colors != second.colors:
        raise InternalInvariantError(f"regions {i} and {j} exchange different colors")
    p, l = first.p, first.q
    c1, c2 = first.c1, first.c2
    nu = wb.nu
    zpp = spare_color(wb)
    blocks = range(C(i), A(j) + 1)
    holders1 = [(b, nu[b].index(c1)) for b in blocks if c1 in nu[b]]
    holders2 = [(b, nu[b].index(c2)) for b in blocks if c2 in nu[b]]
    for b, x in holders1:
        wb.set(b, x, zpp)
    for b, x in holders2:
        wb.set(b, x, c1)
    for b, x in holders1:
        wb.set(b, x, c2)
    pp = nu[A(j)].index(c1)
    lp = nu[A(j)].index(c2)
    wb.set(B(i), p, c1)
    wb.set(B(j), pp, c1)
    wb.set(B(i), l, c2)
    wb.set(B(j), lp, c2)


def _equal_pair(wb: WorkingBuffer, lo: int, hi: int) -> Optional[Tuple[int, int]]:
    seen: Dict[frozenset, int] = {}
    for j in range(lo, hi + 1):
        kind = wb.kind(j)
        if isinstance(kind, Transposition):
            if kind.colors in seen:
                return seen[kind.colors], j
            seen[kind.colors] = j
    return None


def step2_make_valid(wb: WorkingBuffer) -> None:
    """Turn an almost valid tuple into a valid one by emptying ``R_s``."""
    s = wb.params.s
    if isinstance(wb.kind(s), Waiting):
        return
    _transposition(wb, s)
    waiting = [i for i in range(2, s) if isinstance(wb.kind(i), Waiting)]
    if not waiting:
        pair = _equal_pair(wb, 2, s - 1)
        if pair is None:
            raise InternalInvariantError("no repeated color pair in a full transposition buffer")
        transp_cancel(wb, *pair)
        waiting = [i for i in range(2, s) if isinstance(wb.kind(i), Waiting)]
    for t in range(waiting[-1], s):
        transp_shift(wb, t)


# ---------------------------------------------------------------------------
# agreement between sibling buffers (step 3)


def move_color_region(wb: WorkingBuffer, i: int, j: int) -> None:
    """Move the color region ``R_i`` to index ``j`` (the old ``R_j`` kind goes to ``i``)."""
    s, big_n = wb.params.s, wb.params.big_n
    if not (s < i < big_n and s < j < big_n):
        raise InternalInvariantError(f"move_color_region indices {i},{j} out of range")
    if i == j:
        return
    kind = wb.kind(i)
    if not isinstance(kind, ColorRegion):
        raise InternalInvariantError(f"region {i} is not a color region")
    p, c, z = kind.p, kind.c1, kind.z
    other = wb.kind(j)
    if isinstance(other, Waiting):
        if i < j:
            wb.set_range(B(i), A(j), p, c)
        else:
            wb.set_range(B(j), A(i), p, z)
        return
    if not isinstance(other, ColorRegion):
        raise InternalInvariantError(f"region {j} is neither waiting nor a color region")
    l, cp, zp = other.p, other.c1, other.z
    if i < j:
        wb.set_range(B(i), A(j), l, zp)
        wb.set_range(B(i), A(j), p, c)
    else:
        wb.set_range(B(j), A(i), p, z)
        wb.set_range(B(j), A(i), l, cp)


def same_col_buf(wb: WorkingBuffer, reference_cs: Sequence[int]) -> int:
    """Make ``nu_{C_s}`` equal to ``reference_cs``; returns the number of swaps applied."""
    s = wb.params.s
    rounds = 0
    while True:
        cur = wb.nu[C(s)]
        mism = [p for p in range(wb.omega) if cur[p] != reference_cs[p]]
        if not mism:
            return rounds
        p = mism[0]
        c = reference_cs[p]
        l = cur.index(c)
        found_p = color_region_of(wb, p)
        if found_p is None:
            raise InternalInvariantError(f"class {p} differs below the border without a color region")
        move_color_region(wb, found_p[0], s + 1)
        found_l = color_region_of(wb, l)
        if found_l is None:
            raise InternalInvariantError(f"class {l} differs below the border without a color region")
        move_color_region(wb, found_l[0], s + 2)
        cp = wb.nu[A(s + 1)][p]
        z = wb.nu[B(s + 1)][p]
        zp = wb.nu[B(s + 2)][l]
        zpp = min(t for t in range(wb.omega + 1, wb.params.k + 1) if t not in (z, zp))
        wb.set_range(B(s), A(s + 2), l, zpp)
        wb.set(B(s), p, zp)
        wb.set_range(C(s), A(s + 1), p, c)
        wb.set_range(C(s), A(s + 2), l, cp)
        normalize_temporaries(wb, s)
        step2_make_valid(wb)
        rounds += 1


def align_color_buffer(wb: WorkingBuffer, reference: Sequence[Vector]) -> None:
    """Match the color buffer of ``wb`` region by region with ``reference``."""
    s, big_n, omega = wb.params.s, wb.params.big_n, wb.omega
    same_col_buf(wb, reference[C(s)])
    for j in range(s + 1, big_n):
        want = region_kind(reference, j, omega)
        have = wb.kind(j)
        if want == have:
            continue
        if isinstance(want, Waiting):
            target = next(t for t in range(j + 1, big_n) if isinstance(wb.kind(t), Waiting))
            move_color_region(wb, j, target)
        else:
            found = color_region_of(wb, want.p)
            if found is None or found[0] <= j:
                raise InternalInvariantError(f"color region for class {want.p} missing above region {j}")
            move_color_region(wb, found[0], j)
    for b in range(A(s), len(reference)):
        if wb.nu[b] != tuple(reference[b]):
            raise InternalInvariantError(f"color buffers still differ at block {b}")


def make_well_organized(wb: WorkingBuffer) -> None:
    """Empty the first ``2 * omega choose 2`` regions of the transposition buffer."""
    s, pairs = wb.params.s, wb.params.pairs

    def positions():
        return [j for j in range(2, s) if isinstance(wb.kind(j), Transposition)]

    while len(positions()) > pairs:
        pair = _equal_pair(wb, 2, s - 1)
        if pair is None:
            raise InternalInvariantError("too many transpositions without a repeated pair")
        transp_cancel(wb, *pair)
    pos = positions()
    for rank, j in enumerate(reversed(pos)):
        target = s - 1 - rank
        for t in range(j, target):
            shift_transpo_right(wb, t)
    for j in range(2, 2 * pairs + 2):
        _waiting(wb, j)


def insert_transposition(wb: WorkingBuffer, t0: int, t1: int, p: int, q: int) -> None:
    """Create two transposition regions for classes ``p, q`` at ``R_{t0}`` and ``R_{t1}``."""
    s = wb.params.s
    if not (2 <= t0 < t1 <= s - 1) or p == q:
        raise InternalInvariantError(f"insert_transposition arguments {t0},{t1},{p},{q} invalid")
    for j in range(t0, t1 + 1):
        _waiting(wb, j)
    p, q = sorted((p, q))
    z, zp = wb.params.temporaries
    c1, c2 = wb.nu[A(t0)][p], wb.nu[A(t0)][q]
    wb.set_range(B(t0), B(t1), p, z)
    wb.set(B(t0), q, zp)
    wb.set(B(t1), q, zp)
    wb.set_range(C(t0), A(t1), q, c1)
    wb.set_range(C(t0), A(t1), p, c2)


def write_transposition_program(wb: WorkingBuffer, program: Sequence[Optional[frozenset]]) -> None:
    pairs = wb.params.pairs
    if len(program) > pairs:
        raise InternalInvariantError("transposition program longer than the number of class pairs")
    for j, t in enumerate(program):
        if t is None:
            continue
        p, q = sorted(t)
        insert_transposition(wb, 2 + j, 2 * pairs + 1 - j, p, q)


def switch_transpo(wb: WorkingBuffer, i: int, a: int) -> int:
    """Push class ``a`` out of ``tau_{i+1}`` into ``tau_i``; returns the case applied."""
    s = wb.params.s
    if not (1 < i and i + 1 < s):
        raise InternalInvariantError(f"switch_transpo index {i} out of range")
    right = _transposition(wb, i + 1)
    if a not in right.classes:
        raise InternalInvariantError(f"class {a} is not moved by region {i + 1}")
    left = wb.kind(i)
    if isinstance(left, Waiting):
        transp_shift(wb, i)
        return 1
    left = _transposition(wb, i)
    if left.classes == right.classes:
        transp_cancel(wb, i, i + 1)
        return 2
    nu = wb.nu
    common = left.classes & right.classes
    zpp = spare_color(wb)
    if common:
        (x,) = common
        (yi,) = left.classes - common
        (yj,) = right.classes - common
        u = nu[B(i + 1)][x]
        wb.set_range(B(i), B(i + 1), x, zpp)
        wb.set_range(B(i), B(i + 1), yi, u)
        up = next(t for t in wb.params.temporaries if t != u)
        wb.set_range(B(i), B(i + 1), yj, up)
        ai, cj = nu[A(i)], nu[C(i + 1)]
        b = ai.index(cj[a])
        (c,) = (left.classes | right.classes) - {a, b}
        wb.set_range(C(i), B(i + 1), a, ai[b])
        wb.set_range(C(i), A(i + 1), b, ai[a])
        wb.set_range(B(i), A(i + 1), c, ai[c])
        normalize_temporaries(wb, i)
        normalize_temporaries(wb, i + 1)
        return 3
    (b,) = right.classes - {a}
    z = nu[B(i + 1)][a]
    zp = nu[B(i + 1)][b]
    c = next(m for m in left.classes if nu[B(i)][m] == z)
    (d,) = left.classes - {c}
    ai = nu[A(i)]
    c1, c2, c3, c4 = ai[a], ai[b], ai[c], ai[d]
    wb.set_range(B(i), B(i + 1), a, zpp)
    wb.set_range(C(i), B(i + 1), c, z)
    wb.set_range(C(i), B(i + 1), b, c1)
    wb.set_range(C(i), B(i + 1), d, zp)
    wb.set_range(B(i), A(i + 1), c, c3)
    wb.set_range(B(i), A(i + 1), d, c4)
    wb.set(B(i), b, z)
    wb.set_range(C(i), B(i + 1), a, c2)
    normalize_temporaries(wb, i)
    return 4


def cancel_identity_segment(wb: WorkingBuffer, t0: int, t1: int) -> int:
    """Empty ``R_{t0}..R_{t1}`` whose transpositions compose to the identity.

    Returns the number of outer rounds.
    """
    prog = transposition_program(wb, t0, t1)
    start = wb.nu[A(t0)]
    if apply_program(start, prog) != start:
        raise InternalInvariantError(f"regions {t0}..{t1} do not compose to the identity")
    rounds = 0
    while True:
        busy = [j for j in range(t0, t1 + 1) if tau(wb, j) is not None]
        if not busy:
            return rounds
        before = len(busy)
        r = busy[-1]
        a = min(tau(wb, r))
        i = r - 1
        while True:
            if i < t0:
                raise InternalInvariantError("class could not be cancelled inside the segment")
            case = switch_transpo(wb, i, a)
            if case == 2:
                break
            i -= 1
        rounds += 1
        after = sum(1 for j in range(t0, t1 + 1) if tau(wb, j) is not None)
        if after >= before:
            raise InternalInvariantError("cancellation round made no progress")


def unify_transposition_buffer(wb: WorkingBuffer, reference: Sequence[Vector]) -> None:
    """Rewrite the transposition buffer of ``wb`` into the one of the reference tuple.

    Both tuples must be valid, well organized and agree from ``A_s`` on.
    """
    params = wb.params
    s, pairs, omega = params.s, params.pairs, params.omega
    def ref_tau(j):
        kind = region_kind(reference, j, omega)
        return None if isinstance(kind, Waiting) else kind.classes

    program = [ref_tau(j) for j in range(2 * pairs + 2, s)]
    write_transposition_program(wb, program)
    cancel_identity_segment(wb, pairs + 2, s - 1)
    for j in range(pairs + 1, 1, -1):
        if tau(wb, j) is None:
            continue
        for t in range(j, j + 2 * pairs):
            shift_transpo_right(wb, t)
    for j in range(2, s):
        if tau(wb, j) != ref_tau(j):
            raise InternalInvariantError(f"transposition {j} differs from the reference")


def orient_all(wb: WorkingBuffer) -> None:
    for j in range(2, wb.params.s):
        if isinstance(wb.kind(j), Transposition):
            orient_temporaries(wb, j)


# ---------------------------------------------------------------------------
# shift to the parent clique (step 4)


def shift_frontier(wb: WorkingBuffer, counter=None) -> None:
    """Recolor the vertices that move one block down when the buffer is re-rooted one level up.

    Regions are handled from ``N-1`` down to ``2``; inside a region the top
    vertices of ``C`` go first, then those of ``B``.
    """
    big_n = wb.params.big_n
    nu, tops, rec = wb.nu, wb.buf.tops, wb.rec
    for j in range(big_n - 1, 1, -1):
        for b in (C(j), B(j)):
            src, dst = nu[b], nu[b - 1]
            for p, vs in sorted(tops[b].items()):
                if src[p] != dst[p]:
                    for v in vs:
                        rec.recolor(v, dst[p])
                        if counter is not None:
                            counter[v] += 1
