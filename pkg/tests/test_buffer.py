from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chordal_recolor.buffer import (
    A,
    B,
    C,
    Buffer,
    BufferParams,
    ColorRegion,
    Irregular,
    Recorder,
    Transposition,
    Waiting,
    WorkingBuffer,
    apply_vector_change,
    border_error,
    check_validity,
    classify_region,
    clique_vector,
    construct_valid_tuple,
    decompose_buffer,
    dump_tuple,
    internal_classes,
    is_vectorially_proper,
    region_kind,
    separation_violations,
    swap_coordinates,
)
from chordal_recolor.engine import prepare
from chordal_recolor.exceptions import InternalInvariantError, KTooSmall, PropernessViolation
from chordal_recolor.generators import GenSpec, gen_graph
from chordal_recolor.graph import CanonicalClasses, Graph
from chordal_recolor.verifier import verify_sequence

P336 = BufferParams(omega=3, delta=4, k=6)


def canonical_tuple(params):
    return [params.canonical()] * params.n_blocks


class TestParams:
    def test_arithmetic(self):
        assert (P336.pairs, P336.s, P336.big_n, P336.depth, P336.n_blocks) == (3, 11, 15, 180, 45)
        assert P336.temporaries == (4, 5)

    def test_small_k(self):
        with pytest.raises(KTooSmall):
            BufferParams(3, 4, 5)

    def test_region_blocks(self):
        assert (A(1), B(1), C(1)) == (0, 1, 2)
        assert C(P336.big_n) == P336.n_blocks - 1


class TestClassify:
    def test_waiting(self):
        assert classify_region((1, 2, 3), (1, 2, 3), (1, 2, 3), 3) == Waiting()

    def test_color_region(self):
        # classes are 0-based: the first class is 0
        assert classify_region((1, 2, 3), (5, 2, 3), (5, 2, 3), 3) == ColorRegion(p=0, c1=1, z=5)

    def test_transposition(self):
        kind = classify_region((1, 2, 3), (5, 6, 3), (2, 1, 3), 3)
        assert kind == Transposition(p=0, q=1, c1=1, c2=2, z=5, zp=6)
        assert kind.classes == frozenset({0, 1}) and kind.temporaries == frozenset({5, 6})

    @pytest.mark.parametrize(
        "a,b,c",
        [
            ((1, 2, 3), (5, 2, 3), (6, 2, 3)),  # C differs from B
            ((1, 2, 3), (2, 2, 3), (2, 2, 3)),  # repeated color
            ((1, 2, 3), (3, 2, 1), (3, 2, 1)),  # swap without temporaries
            ((4, 2, 3), (5, 2, 3), (5, 2, 3)),  # starts non-canonical
            ((1, 2, 3), (4, 5, 6), (2, 3, 1)),  # three classes move
        ],
    )
    def test_irregular(self, a, b, c):
        assert isinstance(classify_region(a, b, c, 3), Irregular)

    @given(st.lists(st.permutations(range(1, 7)), min_size=3, max_size=3))
    def test_total_and_exclusive(self, perms):
        a, b, c = (tuple(p[:3]) for p in perms)
        kind = classify_region(a, b, c, 3)
        assert kind == classify_region(a, b, c, 3)
        if a == b == c:
            assert kind == Waiting()
        else:
            assert not isinstance(kind, Waiting)


class TestVectors:
    def test_swap(self):
        assert swap_coordinates((1, 2, 3), 0, 1) == (2, 1, 3)
        assert swap_coordinates(swap_coordinates((1, 2, 3), 0, 2), 0, 2) == (1, 2, 3)
        with pytest.raises(ValueError):
            swap_coordinates((1, 2), 1, 1)

    def test_swap_keeps_waiting(self):
        v = swap_coordinates((1, 2, 3), 1, 2)
        assert classify_region(v, v, v, 3) == Waiting()

    def test_border_error(self):
        nu = [(1, 2, 3)]
        assert border_error((1, 2, 3), nu) == 0
        assert border_error((1, 5, 3), nu) == 1
        assert border_error((4, 5, 6), nu) == 3

    def test_vectorial_properness(self):
        assert is_vectorially_proper([(1, 2, 3)] * 5)
        assert not is_vectorially_proper([(1, 2, 3), (2, 1, 3)])
        assert is_vectorially_proper([(1, 2, 3), (4, 5, 3), (2, 1, 3)])


class TestCliqueVector:
    classes = CanonicalClasses(c0=(1, 2, 3, 2), classes=((0,), (1, 3), (2,)), omega=3)

    def test_full_bag(self):
        assert clique_vector({0, 1, 2}, [4, 6, 1, 6], self.classes, 6) == (4, 6, 1)

    def test_empty_bag(self):
        assert clique_vector(set(), [1, 2, 3, 2], self.classes, 6) == (1, 2, 3)

    def test_partial_bag(self):
        assert clique_vector({3}, [1, 2, 3, 5], self.classes, 6) == (1, 5, 2)


class TestValidity:
    def test_canonical(self):
        assert check_validity(canonical_tuple(P336), P336).valid

    def test_almost_valid(self):
        nu = canonical_tuple(P336)
        s = P336.s
        nu[B(s)] = (4, 5, 3)
        for b in range(C(s), P336.n_blocks):
            nu[b] = (2, 1, 3)
        report = check_validity(nu, P336)
        assert report.status == "AlmostValid" and report.almost_valid and not report.valid

    def test_continuity(self):
        nu = canonical_tuple(P336)
        nu[A(5)] = (2, 1, 3)
        report = check_validity(nu, P336)
        assert (report.status, report.prop) == ("Invalid", "1")
        assert report.region == 4

    def test_wrong_length(self):
        assert check_validity(canonical_tuple(P336)[:-1], P336).status == "Invalid"

    def test_color_region_in_transposition_buffer(self):
        nu = canonical_tuple(P336)
        for b in range(B(3), P336.n_blocks):
            nu[b] = (6, 2, 3)
        report = check_validity(nu, P336)
        assert (report.prop, report.region) == ("3", 3)

    def test_mismatched_temporaries(self):
        nu = canonical_tuple(P336)
        nu[B(2)] = (4, 5, 3)
        nu[C(2)] = nu[A(3)] = (2, 1, 3)
        nu[B(3)] = (6, 5, 3)
        for b in range(C(3), P336.n_blocks):
            nu[b] = (1, 2, 3)
        assert check_validity(nu, P336).prop == "3"

    def test_last_region_must_wait(self):
        nu = canonical_tuple(P336)
        nu[-2] = nu[-1] = (6, 2, 3)
        assert check_validity(nu, P336).prop == "5"


class TestConstructValidTuple:
    def test_canonical(self):
        nu = construct_valid_tuple((1, 2, 3), P336)
        assert nu == canonical_tuple(P336)

    def test_transposition(self):
        nu = construct_valid_tuple((2, 1, 3), P336)
        assert check_validity(nu, P336).valid
        assert region_kind(nu, 2, 3) == Transposition(0, 1, 1, 2, 4, 5)
        assert all(region_kind(nu, j, 3) == Waiting() for j in range(P336.s + 1, P336.big_n + 1))

    def test_color_region(self):
        nu = construct_valid_tuple((5, 2, 3), P336)
        assert check_validity(nu, P336).valid
        assert region_kind(nu, P336.s + 1, 3) == ColorRegion(0, 1, 5)
        assert all(region_kind(nu, j, 3) == Waiting() for j in range(2, P336.s))

    @given(st.integers(1, 4), st.integers(0, 3), st.data())
    def test_every_target(self, omega, extra, data):
        params = BufferParams(omega, 2, omega + 3 + extra)
        target = tuple(data.draw(st.permutations(range(1, params.k + 1)))[:omega])
        nu = construct_valid_tuple(target, params)
        assert nu[-1] == target
        assert check_validity(nu, params).valid
        assert is_vectorially_proper(nu)
        for j in range(1, params.s + 1):
            for b in (A(j), C(j)):
                assert sorted(nu[b]) == list(range(1, omega + 1))

    def test_rejects_repeated(self):
        with pytest.raises(ValueError):
            construct_valid_tuple((1, 1, 3), P336)


def test_dump_format():
    params = BufferParams(2, 1, 5)
    lines = dump_tuple(construct_valid_tuple((2, 1), params), params).splitlines()
    assert len(lines) == params.big_n
    assert lines[0] == "R1 waiting A=(1,2) B=(1,2) C=(1,2)"
    assert lines[1] == "R2 transposition A=(1,2) B=(3,4) C=(2,1)"


class TestDecompose:
    def test_leaf_root(self, triangle):
        prep = prepare(triangle, 6)
        buf = decompose_buffer(prep.tree, 0, prep.params, prep.classes)
        last = prep.params.n_blocks - 1
        assert sorted(buf.block_vertices(last)) == [0, 1, 2]
        assert all(not buf.blocks[b] for b in range(last))

    @given(st.integers(0, 2**16), st.integers(3, 60))
    def test_separation_on_two_trees(self, seed, n):
        g, _ = gen_graph(GenSpec("ktree", n, 3, None, seed))
        prep = prepare(g, 6)
        rnd = random.Random(seed)
        for root in rnd.sample(range(len(prep.tree)), min(3, len(prep.tree))):
            buf = decompose_buffer(prep.tree, root, prep.params, prep.classes)
            assert separation_violations(g, buf) == []
            seen = [v for b in range(prep.params.n_blocks) for v in buf.block_vertices(b)]
            assert len(seen) == len(set(seen)) == len(buf.start)

    def test_depth_cut(self):
        # a long path: only vertices starting below the depth enter the buffer
        n = 80
        g = Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
        prep = prepare(g, 5)
        end = next(x for x in range(len(prep.tree)) if 0 in prep.tree.bags[x])
        buf = decompose_buffer(prep.tree, end, prep.params, prep.classes)
        assert max(buf.start.values()) == prep.params.depth - 1
        assert sorted(buf.start) == list(range(prep.params.depth))


class TestInternalClasses:
    def test_absent_class_is_internal(self, path3):
        prep = prepare(path3, 5)
        buf = decompose_buffer(prep.tree, 0, prep.params, prep.classes)
        # everything sits in the top region and has no neighbour outside it
        assert internal_classes(buf, path3, prep.classes) == {0, 1}

    def test_neighbour_above(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
        prep = prepare(g, 5)
        x = next(i for i in range(len(prep.tree)) if prep.tree.bags[i] == frozenset({2, 3}))
        buf = decompose_buffer(prep.tree, x, prep.params, prep.classes)
        # pretend vertex 1 lies above the buffer
        buf.start.pop(1, None)
        buf.block_of.pop(1, None)
        for blocks in buf.blocks:
            for vs in blocks.values():
                if 1 in vs:
                    vs.remove(1)
        assert prep.classes.class_of(2) not in internal_classes(buf, g, prep.classes)


def _flat_buffer(params, vertices_by_block):
    blocks = [dict() for _ in range(params.n_blocks)]
    block_of = {}
    for b, per_class in vertices_by_block.items():
        blocks[b] = {p: list(vs) for p, vs in per_class.items()}
        for vs in per_class.values():
            for v in vs:
                block_of[v] = b
    tops = [dict() for _ in range(params.n_blocks)]
    return Buffer(params, 0, {v: 0 for v in block_of}, blocks, tops, block_of)


class TestApplyVectorChange:
    params = BufferParams(1, 1, 4)

    def test_empty_set(self):
        g = Graph.from_edges(0, [])
        wb = WorkingBuffer(_flat_buffer(self.params, {}), canonical_tuple(self.params), Recorder(g, [], 4))
        assert apply_vector_change(wb, 4, 0, 3) == []
        assert wb.nu[4] == (3,)

    def test_three_vertices(self):
        g = Graph.from_edges(3, [])
        wb = WorkingBuffer(
            _flat_buffer(self.params, {5: {0: [0, 1, 2]}}), canonical_tuple(self.params), Recorder(g, [1, 1, 1], 4)
        )
        steps = apply_vector_change(wb, 5, 0, 2)
        assert steps == [(0, 1, 2), (1, 1, 2), (2, 1, 2)]
        assert verify_sequence(g, [1, 1, 1], steps, [2, 2, 2], 4).ok

    def test_guards(self):
        params = BufferParams(2, 1, 5)
        g = Graph.from_edges(0, [])
        wb = WorkingBuffer(_flat_buffer(params, {}), canonical_tuple(params), Recorder(g, [], 5))
        with pytest.raises(InternalInvariantError):
            wb.set(0, 0, 3)  # deepest block
        with pytest.raises(InternalInvariantError):
            wb.set(4, 0, 2)  # color already in the block
        wb.set(4, 0, 3)
        with pytest.raises(PropernessViolation):
            wb.set(5, 1, 3)  # 3 would sit on class 1 next to class 0 in block 4

    def test_replays_on_real_buffer(self):
        g, _ = gen_graph(GenSpec("ktree", 40, 3, None, 3))
        prep = prepare(g, 6)
        phi = list(prep.classes.c0)
        buf = decompose_buffer(prep.tree, 0, prep.params, prep.classes)
        wb = WorkingBuffer(buf, canonical_tuple(prep.params), Recorder(g, phi, 6, debug=True))
        last = prep.params.n_blocks - 1
        p = next(iter(buf.blocks[last]))
        wb.set_range(A(2), last, p, 5)
        end = list(phi)
        for b in range(A(2), last + 1):
            for v in buf.blocks[b].get(p, ()):
                end[v] = 5
        assert verify_sequence(g, phi, wb.rec.steps, end, 6).ok


def test_every_generated_valid_tuple_is_proper():
    rnd = random.Random(0)
    for omega, extra in itertools.product(range(1, 5), range(3)):
        params = BufferParams(omega, 1, omega + 3 + extra)
        for _ in range(10):
            target = tuple(rnd.sample(range(1, params.k + 1), omega))
            nu = construct_valid_tuple(target, params)
            assert check_validity(nu, params).almost_valid
            assert is_vectorially_proper(nu)
