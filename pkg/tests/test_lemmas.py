"""Vector-level checks of the recoloring procedures on vertex-free buffers."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chordal_recolor import lemmas
from chordal_recolor.buffer import (
    A,
    B,
    C,
    Buffer,
    BufferParams,
    ColorRegion,
    Recorder,
    Transposition,
    Waiting,
    WorkingBuffer,
    border_error,
    check_validity,
    construct_valid_tuple,
    is_vectorially_proper,
)
from chordal_recolor.exceptions import InternalInvariantError
from chordal_recolor.graph import Graph

P = BufferParams(omega=3, delta=1, k=6)
P4 = BufferParams(omega=4, delta=1, k=7)


def empty_wb(nu, params=P):
    blocks = [dict() for _ in range(params.n_blocks)]
    tops = [dict() for _ in range(params.n_blocks)]
    buf = Buffer(params, 0, {}, blocks, tops, {})
    return WorkingBuffer(buf, nu, Recorder(Graph.from_edges(0, []), [], params.k))


def with_transposition(nu, j, p, q, params=P):
    """Put a transposition of classes ``p < q`` in region ``j`` of a tuple waiting above it."""
    nu = list(nu)
    cur = nu[A(j)]
    mid = list(cur)
    mid[p], mid[q] = params.temporaries
    after = list(cur)
    after[p], after[q] = cur[q], cur[p]
    nu[B(j)] = tuple(mid)
    for b in range(C(j), params.n_blocks):
        nu[b] = tuple(after)
    return nu


def canon(params=P):
    return [params.canonical()] * params.n_blocks


def kinds(wb, lo, hi):
    return [type(wb.kind(j)).__name__ for j in range(lo, hi + 1)]


def settle(wb, nu_c):
    while border_error(nu_c, wb.nu):
        before = border_error(nu_c, wb.nu)
        lemmas.step1_decrease_border_error(wb, nu_c)
        assert border_error(nu_c, wb.nu) < before
        assert check_validity(wb.nu, wb.params).almost_valid
        lemmas.step2_make_valid(wb)
        assert check_validity(wb.nu, wb.params).valid


class TestTranspositionMoves:
    def test_shift_down_and_back(self):
        start = with_transposition(canon(), 4, 0, 1)
        wb = empty_wb(start)
        lemmas.transp_shift(wb, 3)
        assert isinstance(wb.kind(3), Transposition) and isinstance(wb.kind(4), Waiting)
        assert wb.nu[-1] == start[-1]
        assert check_validity(wb.nu, P).valid
        lemmas.shift_transpo_right(wb, 3)
        assert wb.nu == start

    def test_shift_needs_waiting_target(self):
        wb = empty_wb(with_transposition(with_transposition(canon(), 3, 0, 1), 4, 1, 2))
        with pytest.raises(InternalInvariantError):
            lemmas.transp_shift(wb, 3)

    def test_cancel(self):
        nu = with_transposition(with_transposition(canon(), 2, 0, 1), 5, 0, 1)
        wb = empty_wb(nu)
        lemmas.transp_cancel(wb, 2, 5)
        assert wb.nu == canon()

    def test_cancel_needs_same_colors(self):
        wb = empty_wb(with_transposition(with_transposition(canon(), 2, 0, 1), 5, 1, 2))
        with pytest.raises(InternalInvariantError):
            lemmas.transp_cancel(wb, 2, 5)

    def test_insert(self):
        wb = empty_wb(canon())
        lemmas.insert_transposition(wb, 3, 6, 2, 0)
        assert kinds(wb, 2, 7) == ["Waiting", "Transposition", "Waiting", "Waiting", "Transposition", "Waiting"]
        assert wb.kind(3).classes == wb.kind(6).classes == frozenset({0, 2})
        assert wb.nu[-1] == P.canonical()
        assert check_validity(wb.nu, P).valid

    def test_write_program(self):
        wb = empty_wb(canon())
        program = [frozenset({0, 1}), None, frozenset({1, 2})]
        lemmas.write_transposition_program(wb, program)
        got = lemmas.transposition_program(wb, 2, P.s - 1)
        assert got[:3] == program
        # mirrored copies close the program back to the identity
        assert got[3:6] == [frozenset({1, 2}), None, frozenset({0, 1})]
        assert wb.nu[-1] == P.canonical()

    def test_program_too_long(self):
        wb = empty_wb(canon())
        with pytest.raises(InternalInvariantError):
            lemmas.write_transposition_program(wb, [frozenset({0, 1})] * (P.pairs + 1))


class TestSwitch:
    def check(self, wb, i, a, expected_case):
        before = lemmas.apply_program(wb.nu[A(i)], lemmas.transposition_program(wb, i, i + 1))
        case = lemmas.switch_transpo(wb, i, a)
        assert case == expected_case
        after = lemmas.apply_program(wb.nu[A(i)], lemmas.transposition_program(wb, i, i + 1))
        assert before == after == wb.nu[C(i + 1)]
        right = lemmas.tau(wb, i + 1)
        assert right is None or a not in right
        assert check_validity(wb.nu, wb.params).valid

    def test_left_waiting(self):
        self.check(empty_wb(with_transposition(canon(), 4, 0, 1)), 3, 0, 1)

    def test_equal(self):
        wb = empty_wb(with_transposition(with_transposition(canon(), 3, 0, 1), 4, 0, 1))
        self.check(wb, 3, 1, 2)
        assert wb.nu == canon()

    @pytest.mark.parametrize("a", [0, 2])
    def test_common_class(self, a):
        wb = empty_wb(with_transposition(with_transposition(canon(), 3, 1, 2), 4, 0, 2))
        self.check(wb, 3, a, 3)

    @pytest.mark.parametrize("a", [0, 1])
    def test_disjoint(self, a):
        wb = empty_wb(with_transposition(with_transposition(canon(P4), 3, 2, 3, P4), 4, 0, 1, P4), P4)
        self.check(wb, 3, a, 4)


class TestCancelIdentitySegment:
    def test_rejects_non_identity(self):
        wb = empty_wb(with_transposition(canon(), 3, 0, 1))
        with pytest.raises(InternalInvariantError):
            lemmas.cancel_identity_segment(wb, 2, P.s - 1)

    @given(st.integers(2, 4), st.data())
    def test_empties_mirrored_programs(self, omega, data):
        params = BufferParams(omega, 1, omega + 3)
        pairs = [frozenset(t) for t in ((p, q) for p in range(omega) for q in range(p + 1, omega))]
        program = data.draw(st.lists(st.one_of(st.none(), st.sampled_from(pairs)), max_size=params.pairs))
        wb = empty_wb(canon(params), params)
        lemmas.write_transposition_program(wb, program)
        with wb.track() as cnt:
            lemmas.cancel_identity_segment(wb, 2, params.s - 1)
        assert wb.nu == canon(params)
        assert max(cnt.values(), default=0) <= 40 * omega * omega


class TestColorBuffer:
    def test_create_and_cancel(self):
        s = P.s
        wb = empty_wb(canon())
        lemmas.create_cancel_color(wb, s + 1, 0, 6, 1)
        assert wb.kind(s + 1) == ColorRegion(0, 1, 6)
        assert wb.nu[-1] == (6, 2, 3)
        lemmas.create_cancel_color(wb, s + 1, 0, 1, 3)
        assert wb.nu == canon()

    def test_create_hypotheses(self):
        wb = empty_wb(canon())
        with pytest.raises(InternalInvariantError):
            lemmas.create_cancel_color(wb, P.s + 1, 0, 2, 1)  # canonical color
        with pytest.raises(InternalInvariantError):
            lemmas.create_cancel_color(wb, P.s, 0, 6, 1)  # outside the color buffer

    def test_move_color_region(self):
        s = P.s
        wb = empty_wb(construct_valid_tuple((5, 6, 3), P))
        top = wb.nu[-1]
        lemmas.move_color_region(wb, s + 1, s + 3)
        assert isinstance(wb.kind(s + 1), Waiting)
        assert wb.kind(s + 3) == ColorRegion(0, 1, 5)
        lemmas.move_color_region(wb, s + 3, s + 2)
        assert wb.kind(s + 2) == ColorRegion(0, 1, 5) and wb.kind(s + 3) == ColorRegion(1, 2, 6)
        assert wb.nu[-1] == top
        assert check_validity(wb.nu, P).valid

    def test_choose_temporary(self):
        wb = empty_wb(with_transposition(canon(), 3, 0, 2))
        lemmas.choose_temporary(wb, 3, 6)
        assert wb.kind(3).temporaries == frozenset({4, 6})
        with pytest.raises(InternalInvariantError):
            lemmas.choose_temporary(wb, 3, 2)


class TestBorderPhase:
    def test_swap_of_canonical_colors(self):
        wb = empty_wb(canon())
        settle(wb, (2, 1, 3))
        assert wb.nu[-1] == (2, 1, 3)

    def test_nothing_to_do(self):
        wb = empty_wb(canon())
        with pytest.raises(InternalInvariantError):
            lemmas.step1_decrease_border_error(wb, P.canonical())

    @given(st.integers(1, 4), st.integers(0, 2), st.data())
    def test_reaches_any_target(self, omega, extra, data):
        params = BufferParams(omega, 1, omega + 3 + extra)
        colors = range(1, params.k + 1)
        start = tuple(data.draw(st.permutations(colors))[:omega])
        target = tuple(data.draw(st.permutations(colors))[:omega])
        wb = empty_wb(construct_valid_tuple(start, params), params)
        settle(wb, target)
        assert wb.nu[-1] == target
        assert is_vectorially_proper(wb.nu)

    @given(st.integers(2, 4), st.data())
    def test_unification(self, omega, data):
        params = BufferParams(omega, 1, omega + 3)
        colors = range(1, params.k + 1)
        target = tuple(data.draw(st.permutations(colors))[:omega])
        wbs = []
        for _ in range(3):
            start = tuple(data.draw(st.permutations(colors))[:omega])
            wb = empty_wb(construct_valid_tuple(start, params), params)
            for _ in range(data.draw(st.integers(0, 3))):
                settle(wb, tuple(data.draw(st.permutations(colors))[:omega]))
            settle(wb, target)
            wbs.append(wb)
        ref = wbs[0]
        for wb in wbs[1:]:
            lemmas.align_color_buffer(wb, ref.nu)
        for wb in wbs:
            lemmas.make_well_organized(wb)
            assert check_validity(wb.nu, params).valid
        for wb in wbs[1:]:
            lemmas.unify_transposition_buffer(wb, ref.nu)
        for wb in wbs:
            lemmas.orient_all(wb)
        assert all(wb.nu == ref.nu for wb in wbs)
        assert check_validity(ref.nu, params).valid
        assert ref.nu[-1] == target
