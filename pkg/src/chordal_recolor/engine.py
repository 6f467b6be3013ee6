"""Bottom-up recoloring of a chordal graph to its canonical coloring.

The clique tree is swept from the deepest level to the root.  Below every
clique a buffer of ``3N`` height blocks carries a valid vector tuple; the
tuples of sibling buffers are made identical and then shifted one level up.
Once the root is treated, a virtual parent with an empty bag pulls every
remaining vertex to its canonical color.
"""

from __future__ import annotations

import json
import os
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from . import lemmas
from .buffer import (
    A,
    BufferParams,
    Recorder,
    Vector,
    WorkingBuffer,
    border_error,
    check_validity,
    clique_vector,
    construct_valid_tuple,
    dump_tuple,
    internal_classes,
    lift_buffer,
    separation_violations,
    well_colored_violations,
)
from .exceptions import InternalInvariantError, InvalidColoring
from .graph import (
    CanonicalClasses,
    CliqueTree,
    Graph,
    Peo,
    build_clique_tree,
    canonical_coloring,
    maximum_cardinality_search,
    root_and_heights,
)
from .verifier import verify_sequence

# step-3 coordinate budget is STEP3_CONSTANT * omega**2
STEP3_CONSTANT = 40


def debug_enabled(debug: Optional[bool] = None) -> bool:
    if debug is not None:
        return bool(debug)
    return os.environ.get("RECOLOR_DEBUG", "") not in ("", "0")


@dataclass
class LemmaStats:
    """Budget instrumentation collected while the engine runs.

    Each ``*_max`` field is the largest number of recolorings of a single
    coordinate (or vertex, for the shift) during one invocation.
    """

    step1_calls: int = 0
    step1_max: int = 0
    step1_cases: Counter = field(default_factory=Counter)
    step2_calls: int = 0
    step2_max: int = 0
    step3_calls: int = 0
    step3_max: int = 0
    step4_calls: int = 0
    step4_max: int = 0
    violations: List[str] = field(default_factory=list)

    def step3_constant(self, omega: int) -> float:
        return self.step3_max / max(omega, 1) ** 2

    def merge(self, other: "LemmaStats") -> None:
        for name in ("step1_calls", "step2_calls", "step3_calls", "step4_calls"):
            setattr(self, name, getattr(self, name) + getattr(other, name))
        for name in ("step1_max", "step2_max", "step3_max", "step4_max"):
            setattr(self, name, max(getattr(self, name), getattr(other, name)))
        self.step1_cases.update(other.step1_cases)
        self.violations.extend(other.violations)

    def to_dict(self) -> dict:
        return {
            "step1": {"calls": self.step1_calls, "max": self.step1_max, "cases": dict(self.step1_cases)},
            "step2": {"calls": self.step2_calls, "max": self.step2_max},
            "step3": {"calls": self.step3_calls, "max": self.step3_max},
            "step4": {"calls": self.step4_calls, "max": self.step4_max},
            "violations": list(self.violations),
        }


@dataclass
class Prepared:
    """Everything that depends on the graph and ``k`` but not on a coloring."""

    graph: Graph
    k: int
    peo: Peo
    classes: CanonicalClasses
    tree: CliqueTree
    params: BufferParams

    @property
    def omega(self) -> int:
        return self.params.omega

    @property
    def delta(self) -> int:
        return self.graph.max_degree


def prepare(g: Graph, k: int) -> Prepared:
    """Certify chordality and build the canonical coloring and rooted clique tree.

    Raises
    ------
    NotChordal
        When ``g`` has a hole.
    KTooSmall
        When ``k < omega + 3``.
    """
    peo = maximum_cardinality_search(g)
    classes = canonical_coloring(g, peo)
    tree = root_and_heights(build_clique_tree(g, peo))
    omega = max(classes.omega, 1)
    params = BufferParams(omega=omega, delta=max(g.max_degree, 1), k=k)
    return Prepared(g, k, peo, classes, tree, params)


def vertex_budget(params: BufferParams) -> int:
    """Loose per-vertex bound for one canonicalization.

    A vertex lives in at most ``depth + delta + 1`` buffers, and one
    treatment recolors a coordinate at most ``9 omega`` times in the border
    phase, ``STEP3_CONSTANT omega^2`` times when siblings are unified and
    once during the shift.
    """
    w = params.omega
    per_buffer = 9 * w + STEP3_CONSTANT * w * w + 1
    return (params.depth + params.delta + 1) * per_buffer


@dataclass
class RecolorSequence:
    steps: List[tuple]
    start: List[int]
    end: List[int]
    k: int
    omega: int
    delta: int
    budget: int = 0
    stats: LemmaStats = field(default_factory=LemmaStats)

    @property
    def length(self) -> int:
        return len(self.steps)

    def per_vertex_counts(self) -> Dict[int, int]:
        return dict(Counter(v for v, _, _ in self.steps))

    @property
    def max_per_vertex(self) -> int:
        return max(self.per_vertex_counts().values(), default=0)

    def metadata(self) -> dict:
        return {
            "length": self.length,
            "maxPerVertex": self.max_per_vertex,
            "omega": self.omega,
            "delta": self.delta,
            "k": self.k,
        }

    def inverse(self) -> "RecolorSequence":
        steps = [(v, b, a) for v, a, b in reversed(self.steps)]
        return RecolorSequence(steps, list(self.end), list(self.start), self.k, self.omega, self.delta, self.budget, self.stats)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"v": v, "from": a, "to": b}) for v, a, b in self.steps]
        lines.append(json.dumps(self.metadata()))
        return "\n".join(lines) + "\n"


def validate_coloring(g: Graph, phi: Sequence[int], k: int, name: str = "coloring") -> List[int]:
    phi = list(phi)
    if len(phi) != g.n:
        raise InvalidColoring(f"{name} has {len(phi)} entries for {g.n} vertices")
    for v, c in enumerate(phi):
        if isinstance(c, bool) or not isinstance(c, int) or not 1 <= c <= k:
            raise InvalidColoring(f"{name}: vertex {v} has color {c!r} outside 1..{k}")
    for u, v in g.edges():
        if phi[u] == phi[v]:
            raise InvalidColoring(f"{name} is not proper on edge {u}-{v}")
    return phi


class _Run:
    """State of one canonicalization run."""

    def __init__(self, prep: Prepared, phi: Sequence[int], debug: bool):
        self.prep = prep
        self.g = prep.graph
        self.params = prep.params
        self.classes = prep.classes
        self.tree = prep.tree
        self.debug = debug
        self.rec = Recorder(self.g, phi, prep.k, debug)
        self.buffers: Dict[int, object] = {}
        self.tuples: Dict[int, List[Vector]] = {}
        self.stats = LemmaStats()

    # -- checks ---------------------------------------------------------
    def _check(self, wb: WorkingBuffer, almost: bool, where: str) -> None:
        if not self.debug:
            return
        report = check_validity(wb.nu, self.params)
        ok = report.almost_valid if almost else report.valid
        if not ok:
            raise InternalInvariantError(
                f"{where}: tuple is {report.status} ({report.prop}, region {report.region}: {report.detail})\n"
                + dump_tuple(wb.nu, self.params)
            )
        bad = well_colored_violations(wb.buf, wb.nu, self.rec.color)
        if bad:
            raise InternalInvariantError(f"{where}: vertices {bad[:5]} not colored by the tuple")

    def _note(self, msg: str) -> None:
        self.stats.violations.append(msg)

    # -- lemma wrappers ---------------------------------------------------
    def _border_phase(self, wb: WorkingBuffer, nu_c: Sequence[int]) -> None:
        s = self.params.s
        while True:
            before = border_error(nu_c, wb.nu)
            if before == 0:
                return
            with wb.track() as cnt:
                case = lemmas.step1_decrease_border_error(wb, nu_c)
            self.stats.step1_calls += 1
            self.stats.step1_cases[case] += 1
            top = max(cnt.values(), default=0)
            self.stats.step1_max = max(self.stats.step1_max, top)
            if top > 3:
                self._note(f"step1 case {case} recolored a coordinate {top} times")
            if any(b < A(s) for b, _ in cnt):
                self._note("step1 touched the transposition buffer")
            if border_error(nu_c, wb.nu) >= before:
                raise InternalInvariantError("border error did not decrease")
            self._check(wb, True, f"step1 case {case}")
            with wb.track() as cnt:
                lemmas.step2_make_valid(wb)
            self.stats.step2_calls += 1
            top = max(cnt.values(), default=0)
            self.stats.step2_max = max(self.stats.step2_max, top)
            if top > 6:
                self._note(f"step2 recolored a coordinate {top} times")
            if any(not A(2) <= b <= A(s + 1) - 1 for b, _ in cnt):
                self._note("step2 touched blocks outside the transposition buffer")
            self._check(wb, False, "step2")

    def _unify(self, wbs: List[WorkingBuffer]) -> None:
        if len(wbs) < 2:
            return
        ref, others = wbs[0], wbs[1:]
        trackers = [wb.track() for wb in wbs]
        counters = [t.__enter__() for t in trackers]
        try:
            for wb in others:
                lemmas.align_color_buffer(wb, ref.nu)
                self._check(wb, False, "color buffer alignment")
            for wb in wbs:
                lemmas.make_well_organized(wb)
                self._check(wb, False, "well organized")
            for wb in others:
                lemmas.unify_transposition_buffer(wb, ref.nu)
                self._check(wb, False, "transposition buffer unification")
            for wb in wbs:
                lemmas.orient_all(wb)
        finally:
            for t in trackers:
                t.__exit__(None, None, None)
        for wb in others:
            if wb.nu != ref.nu:
                raise InternalInvariantError("sibling tuples differ after unification")
        self.stats.step3_calls += 1
        omega = self.params.omega
        for cnt in counters:
            top = max(cnt.values(), default=0)
            self.stats.step3_max = max(self.stats.step3_max, top)
            if top > STEP3_CONSTANT * omega * omega:
                self._note(f"step3 recolored a coordinate {top} times")
            if any(b >= len(ref.nu) - 3 or b < 3 for b, _ in cnt):
                self._note("step3 touched the first or last region")

    # -- main loop ----------------------------------------------------------
    def treat(self, node: int) -> None:
        tree, params, classes = self.tree, self.params, self.classes
        bag = tree.bags[node]
        children = sorted(tree.children[node])
        if not children:
            nu = construct_valid_tuple(clique_vector(bag, self.rec.color, classes, params.k), params)
            self.buffers[node] = lift_buffer(node, bag, [], params, classes)
            self.tuples[node] = nu
            return
        nu_c = clique_vector(bag, self.rec.color, classes, params.k)
        wbs = []
        for ch in children:
            buf = self.buffers.pop(ch)
            wb = WorkingBuffer(buf, self.tuples.pop(ch), self.rec, internal_classes(buf, self.g, classes))
            self._check(wb, False, f"buffer below node {ch}")
            self._border_phase(wb, nu_c)
            wbs.append(wb)
        self._unify(wbs)
        nu = wbs[0].nu
        counter: Counter = Counter()
        for wb in wbs:
            lemmas.shift_frontier(wb, counter)
        self.stats.step4_calls += 1
        top = max(counter.values(), default=0)
        self.stats.step4_max = max(self.stats.step4_max, top)
        if top > 1:
            self._note(f"step4 recolored a vertex {top} times")
        buf = lift_buffer(node, bag, [wb.buf for wb in wbs], params, classes)
        self.buffers[node] = buf
        self.tuples[node] = list(nu)
        if self.debug:
            bad = well_colored_violations(buf, nu, self.rec.color)
            if bad:
                raise InternalInvariantError(f"shift left vertices {bad[:5]} off their block colors")
            if separation_violations(self.g, buf):
                raise InternalInvariantError(f"separation fails below node {node}")

    def finish(self, root: int) -> None:
        """Empty the buffer of a root against a virtual parent with an empty bag."""
        params = self.params
        buf = self.buffers.pop(root)
        wb = WorkingBuffer(buf, self.tuples.pop(root), self.rec, internal_classes(buf, self.g, self.classes))
        self._border_phase(wb, params.canonical())
        if params.s - 1 >= 2:
            lemmas.cancel_identity_segment(wb, 2, params.s - 1)
        canon = params.canonical()
        if any(vec != canon for vec in wb.nu):
            raise InternalInvariantError("root buffer is not canonical after the final phase")

    def run(self) -> None:
        for h in sorted(self.tree.height_table, reverse=True):
            for node in self.tree.height_table[h]:
                self.treat(node)
        for r in self.tree.roots:
            self.finish(r)
        if self.rec.color != list(self.classes.c0):
            raise InternalInvariantError("final coloring differs from the canonical coloring")


def recolor_to_canonical(
    g: Graph,
    phi: Sequence[int],
    k: int,
    debug: Optional[bool] = None,
    prepared: Optional[Prepared] = None,
    verify: bool = True,
) -> RecolorSequence:
    """Recolor ``phi`` into the canonical coloring by single-vertex recolorings.

    Parameters
    ----------
    g : Graph
        Chordal graph.
    phi : sequence of int
        Proper coloring with colors in ``1..k``.
    k : int
        Number of colors, at least ``omega + 3``.
    debug : bool, optional
        Run validity checks after every lemma (defaults to ``RECOLOR_DEBUG``).
    prepared : Prepared, optional
        Reuse the result of :func:`prepare`.

    Returns
    -------
    RecolorSequence
        Steps from ``phi`` to the canonical coloring.
    """
    prep = prepared if prepared is not None else prepare(g, k)
    phi = validate_coloring(g, phi, k)
    run = _Run(prep, phi, debug_enabled(debug))
    run.run()
    seq = RecolorSequence(
        run.rec.steps,
        phi,
        list(prep.classes.c0),
        k,
        prep.omega,
        prep.delta,
        vertex_budget(prep.params),
        run.stats,
    )
    if verify:
        _certify(g, seq)
    return seq


def _certify(g: Graph, seq: RecolorSequence) -> None:
    report = verify_sequence(g, seq.start, seq.steps, seq.end, seq.k)
    if not report.ok:
        raise InternalInvariantError(f"emitted sequence fails replay at step {report.failure_index}: {report.failure_reason}")


def transform(
    g: Graph,
    c1: Sequence[int],
    c2: Sequence[int],
    k: int,
    debug: Optional[bool] = None,
    prepared: Optional[Prepared] = None,
) -> RecolorSequence:
    """Sequence of single-vertex recolorings from ``c1`` to ``c2``.

    Both colorings are canonicalized; the second path is reversed.
    """
    prep = prepared if prepared is not None else prepare(g, k)
    first = recolor_to_canonical(g, c1, k, debug, prep, verify=False)
    second = recolor_to_canonical(g, c2, k, debug, prep, verify=False)
    back = second.inverse()
    stats = LemmaStats()
    stats.merge(first.stats)
    stats.merge(second.stats)
    seq = RecolorSequence(
        first.steps + back.steps,
        list(first.start),
        list(back.end),
        k,
        prep.omega,
        prep.delta,
        2 * first.budget,
        stats,
    )
    _certify(g, seq)
    return seq
