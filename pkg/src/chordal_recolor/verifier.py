"""Independent replay of recoloring sequences.

Nothing here depends on the engine: the replay walks the raw adjacency
lists of the graph and trusts no precomputed structure.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Step = Tuple[int, int, int]


@dataclass
class VerifyReport:
    ok: bool
    length: int
    failure_index: Optional[int] = None
    failure_reason: str = ""
    per_vertex_counts: Dict[int, int] = field(default_factory=dict)
    max_per_vertex: int = 0

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "length": self.length,
            "failureIndex": self.failure_index,
            "failureReason": self.failure_reason,
            "maxPerVertex": self.max_per_vertex,
        }


def _as_step(item) -> Step:
    if isinstance(item, dict):
        return int(item["v"]), int(item["from"]), int(item["to"])
    v, a, b = item
    return int(v), int(a), int(b)


def recolor_stats(steps: Iterable) -> Tuple[Dict[int, int], int]:
    """Exact per-vertex recoloring counts and their maximum."""
    counts = Counter(_as_step(s)[0] for s in steps)
    return dict(counts), max(counts.values(), default=0)


def verify_sequence(g, start: Sequence[int], steps: Iterable, expected_end: Sequence[int], k: int) -> VerifyReport:
    """Replay ``steps`` from ``start`` and check properness at every step.

    Parameters
    ----------
    g : Graph
        Graph with an ``adjacency`` list per vertex.
    start, expected_end : sequence of int
        Colorings (1-based colors), one entry per vertex.
    steps : iterable
        ``(vertex, from, to)`` triples or ``{"v", "from", "to"}`` dicts.
    k : int
        Number of available colors.
    """
    adjacency = g.adjacency
    n = len(adjacency)
    color = list(start)
    steps = [_as_step(s) for s in steps]
    counts: Counter = Counter()

    def fail(i, why):
        pc = dict(counts)
        return VerifyReport(False, len(steps), i, why, pc, max(pc.values(), default=0))

    if len(color) != n:
        return fail(None, f"start coloring has {len(color)} entries for {n} vertices")
    for u in range(n):
        if not 1 <= color[u] <= k:
            return fail(None, f"start color of {u} outside 1..{k}")
        for w in adjacency[u]:
            if color[w] == color[u]:
                return fail(None, f"start coloring is improper on edge {u}-{w}")
    for i, (v, a, b) in enumerate(steps):
        if not 0 <= v < n:
            return fail(i, f"vertex {v} does not exist")
        if color[v] != a:
            return fail(i, f"vertex {v} has color {color[v]}, step claims {a}")
        if a == b:
            return fail(i, f"step leaves vertex {v} on color {a}")
        if not 1 <= b <= k:
            return fail(i, f"color {b} outside 1..{k}")
        for w in adjacency[v]:
            if color[w] == b:
                return fail(i, f"vertex {v} takes color {b} of neighbour {w}")
        color[v] = b
        counts[v] += 1
    if list(expected_end) != color:
        bad = next((u for u in range(n) if color[u] != expected_end[u]), None)
        return fail(None, f"final coloring differs from the expected end (first at vertex {bad})")
    pc = dict(counts)
    return VerifyReport(True, len(steps), None, "", pc, max(pc.values(), default=0))


def read_sequence(text: str) -> Tuple[List[Step], Optional[dict]]:
    """Parse the JSON-lines sequence format; returns steps and the metadata object."""
    steps: List[Step] = []
    meta = None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        obj = json.loads(line)
        if not isinstance(obj, dict):
            raise ValueError(f"line {lineno}: expected a JSON object")
        if "v" in obj:
            steps.append(_as_step(obj))
        else:
            meta = obj
    return steps, meta
