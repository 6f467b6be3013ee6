"""Scaling runs: one transform per (size, repeat), reported as CSV rows."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from statistics import mean
from typing import Iterable, List, Optional, Sequence

from .engine import prepare, transform
from .generators import GenSpec, gen_coloring, gen_graph

FIELDS = ("n", "repeat", "length", "length_per_n", "maxPerVertex", "millis")

# relative spread of length/n allowed around its mean over all sizes
LENGTH_PER_N_TOLERANCE = 0.10


@dataclass
class BenchRow:
    n: int
    repeat: int
    length: int
    max_per_vertex: int
    millis: float
    omega: int = 0
    delta: int = 0

    @property
    def length_per_n(self) -> float:
        return self.length / self.n if self.n else 0.0

    def as_csv(self) -> list:
        return [self.n, self.repeat, self.length, f"{self.length_per_n:.4f}", self.max_per_vertex, f"{self.millis:.1f}"]


def run_one(model: str, n: int, omega: int, max_degree: Optional[int], k: int, seed: int, repeat: int) -> BenchRow:
    """Generate one instance and time ``transform`` on it (generation excluded)."""
    g, meta = gen_graph(GenSpec(model, n, omega, max_degree, seed + repeat))
    c1 = gen_coloring(g, k, 2 * (seed + repeat) + 1)
    c2 = gen_coloring(g, k, 2 * (seed + repeat) + 2)
    t0 = time.perf_counter()
    seq = transform(g, c1, c2, k, prepared=prepare(g, k))
    millis = 1000 * (time.perf_counter() - t0)
    return BenchRow(n, repeat, seq.length, seq.max_per_vertex, millis, meta["omega"], meta["delta"])


def run_bench(
    model: str,
    sizes: Sequence[int],
    omega: int,
    max_degree: Optional[int],
    k: int,
    repeats: int = 1,
    seed: int = 0,
    jobs: int = 1,
) -> List[BenchRow]:
    """Rows ordered by (size, repeat) regardless of ``jobs``."""
    tasks = [(model, n, omega, max_degree, k, seed, r) for n in sizes for r in range(repeats)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            return list(pool.map(run_one, *zip(*tasks)))
    return [run_one(*t) for t in tasks]


def stability(rows: Iterable[BenchRow]) -> dict:
    """Check that the per-vertex maximum and length/n do not drift with n."""
    rows = list(rows)
    peaks = sorted({r.max_per_vertex for r in rows})
    ratios = [r.length_per_n for r in rows]
    centre = mean(ratios) if ratios else 0.0
    spread = max((abs(x / centre - 1) for x in ratios), default=0.0) if centre else 0.0
    return {
        "max_per_vertex_values": peaks,
        "max_per_vertex_identical": len(peaks) <= 1,
        "length_per_n_mean": centre,
        "length_per_n_spread": spread,
        "length_per_n_stable": spread <= LENGTH_PER_N_TOLERANCE,
    }


def to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow(r.as_csv())
    return buf.getvalue()
