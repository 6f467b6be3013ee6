"""Command-line entry point: ``chordal-recolor {recolor,verify,oracle,gen,bench}``.

Exit codes: 0 success, 1 domain error (non-chordal input, too few colors,
improper coloring, state space over the cap, failed verification), 2 I/O
or parse error, 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import oracle
from .bench import run_bench, stability, to_csv
from .engine import prepare, transform
from .exceptions import InternalInvariantError, RecolorDomainError, RecolorError
from .generators import MODELS, GenSpec, gen_coloring, gen_graph
from .graph import load_coloring, load_graph
from .verifier import read_sequence, verify_sequence

EXIT_OK, EXIT_DOMAIN, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


def _read(path):
    return Path(path).read_text()


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_recolor(args) -> int:
    g = load_graph(_read(args.graph))
    c1 = load_coloring(_read(getattr(args, "from")))
    c2 = load_coloring(_read(args.to))
    t0 = time.perf_counter()
    seq = transform(g, c1, c2, args.k, prepared=prepare(g, args.k))
    elapsed = time.perf_counter() - t0
    _write(args.out, seq.to_jsonl())
    if args.stats:
        meta = seq.metadata()
        print(
            f"length={meta['length']} maxPerVertex={meta['maxPerVertex']} "
            f"omega={meta['omega']} delta={meta['delta']} seconds={elapsed:.3f}",
            file=sys.stderr,
        )
    return EXIT_OK


def cmd_verify(args) -> int:
    g = load_graph(_read(args.graph))
    start = load_coloring(_read(args.start))
    end = load_coloring(_read(args.end))
    steps, _ = read_sequence(_read(args.seq))
    report = verify_sequence(g, start, steps, end, args.k)
    print(json.dumps(report.to_json()))
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_oracle(args) -> int:
    g = load_graph(_read(args.graph))
    if args.mode == "connected":
        value = oracle.reconfig_connected(g, args.k, args.cap)
    elif args.mode == "diameter":
        value = oracle.reconfig_diameter(g, args.k, args.cap)
    else:
        if getattr(args, "from") is None or args.to is None:
            raise argparse.ArgumentTypeError("--mode distance needs --from and --to")
        value = oracle.bfs_distance(
            g, args.k, load_coloring(_read(getattr(args, "from"))), load_coloring(_read(args.to)), args.cap
        )
    print(json.dumps({"mode": args.mode, "value": value}))
    return EXIT_OK


def cmd_gen(args) -> int:
    spec = GenSpec(args.model, args.n, args.omega, args.max_degree, args.seed)
    g, meta = gen_graph(spec)
    _write(args.out, json.dumps(g.to_json()) + "\n")
    if args.meta:
        _write(args.meta, json.dumps(meta) + "\n")
    else:
        print(json.dumps(meta), file=sys.stderr)
    if args.coloring_out:
        if args.k is None:
            raise argparse.ArgumentTypeError("--coloring-out needs --k")
        _write(args.coloring_out, json.dumps(gen_coloring(g, args.k, args.coloring_seed)) + "\n")
    return EXIT_OK


def cmd_bench(args) -> int:
    sizes = [int(x) for x in args.sizes.split(",") if x.strip()]
    rows = run_bench(args.model, sizes, args.omega, args.max_degree, args.k, args.repeats, args.seed, args.jobs)
    _write(args.out, to_csv(rows))
    verdict = stability(rows)
    print(json.dumps(verdict), file=sys.stderr)
    stable = verdict["max_per_vertex_identical"] and verdict["length_per_n_stable"]
    return EXIT_OK if stable else EXIT_DOMAIN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chordal-recolor", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("recolor", help="transform one coloring into another")
    p.add_argument("--graph", required=True, help="graph JSON file")
    p.add_argument("--from", required=True, help="start coloring JSON file")
    p.add_argument("--to", required=True, help="target coloring JSON file")
    p.add_argument("--k", type=int, required=True, help="number of colors")
    p.add_argument("--out", default="-", help="JSONL output (default stdout)")
    p.add_argument("--stats", action="store_true", help="print length, maxPerVertex, omega, delta and time")
    p.set_defaults(func=cmd_recolor)

    p = sub.add_parser("verify", help="replay a sequence and check every step")
    p.add_argument("--graph", required=True)
    p.add_argument("--start", required=True, help="start coloring JSON file")
    p.add_argument("--seq", required=True, help="JSONL sequence file")
    p.add_argument("--end", required=True, help="expected final coloring JSON file")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="brute-force reconfiguration graph queries")
    p.add_argument("--graph", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mode", choices=("connected", "distance", "diameter"), required=True)
    p.add_argument("--from", default=None, help="start coloring (distance mode)")
    p.add_argument("--to", default=None, help="target coloring (distance mode)")
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP, help="maximum number of colorings")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate a chordal graph")
    p.add_argument("--model", choices=MODELS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--omega", type=int, default=2)
    p.add_argument("--max-degree", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default="-", help="graph JSON output (default stdout)")
    p.add_argument("--meta", default=None, help="metadata JSON output (default stderr)")
    p.add_argument("--k", type=int, default=None, help="colors for --coloring-out")
    p.add_argument("--coloring-out", default=None, help="also write a random proper coloring")
    p.add_argument("--coloring-seed", type=int, default=0)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="CSV of transform cost across sizes")
    p.add_argument("--model", choices=MODELS, default="ktree")
    p.add_argument("--sizes", required=True, help="comma-separated vertex counts")
    p.add_argument("--omega", type=int, default=3)
    p.add_argument("--max-degree", type=int, default=8)
    p.add_argument("--k", type=int, default=6)
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", default="-", help="CSV output (default stdout)")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InternalInvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except RecolorDomainError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (OSError, ValueError, KeyError, RecolorError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
