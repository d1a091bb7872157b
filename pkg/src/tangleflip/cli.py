"""Command-line entry point: count, sample, walk, graph, spectra, convert,
verify. All outputs stream line by line; every command is deterministic
given its flags, seed, and cache state."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__, counting, duality, flipgraph, polygon, sampling, selfcheck
from .errors import TangleflipError

ENV_CACHE_DIR = "TANGLEFLIP_CACHE_DIR"


def _default_cache_dir() -> Path:
    env = os.environ.get(ENV_CACHE_DIR)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "tangleflip"


def _open_out(path: str | None):
    if path is None or path == "-":
        return sys.stdout, False
    return open(path, "w"), True


def _open_in(path: str | None):
    if path is None or path == "-":
        return sys.stdin, False
    return open(path), True


def cmd_count(args) -> int:
    imported = (
        counting.load_irreducible_counts(args.import_h) if args.import_h else None
    )
    table = counting.build_count_table(
        args.max_n, cache_dir=args.cache_dir, imported_h=imported
    )
    if args.format == "json":
        payload = {
            "max_n": table.max_n,
            "h_source": table.h_source,
            "planar": {str(n): str(table.planar[n]) for n in range(1, table.max_n + 1)},
            "irreducible": {
                str(n): str(table.irreducible[n]) for n in range(1, table.max_n + 1)
            },
            "by_core": {
                f"{n},{k}": str(v) for (n, k), v in sorted(table.by_core.items())
            },
        }
        print(json.dumps(payload, indent=2))
        return 0
    print("n,k,t_nk")
    for n in range(2, table.max_n + 1):
        for k in range(2, n + 1):
            print(f"{n},{k},{table.by_core[(n, k)]}")
    print("n,total")
    for n in range(1, table.max_n + 1):
        print(f"{n},{table.planar[n]}")
    return 0


def cmd_sample(args) -> int:
    cfg = sampling.SamplerConfig(
        seed=args.seed,
        mcmc_burn_in=args.burn_in,
        mcmc_random_start=args.random_start,
        cache_dir=args.cache_dir,
    )
    if args.mode == "exact" and args.size > cfg.exact_irreducible_cap:
        print(
            f"error: exact mode needs size <= {cfg.exact_irreducible_cap}; "
            "use --mode mcmc with --burn-in",
            file=sys.stderr,
        )
        return 2
    if args.mode == "mcmc" and args.burn_in is None:
        print("error: --mode mcmc requires --burn-in", file=sys.stderr)
        return 2
    max_n = max(args.size, counting.DEFAULT_MAX_N)
    table = counting.build_count_table(max_n, cache_dir=args.cache_dir)
    trace_out = open(args.trace, "w") if args.trace else None
    approx = 0
    root = sampling.RandomStream(args.seed)
    for i in range(args.count):
        t, trace = sampling.sample_planar_tanglegram(
            args.size, cfg, table, root.child(i)
        )
        print(t.code)
        if not trace.exact:
            approx += 1
        if trace_out:
            trace_out.write(json.dumps(trace.to_dict()) + "\n")
    if trace_out:
        trace_out.close()
    if approx:
        print(
            f"note: {approx}/{args.count} samples used approximate layout draws",
            file=sys.stderr,
        )
    return 0


def cmd_walk(args) -> int:
    if args.n < 4:
        print("error: the walk needs polygon size at least 4", file=sys.stderr)
        return 2
    pair = polygon.DisjointPair(polygon.fan(args.n, 1), polygon.fan(args.n, args.n))
    rng = sampling.RandomStream(args.seed)
    for step in range(1, args.steps + 1):
        pair = sampling.random_walk_step(pair, rng)
        if step % args.emit_every == 0:
            print(pair.encode())
    return 0


def cmd_graph(args) -> int:
    g = flipgraph.build_flip_graph(args.n)
    diam = flipgraph.diameter(g)
    triangle = flipgraph.find_triangle(g) if args.n >= 5 else None
    report = {
        "n": args.n,
        "vertices": g.vertex_count,
        "degree": g.degree,
        "edges": g.edge_count,
        "connected": True,
        "diameter": diam,
        "diameter_bound_4n_minus_16": diam <= 4 * args.n - 16,
        "triangle": list(triangle) if triangle else None,
    }
    if args.dot:
        Path(args.dot).write_text(g.to_dot())
    if args.json:
        Path(args.json).write_text(json.dumps(report, indent=2) + "\n")
    if args.format == "json":
        print(json.dumps(report, indent=2))
    else:
        print(f"n {args.n}: {g.vertex_count} vertices, {g.degree}-regular, "
              f"{g.edge_count} edges, connected, diameter {diam}")
        if triangle:
            print(f"triangle witness: vertices {triangle}")
    return 0


def cmd_spectra(args) -> int:
    if args.min < 5:
        print("error: spectra need polygon size at least 5", file=sys.stderr)
        return 2
    json_out = open(args.json, "w") if args.json else None
    print(flipgraph.CSV_HEADER)
    for n in range(args.min, args.max + 1):
        g = flipgraph.build_flip_graph(n)
        rep = flipgraph.spectral_report(g)
        diam = flipgraph.diameter(g) if n <= args.diameter_max else None
        print(flipgraph.csv_row(n, rep, diam))
        if json_out:
            json_out.write(rep.to_json() + "\n")
    if json_out:
        json_out.close()
    return 0


def cmd_convert(args) -> int:
    src, close_in = _open_in(args.input)
    dst, close_out = _open_out(args.output)
    try:
        for line in src:
            line = line.strip()
            if not line:
                continue
            if args.direction == "pair-to-layout":
                pair = polygon.DisjointPair.parse(line)
                dst.write(duality.pair_to_layout(pair).encode() + "\n")
            else:
                from .tanglegram import Layout

                layout = Layout.parse(line)
                dst.write(duality.layout_to_pair(layout).encode() + "\n")
    finally:
        if close_in:
            src.close()
        if close_out:
            dst.close()
    return 0


def cmd_verify(args) -> int:
    results = selfcheck.run_checks(args.level, cache_dir=args.cache_dir)
    all_ok = all(ok for _, ok, _ in results)
    if args.format == "json":
        print(
            json.dumps(
                {
                    "level": args.level,
                    "pass": all_ok,
                    "checks": [
                        {"name": n, "pass": ok, "detail": d} for n, ok, d in results
                    ],
                },
                indent=2,
            )
        )
    else:
        for name, ok, detail in results:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        print(f"{'PASS' if all_ok else 'FAIL'} overall "
              f"({sum(ok for _, ok, _ in results)}/{len(results)} checks)")
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tangleflip",
        description=(
            "Exact counting, uniform sampling, and flip-graph diagnostics for "
            "planar tanglegrams and disjoint triangulation pairs."
        ),
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="emit exact count tables")
    p.add_argument("--max-n", type=int, default=counting.DEFAULT_MAX_N)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--cache-dir", type=Path, default=_default_cache_dir())
    p.add_argument(
        "--import-h", type=str, default=None,
        help="external irreducible-count table ('h n value' lines), "
        "cross-checked on the computable overlap before use",
    )
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("sample", help="sample planar tanglegrams uniformly")
    p.add_argument("--size", type=int, required=True)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["exact", "mcmc"], default="exact")
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--random-start", action="store_true")
    p.add_argument("--trace", type=str, default=None, help="JSON-lines trace file")
    p.add_argument("--cache-dir", type=Path, default=_default_cache_dir())
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("walk", help="stream the flip walk on disjoint pairs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit-every", type=int, default=1)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("graph", help="build and export the pair flip graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dot", type=str, default=None)
    p.add_argument("--json", type=str, default=None)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("spectra", help="walk spectra and mixing iteration counts")
    p.add_argument("--min", type=int, default=5)
    p.add_argument("--max", type=int, default=7)
    p.add_argument("--diameter-max", type=int, default=8,
                   help="largest n for which the exact diameter is included")
    p.add_argument("--json", type=str, default=None,
                   help="also write one JSON report per line to this file")
    p.set_defaults(func=cmd_spectra)

    p = sub.add_parser("convert", help="translate between pair and layout encodings")
    p.add_argument(
        "--direction",
        choices=["pair-to-layout", "layout-to-pair"],
        required=True,
    )
    p.add_argument("--input", type=str, default=None)
    p.add_argument("--output", type=str, default=None)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("verify", help="run the cross-validation suites")
    p.add_argument("--level", choices=["quick", "full"], default="quick")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.add_argument("--cache-dir", type=Path, default=None,
                   help="reuse (and tamper-check) a counts cache")
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TangleflipError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
