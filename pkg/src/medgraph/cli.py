"""Command-line front end: generate, compute, build, query, verify, bench.

Exit codes: 0 success, 1 verification mismatch, 2 usage error, 3 invalid
input (unreadable/malformed files, non-median or out-of-guard graphs).
All deterministic output goes to stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import _kernels
from .graph import (
    GraphError,
    NotMedianGraphError,
    load_graph,
    load_weights,
    save_graph,
    zero_weights,
)
from .theta import (
    compute_theta_classes,
    halfspace_sizes_minmaj,
    median_set,
)
from .ecc import morse
from .oracle import build_oracle, label_size_bits, load_labels, query, save_labels
from . import testkit

_EPILOG = """\
file formats:
  graph    line 1: "n m"; then m lines "u v" with 0 <= u < v < n, ASCII
           decimal, single spaces, LF endings, edges sorted lexicographically.
  weights  n lines, one nonnegative decimal integer per line (< 2^40);
           line i is the weight of vertex i.  Default: all zeros.
  labels   header "MEDDO 1 n"; then per vertex a line "vid k" followed by k
           record lines: "B sub cls side gate dist",
           "U sub center dist Lsize c1..cL Tcount (c gate dist)*",
           "C sub", or "L sub partner|-".
  bench    CSV, comma separators, LF endings, header
           n,m,t_morse_ms,t_brute_ms_or_NA,t_build_ms,t_query_us_mean,max_label_bits

family specs (gen, bench):
  path:N | tree:N[,seed=S] | grid:AxB[xC...] | hypercube:K |
  closure:k=K,p=P[,seed=S] | product:SPEC|SPEC

exit codes:
  0 success; 1 verification mismatch; 2 usage error; 3 invalid input.

environment:
  MEDGRAPH_BACKEND      auto (default) | jit | py — numeric kernel selection.
  MEDGRAPH_GUARD_BRUTE  brute-force oracle size guard (default 4096).
  MEDGRAPH_GUARD_DJOKOVIC  edge-relation oracle guard (default 1024).
  MEDGRAPH_GUARD_VERIFY convexity-check guard (default 256).
"""

_BENCH_HEADER = "n,m,t_morse_ms,t_brute_ms_or_NA,t_build_ms,t_query_us_mean,max_label_bits"
_BENCH_FAMILIES = ("grid", "hypercube", "tree", "path", "closure")
_DEFAULT_SIZES = {
    "grid": (8, 16, 32),
    "hypercube": (4, 6, 8),
    "tree": (256, 1024, 4096),
    "path": (256, 1024, 4096),
    "closure": (6, 8, 10),
}
_QUERY_SAMPLES = 256
_ALL_PAIRS_VERIFY_CAP = 512


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="medgraph",
        description="Median-graph eccentricities and distance labels.",
        epilog=_EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser(
        "gen", help="generate a graph from a family spec string",
        description="Generate a median graph and write it in graph format. "
        "Spec grammar: path:N | tree:N[,seed=S] | grid:AxB[xC...] | "
        "hypercube:K | closure:k=K,p=P[,seed=S] | product:SPEC|SPEC.",
    )
    p.add_argument("spec", help="family spec string, e.g. closure:k=9,p=30,seed=1")
    p.add_argument("-o", "--output", required=True, metavar="FILE")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for specs that omit seed=S (default 0)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser(
        "theta", help="print the edge-class partition",
        description='Print one line per edge class: "class_id size sizeH1 '
        'sizeH2" (class edge count, then halfspace sizes, smaller first), '
        "sorted by class_id.",
    )
    p.add_argument("graph", metavar="GRAPH")
    p.set_defaults(func=_cmd_theta)

    p = sub.add_parser(
        "median", help="print the median vertex set",
        description="Print the ids of all vertices minimizing total distance, "
        "ascending, one per line.",
    )
    p.add_argument("graph", metavar="GRAPH")
    p.set_defaults(func=_cmd_median)

    p = sub.add_parser(
        "ecc", help="compute all weighted eccentricities",
        description='Print n lines "vertex_id eccentricity".  Weights default '
        "to zero; --verify cross-checks against the brute-force oracle and "
        "exits 1 on mismatch.",
    )
    p.add_argument("graph", metavar="GRAPH")
    p.add_argument("--weights", metavar="FILE")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=_cmd_ecc)

    p = sub.add_parser("oracle", help="distance labels: build, query, verify")
    osub = p.add_subparsers(dest="oracle_command", required=True, metavar="ACTION")

    q = osub.add_parser("build", help="build labels and write them",
                        description="Build distance labels for a median graph "
                        "and write them in label format.")
    q.add_argument("graph", metavar="GRAPH")
    q.add_argument("-o", "--output", required=True, metavar="FILE")
    q.set_defaults(func=_cmd_oracle_build)

    q = osub.add_parser("query", help="answer one distance query from labels",
                        description="Print d(u, v) computed from the labels alone.")
    q.add_argument("labels", metavar="LABELS")
    q.add_argument("u", type=int)
    q.add_argument("v", type=int)
    q.set_defaults(func=_cmd_oracle_query)

    q = osub.add_parser(
        "verify", help="cross-check labels against BFS distances",
        description=f"All pairs for n <= {_ALL_PAIRS_VERIFY_CAP}, otherwise "
        "--samples random pairs.  Exits 1 on any mismatch.",
    )
    q.add_argument("graph", metavar="GRAPH")
    q.add_argument("labels", metavar="LABELS")
    q.add_argument("--samples", type=int, default=100_000)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(func=_cmd_oracle_verify)

    p = sub.add_parser(
        "verify", help="run structural checks on a graph",
        description="Check that the input is a median graph and that the "
        "edge-class structure is sound: independent edge-relation partition, "
        "matching/two-component/convexity/boundary checks, median uniqueness, "
        "median-set equality.  Checks above their size guards are skipped "
        "(see environment variables in the top-level --help).  Exits 1 on "
        "any failure.",
    )
    p.add_argument("graph", metavar="GRAPH")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser(
        "bench", help="time eccentricities and oracle on a graph family",
        description="Print CSV timing rows for a graph family.  Sizes mean: "
        "grid = side length, hypercube = dimension k, tree/path = vertex "
        "count, closure = dimension k (with p = 4k seed points).  Vertex "
        "weights are drawn uniformly from [0, 10^6] per --seed.  The brute "
        "column is NA above the brute-force guard.  Timing columns vary "
        "run-to-run; all other columns are deterministic per seed.",
    )
    p.add_argument("--family", choices=_BENCH_FAMILIES, default="grid")
    p.add_argument("--sizes", metavar="N[,N...]",
                   help="comma-separated size list (empty string: header only)")
    p.add_argument("-o", "--output", metavar="FILE", help="write CSV here instead of stdout")
    p.add_argument("--backend", choices=("auto", "jit", "py"), default="auto",
                   help="numeric kernel backend (default: auto)")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_bench)

    return parser


def _cmd_gen(args) -> int:
    try:
        g = testkit.generate(args.spec, default_seed=args.seed)
    except GraphError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    save_graph(g, args.output)
    return 0


def _cmd_theta(args) -> int:
    g = load_graph(args.graph)
    t = compute_theta_classes(g)
    sizes = halfspace_sizes_minmaj(g, t)
    out = sys.stdout
    for c in range(t.q):
        out.write(f"{c} {t.class_size(c)} {int(sizes[c, 0])} {int(sizes[c, 1])}\n")
    return 0


def _cmd_median(args) -> int:
    g = load_graph(args.graph)
    t = compute_theta_classes(g)
    for v in median_set(g, t):
        sys.stdout.write(f"{int(v)}\n")
    return 0


def _cmd_ecc(args) -> int:
    g = load_graph(args.graph)
    w = load_weights(args.weights, g.n) if args.weights else zero_weights(g.n)
    ecc = morse(g, w)
    out = sys.stdout
    for v in range(g.n):
        out.write(f"{v} {int(ecc[v])}\n")
    if args.verify:
        expected = testkit.brute_ecc(g, w)
        bad = np.flatnonzero(ecc != expected)
        if bad.size:
            for v in bad[:5]:
                print(
                    f"mismatch: vertex {int(v)} got {int(ecc[v])} "
                    f"expected {int(expected[v])}",
                    file=sys.stderr,
                )
            print(f"verification FAILED on {bad.size} of {g.n} vertices",
                  file=sys.stderr)
            return 1
        print(f"verified {g.n} eccentricities against brute force", file=sys.stderr)
    return 0


def _cmd_oracle_build(args) -> int:
    g = load_graph(args.graph)
    table = build_oracle(g)
    save_labels(table, args.output)
    return 0


def _cmd_oracle_query(args) -> int:
    table = load_labels(args.labels)
    sys.stdout.write(f"{query(table, args.u, args.v)}\n")
    return 0


def _cmd_oracle_verify(args) -> int:
    g = load_graph(args.graph)
    table = load_labels(args.labels)
    if table.n != g.n:
        raise GraphError(
            f"label table is for n={table.n} but graph has n={g.n} vertices")
    n = g.n
    if n <= _ALL_PAIRS_VERIFY_CAP:
        pairs = None
        sources = np.arange(n, dtype=np.int64)
        checked = n * n
    else:
        rng = np.random.default_rng(args.seed)
        pairs = rng.integers(0, n, size=(args.samples, 2), dtype=np.int64)
        sources = None
        checked = args.samples
    bad = _check_pairs(g, table, sources, pairs)
    if bad:
        for u, v, got, want in bad[:5]:
            print(f"mismatch: d({u},{v}) got {got} expected {want}", file=sys.stderr)
        print(f"verification FAILED on {len(bad)} of {checked} pairs", file=sys.stderr)
        return 1
    print(f"verified {checked} pairs against BFS distances", file=sys.stderr)
    return 0


def _check_pairs(g, table, sources, pairs):
    """Mismatch list [(u, v, got, want)]; all pairs from `sources` rows, or
    the explicit `pairs` array grouped by source.  Reference distances come
    from the scipy BFS in testkit, which shares no code with the label
    construction."""
    bad = []
    if pairs is None:
        groups = [(int(u), None) for u in sources]
    else:
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        pairs = pairs[order]
        uniq, starts = np.unique(pairs[:, 0], return_index=True)
        bounds = np.append(starts, len(pairs))
        groups = [(int(u), pairs[bounds[i]:bounds[i + 1], 1])
                  for i, u in enumerate(uniq)]
    for lo in range(0, len(groups), 256):
        chunk = groups[lo:lo + 256]
        rows = testkit.distance_rows(g, [u for u, _ in chunk])
        for row, (u, targets) in zip(rows, chunk):
            vs = range(g.n) if targets is None else map(int, targets)
            for v in vs:
                got = query(table, u, v)
                if got != row[v]:
                    bad.append((u, v, got, int(row[v])))
    return bad


def _same_partition(a, b) -> bool:
    """Do two edge labelings induce the same partition of the edge set?"""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    pairs = np.unique(np.column_stack([a, b]), axis=0)
    return (len(np.unique(pairs[:, 0])) == len(pairs)
            and len(np.unique(pairs[:, 1])) == len(pairs))


def _cmd_verify(args) -> int:
    g = load_graph(args.graph)
    failures = 0

    def report(name, outcome, detail=""):
        line = f"{name:<24s}{outcome}"
        if detail:
            line += f"  {detail}"
        sys.stdout.write(line + "\n")

    try:
        t = compute_theta_classes(g)
    except NotMedianGraphError as exc:
        report("theta-partition", "FAIL", str(exc))
        return 1
    report("theta-partition", "OK", f"{t.q} classes")

    try:
        ref = testkit.djokovic_partition(g)
    except GraphError as exc:
        report("edge-relation", "SKIP", str(exc))
    else:
        if _same_partition(t.edge_class, ref):
            report("edge-relation", "OK")
        else:
            report("edge-relation", "FAIL", "partitions differ")
            failures += 1

    try:
        rep = testkit.verify_structure(g, t)
    except GraphError as exc:
        report("halfspace-structure", "SKIP", str(exc))
    else:
        if rep.ok:
            report("halfspace-structure", "OK")
        else:
            for v in rep.violations[:5]:
                report("halfspace-structure", "FAIL", v)
            failures += 1

    if testkit.is_median_graph(g):
        report("median-uniqueness", "OK")
    else:
        report("median-uniqueness", "FAIL", "triple with no unique median")
        failures += 1

    try:
        want = testkit.brute_median_set(g)
    except GraphError as exc:
        report("median-set", "SKIP", str(exc))
    else:
        got = median_set(g, t)
        if np.array_equal(got, want):
            report("median-set", "OK", f"{got.size} vertices")
        else:
            report("median-set", "FAIL", "majority-rule set != brute argmin")
            failures += 1

    return 1 if failures else 0


def _bench_graph(family, size, seed):
    if family == "grid":
        return testkit.grid([size, size])
    if family == "hypercube":
        return testkit.hypercube(size)
    if family == "tree":
        return testkit.random_tree(size, seed)
    if family == "path":
        return testkit.path_graph(size)
    if family == "closure":
        return testkit.median_closure(size, 4 * size, seed)
    raise GraphError(f"unknown bench family {family!r}")


def _warmup():
    """Touch every timed code path once so JIT compilation stays out of rows."""
    g = testkit.grid([2, 2])
    w = zero_weights(g.n)
    morse(g, w)
    try:
        testkit.brute_ecc(g, w)
    except GraphError:
        pass  # guard set below warmup size; rows will show NA anyway
    table = build_oracle(g)
    query(table, 0, g.n - 1)


def run_bench(family, sizes, seed=0, query_samples=_QUERY_SAMPLES):
    """CSV rows (header first) timing eccentricities and the oracle.

    One row per size; see _bench_graph for what "size" means per family.
    """
    rows = [_BENCH_HEADER]
    if not sizes:
        return rows
    _warmup()
    rng = np.random.default_rng(seed)
    for size in sizes:
        g = _bench_graph(family, size, seed)
        w = rng.integers(0, 10**6 + 1, size=g.n, dtype=np.int64)

        t0 = time.perf_counter()
        morse(g, w)
        t_morse_ms = (time.perf_counter() - t0) * 1e3

        try:
            t0 = time.perf_counter()
            testkit.brute_ecc(g, w)
            t_brute = f"{(time.perf_counter() - t0) * 1e3:.3f}"
        except GraphError:
            t_brute = "NA"

        t0 = time.perf_counter()
        table = build_oracle(g)
        t_build_ms = (time.perf_counter() - t0) * 1e3

        pairs = rng.integers(0, g.n, size=(query_samples, 2))
        t0 = time.perf_counter()
        for u, v in pairs:
            query(table, int(u), int(v))
        t_query_us = (time.perf_counter() - t0) / len(pairs) * 1e6

        max_bits, _ = label_size_bits(table)
        rows.append(
            f"{g.n},{g.m},{t_morse_ms:.3f},{t_brute},"
            f"{t_build_ms:.3f},{t_query_us:.3f},{max_bits}"
        )
    return rows


def _cmd_bench(args) -> int:
    if args.backend != "auto":
        _kernels.use_backend(args.backend)
    if args.sizes is None:
        sizes = list(_DEFAULT_SIZES[args.family])
    else:
        try:
            sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
        except ValueError:
            print(f"usage error: bad size list {args.sizes!r}", file=sys.stderr)
            return 2
    rows = run_bench(args.family, sizes, seed=args.seed)
    text = "\n".join(rows) + "\n"
    if args.output:
        with open(args.output, "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GraphError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
