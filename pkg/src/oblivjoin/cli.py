"""Command-line interface.

    oblivjoin join INPUT [--out PATH] [--trace none|log|hash]
    oblivjoin verify [--n1 N] [--n2 N] [--shapes CSV] [--instances K]
    oblivjoin bench [--sizes CSV] [--reps R] [--csv PATH]
    oblivjoin cost --n N

Exit codes: 0 success, 1 malformed input file, 2 I/O failure,
3 trace verification divergence.
"""

from __future__ import annotations

import argparse
import sys

from .trace import HashSink, LogSink, NullSink
from .pipeline import oblivious_join
from .tablefile import TableFileError, parse_table_file
from .harness import (InfeasibleShapeError, bench, bench_csv, cost_report,
                      gen_test_class, verify_trace_class)

_DEFAULT_SHAPES = "all-1x1,single-1xn,single-nx1,power-law,mixed,disjoint"


def _cmd_join(args) -> int:
    try:
        t1, t2 = parse_table_file(args.input)
    except TableFileError as exc:
        print(f"error: {args.input}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    sink = {"none": NullSink, "log": LogSink, "hash": HashSink}[args.trace]()
    res = oblivious_join(t1, t2, sink, engine=args.engine)
    payload = "".join(f"{d1} {d2}\n" for d1, d2 in res.rows())
    try:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(payload)
        else:
            sys.stdout.write(payload)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.trace == "hash":
        print(f"trace sha256: {sink.hexdigest()}", file=sys.stderr)
    elif args.trace == "log":
        for line in sink.lines():
            sys.stderr.write(line + "\n")
    print(f"n1={res.n1} n2={res.n2} m={res.m}", file=sys.stderr)
    return 0


def _cmd_verify(args) -> int:
    rc = 0
    for shape in (s.strip() for s in args.shapes.split(",") if s.strip()):
        try:
            tc = gen_test_class(args.n1, args.n2, shape, seed=args.seed,
                                instances=args.instances)
        except InfeasibleShapeError as exc:
            print(f"{shape}: infeasible ({exc})")
            continue
        verdict = verify_trace_class(tc, engine=args.engine)
        if verdict.passed:
            print(f"{shape}: OK n1={tc.n1} n2={tc.n2} m={tc.m} "
                  f"instances={len(tc.instances)} "
                  f"digest={verdict.digests[0]}")
        else:
            i, k = verdict.first_divergence
            print(f"{shape}: DIVERGENT n1={tc.n1} n2={tc.n2} m={tc.m} — "
                  f"instances {i} and {k} produced different traces")
            rc = 3
    return rc


def _cmd_bench(args) -> int:
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    rows = bench(sizes, reps=args.reps, engine=args.engine)
    text = bench_csv(rows)
    if args.csv:
        try:
            with open(args.csv, "w") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


def _cmd_cost(args) -> int:
    report = cost_report(args.n, engine=args.engine)
    for line in report.summary_lines():
        print(line)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="oblivjoin",
        description="Data-oblivious equi-join engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("join", help="join the two tables of a table file")
    p.add_argument("input", help="table file: T1 rows, ---, T2 rows")
    p.add_argument("--out", help="write result rows here (default stdout)")
    p.add_argument("--trace", choices=("none", "log", "hash"),
                   default="none",
                   help="emit the access trace (log) or its digest (hash) "
                        "on stderr")
    p.add_argument("--engine", choices=("vector", "scalar"),
                   default="vector")
    p.set_defaults(fn=_cmd_join)

    p = sub.add_parser("verify",
                       help="check trace equality across generated "
                            "instance classes")
    p.add_argument("--n1", type=int, default=64)
    p.add_argument("--n2", type=int, default=64)
    p.add_argument("--shapes", default=_DEFAULT_SHAPES)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--engine", choices=("vector", "scalar"),
                   default="vector")
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("bench",
                       help="time the join against the sort-merge baseline")
    p.add_argument("--sizes", default="1024,4096,16384")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--csv", help="write CSV here instead of stdout")
    p.add_argument("--engine", choices=("vector", "scalar"),
                   default="vector")
    p.set_defaults(fn=_cmd_bench)

    p = sub.add_parser("cost", help="per-phase cost breakdown of one join")
    p.add_argument("--n", type=int, required=True,
                   help="per-table size (n1 = n2 = m = n)")
    p.add_argument("--engine", choices=("vector", "scalar"),
                   default="vector")
    p.set_defaults(fn=_cmd_cost)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
