"""argparse front end: simulate / verify / oracle.

Reproducibility contract: trial i of `simulate` draws from RngStream(seed, i)
no matter how many worker threads run, and records are written in trial
order, so identical flags give identical output.  The elapsed_us field is
wall time and is the one field excluded from that byte-for-byte guarantee;
strip it to get the canonical record.  `verify` output contains no timing
and is canonical as-is.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .edge_reveal import fast_walk, run_erp
from .forest import height, tree_sizes
from .graph import sample_gnp
from .kingman import run_kingman
from .oracle import GNP_LIMIT, distribution_to_json_text, exact_cnp_distribution
from .rngdist import CapacityError, RngStream
from .stats import report_to_json
from .suites import SUITE_NAMES, run_suite
from .urrf import sample_kingman_forest_structure

__all__ = ["main", "build_parser", "simulate_records", "CSV_COLUMNS", "SIMULATION_METHODS"]

CSV_COLUMNS = ("trial", "n", "p", "method", "tree_count", "height", "sizes", "elapsed_us")
SIMULATION_METHODS = ("direct", "erp", "walk", "urrt-coupling")


def _run_trial(method: str, n: int, p: float, trial: int, seed: int) -> dict:
    stream = RngStream(seed, trial)
    t0 = time.perf_counter()
    if method == "direct":
        run = run_kingman(sample_gnp(n, p, stream), stream)
        tree_count = run.tree_count
        h: int | None = height(run.final_forest)
        sizes = tree_sizes(run.final_forest)
    elif method == "erp":
        state, _ = run_erp(n, p, stream)
        tree_count = state.root_count
        f = state.forest
        h = height(f)
        sizes = tree_sizes(f)
    elif method == "walk":
        tree_count = fast_walk(n, p, stream).tree_count
        h = None
        sizes = ()
    elif method == "urrt-coupling":
        tree_count = fast_walk(n, p, stream).tree_count
        f = sample_kingman_forest_structure(n, tree_count, stream)
        h = height(f)
        sizes = tree_sizes(f)
    else:
        raise ValueError(f"unknown method {method!r}")
    elapsed_us = int((time.perf_counter() - t0) * 1e6)
    return {
        "trial": trial,
        "n": n,
        "p": p,
        "method": method,
        "tree_count": tree_count,
        "height": h,
        "sizes": list(sizes),
        "elapsed_us": elapsed_us,
    }


def simulate_records(method: str, n: int, p: float, trials: int, seed: int, threads: int = 1) -> list[dict]:
    """All trial records, in trial order regardless of scheduling."""
    if threads <= 1 or trials <= 1:
        return [_run_trial(method, n, p, t, seed) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        records = list(pool.map(lambda t: _run_trial(method, n, p, t, seed), range(trials)))
    records.sort(key=lambda r: r["trial"])
    return records


def _write_records(records: list[dict], fmt: str, out) -> None:
    if fmt == "jsonl":
        for rec in records:
            out.write(json.dumps(rec, sort_keys=True, separators=(",", ":")) + "\n")
        return
    out.write(",".join(CSV_COLUMNS) + "\n")
    for rec in records:
        row = dict(rec)
        row["height"] = "" if rec["height"] is None else str(rec["height"])
        row["sizes"] = ";".join(str(s) for s in rec["sizes"])
        out.write(",".join(str(row[c]) for c in CSV_COLUMNS) + "\n")


def _resolve_threads(parser: argparse.ArgumentParser, args: argparse.Namespace) -> int:
    if args.threads is not None:
        threads = args.threads
    else:
        raw = os.environ.get("KINGMAN_THREADS", "1")
        try:
            threads = int(raw)
        except ValueError:
            parser.error(f"KINGMAN_THREADS must be an integer, got {raw!r}")
    if threads < 1:
        parser.error(f"threads must be >= 1, got {threads}")
    return threads


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kingman",
        description="Coalescent tree counts on random graphs: simulators, exact oracle, verification suites.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run independent trials of one simulation method")
    sim.add_argument("--method", choices=SIMULATION_METHODS, required=True)
    sim.add_argument("--n", type=int, required=True, help="number of vertices")
    sim.add_argument("--p", type=float, required=True, help="edge probability")
    sim.add_argument("--trials", type=int, default=1)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--threads", type=int, default=None, help="worker threads (default KINGMAN_THREADS or 1)")
    sim.add_argument("--format", choices=("jsonl", "csv"), default="jsonl")
    sim.add_argument("--output", default=None, help="output path (default stdout)")

    ver = sub.add_parser("verify", help="run a named verification suite")
    ver.add_argument("suite", choices=SUITE_NAMES)
    ver.add_argument("--n", type=int, default=None)
    ver.add_argument("--p", type=float, default=None)
    ver.add_argument("--trials", type=int, default=None)
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--threads", type=int, default=None)
    ver.add_argument("--output", default=None)

    orc = sub.add_parser("oracle", help="print the exact tree-count law of G(n,p)")
    orc.add_argument("--n", type=int, required=True)
    orc.add_argument("--p", type=float, required=True)
    return parser


def _validate_common(parser, n, p, trials) -> None:
    if n is not None and n < 1:
        parser.error(f"n must be >= 1, got {n}")
    if p is not None and not 0.0 <= p <= 1.0:
        parser.error(f"p must lie in [0,1], got {p}")
    if trials is not None and trials < 1:
        parser.error(f"trials must be >= 1, got {trials}")


def _cmd_simulate(parser, args) -> int:
    _validate_common(parser, args.n, args.p, args.trials)
    if args.method in ("walk", "urrt-coupling") and not 0.0 < args.p < 1.0:
        parser.error(f"method {args.method} needs 0 < p < 1, got {args.p}")
    threads = _resolve_threads(parser, args)
    if args.seed < 0:
        parser.error("seed must be a nonnegative 64-bit integer")
    records = simulate_records(args.method, args.n, args.p, args.trials, args.seed, threads)
    if args.output is None:
        _write_records(records, args.format, sys.stdout)
    else:
        with open(args.output, "w") as out:
            _write_records(records, args.format, out)
    return 0


def _cmd_verify(parser, args) -> int:
    _validate_common(parser, args.n, args.p, args.trials)
    _resolve_threads(parser, args)
    result = run_suite(args.suite, n=args.n, p=args.p, trials=args.trials, seed=args.seed)
    lines = [json.dumps(report_to_json(r), sort_keys=True, separators=(",", ":")) for r in result.reports]
    lines += [json.dumps(row, sort_keys=True, separators=(",", ":")) for row in result.data]
    text = "\n".join(lines) + "\n"
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as out:
            out.write(text)
    return 0 if (result.passed or result.advisory) else 1


def _cmd_oracle(parser, args) -> int:
    _validate_common(parser, args.n, args.p, None)
    if args.n > GNP_LIMIT:
        print(f"oracle capacity is n <= {GNP_LIMIT}, got n = {args.n}", file=sys.stderr)
        return 1
    print(distribution_to_json_text(exact_cnp_distribution(args.n, args.p)))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "simulate":
            return _cmd_simulate(parser, args)
        if args.command == "verify":
            return _cmd_verify(parser, args)
        return _cmd_oracle(parser, args)
    except (CapacityError, ValueError, KeyError) as exc:
        print(f"kingman: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
