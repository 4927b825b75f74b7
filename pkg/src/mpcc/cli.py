"""Command-line interface.

    mpcc gen --family path --n 1000 --out graph.txt
    mpcc run --algo local --gen-spec '{"family":"gnp","n":1000,"p":0.01}' \
             --seed 1 --stats-csv stats.csv --assignment-out labels.tsv
    mpcc bench --spec-file experiments.json
    mpcc verify --input graph.txt --assignment labels.tsv

Exit codes: 0 ok, 1 verification failure, 2 abort or budget violation,
3 usage error.
"""

import argparse
import json
import sys

import numpy as np

from .algorithms import AlgoConfig, AlgorithmAbort
from .bench import (ALGORITHM_IDS, parse_experiment_spec, run_algorithm,
                    run_experiment, verify_assignment_labels, write_stats_csv,
                    _phase_rows, _totals_row)
from .generators import generate, parse_gen_spec
from .graph import (load_edge_list, read_assignment, write_assignment,
                    write_edge_list)
from .mpc import CostModel, MpcError


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(3)


def _build_parser():
    top = _Parser(prog="mpcc",
                  description="connected components algorithm bench")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = sub.add_parser("gen", help="generate a graph and write an edge list")
    gen.add_argument("--family", required=True)
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--p", type=float, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)

    run = sub.add_parser("run", help="run one algorithm on one graph")
    run.add_argument("--algo", required=True, choices=ALGORITHM_IDS)
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="edge list path")
    src.add_argument("--gen-spec", help="inline GenSpec JSON")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--stats-csv")
    run.add_argument("--assignment-out")
    run.add_argument("--strict-space", action="store_true")
    run.add_argument("--machines", type=int, default=64)
    run.add_argument("--finalize-threshold", type=int, default=None)
    run.add_argument("--max-phases", type=int, default=None)

    bench = sub.add_parser("bench", help="run an experiment matrix from JSON")
    bench.add_argument("--spec-file", required=True)

    ver = sub.add_parser("verify", help="check an assignment against the oracle")
    ver.add_argument("--input", required=True)
    ver.add_argument("--assignment", required=True)
    return top


def _cmd_gen(args):
    spec = {"family": args.family, "n": args.n, "seed": args.seed}
    if args.p is not None:
        spec["p"] = args.p
    try:
        g = generate(parse_gen_spec(spec))
    except ValueError as err:
        print(f"mpcc gen: {err}", file=sys.stderr)
        return 3
    write_edge_list(args.out, g)
    print(f"wrote {args.out}: n={g.n} m={g.m}")
    return 0


def _cmd_run(args):
    ext = None
    try:
        if args.input is not None:
            g, ext = load_edge_list(args.input)
        else:
            g = generate(parse_gen_spec(json.loads(args.gen_spec)))
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"mpcc run: {err}", file=sys.stderr)
        return 3
    kwargs = {"global_seed": args.seed}
    if args.finalize_threshold is not None:
        kwargs["finalize_threshold"] = args.finalize_threshold
    if args.max_phases is not None:
        kwargs["max_phases"] = args.max_phases
    cfg = AlgoConfig(**kwargs)
    cost = CostModel(machines=args.machines, strict=args.strict_space)
    code = 0
    try:
        result = run_algorithm(args.algo, g, cfg, cost)
    except AlgorithmAbort as abort:
        print(f"mpcc run: aborted: {abort.reason}", file=sys.stderr)
        result = abort.result
        code = 2
    except MpcError as err:
        print(f"mpcc run: {err}", file=sys.stderr)
        return 2
    rows = _phase_rows(args.algo, result, args.seed)
    if code:
        rows.append(_totals_row(args.algo, result, args.seed, "failed"))
    if args.stats_csv:
        write_stats_csv(args.stats_csv, rows)
    if code == 0:
        asn = result.assignment
        if args.assignment_out:
            write_assignment(args.assignment_out, asn, ext_ids=ext)
        print(f"{args.algo}: n={g.n} m={g.m} components={asn.num_components} "
              f"phases={result.phase_count} rounds={result.ledger.rounds} "
              f"records={result.ledger.total_records}")
    return code


def _cmd_bench(args):
    try:
        with open(args.spec_file) as fh:
            raw = json.load(fh)
        specs = [parse_experiment_spec(item) for item in raw]
    except (ValueError, OSError, KeyError, json.JSONDecodeError) as err:
        print(f"mpcc bench: {err}", file=sys.stderr)
        return 3
    code = 0
    for spec in specs:
        try:
            outcome = run_experiment(spec)
        except MpcError as err:
            print(f"{spec.algorithm}: {err}", file=sys.stderr)
            code = 2
            continue
        status = "FAILED" if outcome.failed else "ok"
        summary = outcome.rows[-1] if outcome.rows else {}
        print(f"{spec.algorithm}: seeds={len(spec.seeds)} {status} "
              f"median_phases={summary.get('nodes_in', '-')}")
        if outcome.failed:
            code = 2
    return code


def _cmd_verify(args):
    try:
        g, table = load_edge_list(args.input)
        ids, reps = read_assignment(args.assignment)
    except (ValueError, OSError) as err:
        print(f"mpcc verify: {err}", file=sys.stderr)
        return 3
    pos = np.searchsorted(table, ids)
    if (pos >= table.size).any() or (table[np.minimum(pos, table.size - 1)] != ids).any():
        print("mpcc verify: assignment names vertices absent from the graph",
              file=sys.stderr)
        return 1
    rpos = np.searchsorted(table, reps)
    if (rpos >= table.size).any() or (table[np.minimum(rpos, table.size - 1)] != reps).any():
        print("mpcc verify: representatives absent from the graph", file=sys.stderr)
        return 1
    labels = np.full(g.n, -1, dtype=np.int64)
    labels[pos] = rpos
    if (labels < 0).any():
        print("mpcc verify: assignment does not cover every vertex", file=sys.stderr)
        return 1
    report = verify_assignment_labels(labels, g)
    print(report.message)
    for v, got, want in report.witnesses:
        print(f"  vertex {table[v]}: got group of {table[got]}, "
              f"expected group of {table[want]}")
    return 0 if report.ok else 1


def main(argv=None):
    args = _build_parser().parse_args(argv)
    if args.command == "gen":
        return _cmd_gen(args)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "bench":
        return _cmd_bench(args)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
