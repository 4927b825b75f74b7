"""Experiment harness: algorithm x graph x seed matrices with CSV output.

The stats CSV has one row per (seed, phase) plus one summary row per
experiment.  Columns: algorithm, n0, m0, seed, phase, nodes_in, edges_in,
rounds, messages, dht_puts, dht_gets.  The phase column doubles as a row
kind: ordinary rows carry the phase index, a run that aborted appends a
row with phase="failed" carrying its totals, and the summary row uses
phase="summary" with nodes_in = median phase count and the remaining
numeric columns = medians of the per-run totals.  Output is deterministic
for identical specs: rows are ordered by (algorithm, seed, phase).
"""

import csv
import dataclasses
import statistics
from dataclasses import dataclass, field

import numpy as np

from .algorithms import (AlgoConfig, AlgorithmAbort, run_cracker, run_hash_min,
                         run_hash_to_min, run_local_contraction,
                         run_tree_contraction)
from .generators import GenSpec, generate, parse_gen_spec
from .graph import (ComponentAssignment, graph_components, load_edge_list,
                    partition_equal)
from .mpc import CostModel

CSV_COLUMNS = ["algorithm", "n0", "m0", "seed", "phase", "nodes_in",
               "edges_in", "rounds", "messages", "dht_puts", "dht_gets"]

ALGORITHM_IDS = ("local", "local+mtl", "tree-pj", "tree-dht",
                 "hashmin", "hash2min", "cracker")


def run_algorithm(algo, g, cfg=None, cost=None, priority_source=None):
    """Dispatch on the CLI algorithm id; 'local+mtl' forces the merge step on."""
    cfg = cfg or AlgoConfig()
    if algo == "local":
        cfg = dataclasses.replace(cfg, merge_to_large_enabled=False)
        return run_local_contraction(g, cfg, cost, priority_source=priority_source)
    if algo == "local+mtl":
        cfg = dataclasses.replace(cfg, merge_to_large_enabled=True)
        return run_local_contraction(g, cfg, cost, priority_source=priority_source)
    if algo == "tree-pj":
        return run_tree_contraction(g, cfg, cost, variant="pj",
                                    priority_source=priority_source)
    if algo == "tree-dht":
        return run_tree_contraction(g, cfg, cost, variant="dht",
                                    priority_source=priority_source)
    if algo == "cracker":
        return run_cracker(g, cfg, cost, priority_source=priority_source)
    if algo == "hashmin":
        return run_hash_min(g, cfg, cost)
    if algo == "hash2min":
        return run_hash_to_min(g, cfg, cost)
    raise ValueError(f"unknown algorithm {algo!r}")


@dataclass
class ExperimentSpec:
    algorithm: str
    seeds: list
    gen: GenSpec | None = None
    input_path: str | None = None
    stats_csv: str | None = None
    assignment_out: str | None = None
    strict_space: bool = False
    machines: int = 64
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.algorithm not in ALGORITHM_IDS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if not self.seeds:
            raise ValueError("need at least one seed")
        if (self.gen is None) == (self.input_path is None):
            raise ValueError("exactly one of gen / input_path required")


def parse_experiment_spec(obj):
    gen = obj.get("gen")
    return ExperimentSpec(
        algorithm=obj["algorithm"], seeds=list(obj["seeds"]),
        gen=parse_gen_spec(gen) if gen is not None else None,
        input_path=obj.get("input"), stats_csv=obj.get("stats_csv"),
        assignment_out=obj.get("assignment_out"),
        strict_space=bool(obj.get("strict_space", False)),
        machines=int(obj.get("machines", 64)),
        config=dict(obj.get("config", {})))


@dataclass
class ExperimentOutcome:
    spec: ExperimentSpec
    results: list
    rows: list
    failed: bool


def _phase_rows(algo, result, seed):
    rows = []
    for e in result.phases:
        rows.append({"algorithm": algo, "n0": result.n0, "m0": result.m0,
                     "seed": seed, "phase": e.phase_index,
                     "nodes_in": e.nodes_in, "edges_in": e.edges_in,
                     "rounds": e.rounds_used, "messages": e.messages_sent,
                     "dht_puts": e.dht_puts, "dht_gets": e.dht_gets})
    return rows


def _totals_row(algo, result, seed, kind):
    led = result.ledger
    return {"algorithm": algo, "n0": result.n0, "m0": result.m0,
            "seed": seed, "phase": kind, "nodes_in": result.phase_count,
            "edges_in": "", "rounds": led.rounds,
            "messages": led.total_records,
            "dht_puts": led.totals("dht_put"), "dht_gets": led.totals("dht_chase")}


def _median(values):
    med = statistics.median(values)
    return int(med) if float(med).is_integer() else med


def _graph_for_seed(spec, seed, cache):
    if spec.input_path is not None:
        if "loaded" not in cache:
            cache["loaded"] = load_edge_list(spec.input_path)
        return cache["loaded"][0]
    # random families get the run seed; deterministic ones ignore it
    return generate(dataclasses.replace(spec.gen, seed=seed))


def run_experiment(spec):
    """One algorithm over one graph family and a seed list.

    Returns an ExperimentOutcome; partial ledgers of aborted runs are kept
    and flagged.  Writes the stats CSV and the first seed's assignment TSV
    when the spec names paths.
    """
    seeds = sorted(spec.seeds)
    cache = {}
    results = []
    rows = []
    failed = False
    for seed in seeds:
        g = _graph_for_seed(spec, seed, cache)
        cfg = AlgoConfig(global_seed=seed, **spec.config)
        cost = CostModel(machines=spec.machines, strict=spec.strict_space)
        try:
            res = run_algorithm(spec.algorithm, g, cfg, cost)
            ok = True
        except AlgorithmAbort as abort:
            res = abort.result
            ok = False
            failed = True
        results.append((seed, res, ok))
        rows.extend(_phase_rows(spec.algorithm, res, seed))
        if not ok:
            rows.append(_totals_row(spec.algorithm, res, seed, "failed"))
    done = [r for _, r, ok in results if ok]
    if done:
        rows.append({
            "algorithm": spec.algorithm, "n0": done[0].n0, "m0": done[0].m0,
            "seed": "median", "phase": "summary",
            "nodes_in": _median([r.phase_count for r in done]),
            "edges_in": "",
            "rounds": _median([r.ledger.rounds for r in done]),
            "messages": _median([r.ledger.total_records for r in done]),
            "dht_puts": _median([r.ledger.totals("dht_put") for r in done]),
            "dht_gets": _median([r.ledger.totals("dht_chase") for r in done])})
    if spec.stats_csv:
        write_stats_csv(spec.stats_csv, rows)
    if spec.assignment_out and done:
        from .graph import write_assignment
        first = done[0]
        ext = None
        if spec.input_path is not None:
            ext = cache["loaded"][1]
        write_assignment(spec.assignment_out, first.assignment, ext_ids=ext)
    return ExperimentOutcome(spec=spec, results=results, rows=rows, failed=failed)


def write_stats_csv(path, rows):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow(row)


@dataclass
class VerifyReport:
    ok: bool
    witnesses: list
    message: str


def _canonical(labels):
    labels = np.asarray(labels)
    _, inv = np.unique(labels, return_inverse=True)
    rep = np.full(inv.max() + 1 if inv.size else 0, np.iinfo(np.int64).max,
                  dtype=np.int64)
    np.minimum.at(rep, inv, np.arange(labels.size, dtype=np.int64))
    return rep[inv]


def verify(result, g):
    """Compare a run's partition against the union-find oracle."""
    if result.assignment is None:
        return VerifyReport(False, [], "run did not converge")
    return verify_assignment_labels(result.assignment.labels, g)


def verify_assignment_labels(labels, g):
    """Same check for a bare label array (CLI verify path)."""
    oracle = graph_components(g)
    labels = np.asarray(labels)
    if labels.size != g.n:
        return VerifyReport(False, [],
                            f"assignment covers {labels.size} vertices, graph has {g.n}")
    if partition_equal(labels, oracle.labels):
        return VerifyReport(True, [], "partition matches the oracle")
    ca, cb = _canonical(labels), _canonical(oracle.labels)
    bad = np.flatnonzero(ca != cb)
    wit = [(int(v), int(ca[v]), int(cb[v])) for v in bad[:10]]
    return VerifyReport(False, wit,
                        f"partition differs from the oracle on {bad.size} vertices")


def edge_decay_report(result):
    """Ratios edges_i / edges_{i+1} between consecutive phases."""
    edges = [e.edges_in for e in result.phases]
    return [edges[i] / edges[i + 1]
            for i in range(len(edges) - 1) if edges[i + 1] > 0]
