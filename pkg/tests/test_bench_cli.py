"""Experiment harness rows, verification reports, and the CLI surface."""

import json

import numpy as np
import pytest

from mpcc import PhaseLedgerEntry, RunResult, from_edges
from mpcc.bench import (ALGORITHM_IDS, edge_decay_report, parse_experiment_spec,
                        run_experiment, run_algorithm, verify,
                        verify_assignment_labels)
from mpcc.cli import main
from mpcc.generators import GenSpec, generate
from mpcc.mpc import RoundLedger

from conftest import bfs_components


def _experiment(td, algo="local", seeds=(0, 1, 2), config=None, gen=None):
    return parse_experiment_spec({
        "algorithm": algo,
        "seeds": list(seeds),
        "gen": gen or {"family": "gnp", "n": 80, "p": 0.04},
        "stats_csv": str(td / "stats.csv"),
        "assignment_out": str(td / "assignment.tsv"),
        "config": config or {"finalize_threshold": 0},
    })


def test_run_experiment_row_layout(tmp_path):
    out = run_experiment(_experiment(tmp_path))
    assert not out.failed
    phases = [r for r in out.rows if isinstance(r["phase"], int)]
    summaries = [r for r in out.rows if r["phase"] == "summary"]
    assert len(summaries) == 1
    assert len(phases) == sum(r.phase_count for _, r, _ in out.results)
    # phase rows arrive grouped by seed in ascending order
    seen = [r["seed"] for r in phases]
    assert seen == sorted(seen)
    s = summaries[0]
    assert s["seed"] == "median"
    assert s["nodes_in"] == sorted(r.phase_count for _, r, _ in out.results)[1]
    assert (tmp_path / "stats.csv").exists()
    assert (tmp_path / "assignment.tsv").exists()


def test_run_experiment_csv_deterministic(tmp_path):
    run_experiment(_experiment(tmp_path))
    first = (tmp_path / "stats.csv").read_bytes()
    run_experiment(_experiment(tmp_path))
    assert (tmp_path / "stats.csv").read_bytes() == first


def test_run_experiment_failed_rows(tmp_path):
    spec = _experiment(tmp_path, algo="hash2min", seeds=(0,),
                       gen={"family": "path", "n": 64}, config={})
    out = run_experiment(spec)
    assert out.failed
    kinds = [r["phase"] for r in out.rows]
    assert "failed" in kinds and "summary" not in kinds
    failed = next(r for r in out.rows if r["phase"] == "failed")
    assert failed["messages"] > 0
    # no assignment to write for a fully failed experiment
    assert not (tmp_path / "assignment.tsv").exists()


def test_run_experiment_results_match_oracle(tmp_path):
    for algo in ALGORITHM_IDS:
        config = {"finalize_threshold": 0, "message_cap_factor": 4096}
        out = run_experiment(_experiment(tmp_path, algo=algo, config=config))
        for seed, res, ok in out.results:
            assert ok, (algo, seed)
            g = generate(GenSpec("gnp", 80, p=0.04, seed=seed))
            assert verify(res, g).ok, (algo, seed)


def test_verify_reports_bounded_witnesses():
    g = generate(GenSpec("path", 200))
    labels = np.arange(200, dtype=np.int32)  # everything split apart
    rep = verify_assignment_labels(labels, g)
    assert not rep.ok
    assert len(rep.witnesses) == 10
    assert "199" in rep.message
    good = verify_assignment_labels(np.zeros(200, dtype=np.int32), g)
    assert good.ok and good.witnesses == []


def test_verify_rejects_wrong_size_and_unconverged():
    g = generate(GenSpec("path", 5))
    assert not verify_assignment_labels(np.zeros(4, np.int32), g).ok
    res = RunResult("local", 5, 4, 0, None, [], RoundLedger(), converged=False)
    assert not verify(res, g).ok


def test_edge_decay_report():
    phases = [PhaseLedgerEntry(i, n, e, 4, 0, 0, 0)
              for i, (n, e) in enumerate([(600, 1000), (80, 100), (9, 10)])]
    res = RunResult("local", 600, 1000, 0, None, phases, RoundLedger())
    assert edge_decay_report(res) == [10.0, 10.0]
    assert edge_decay_report(
        RunResult("local", 5, 4, 0, None, phases[:1], RoundLedger())) == []


def test_run_algorithm_rejects_unknown_id():
    g = generate(GenSpec("path", 4))
    with pytest.raises(ValueError):
        run_algorithm("bogus", g)


def test_experiment_spec_validation(tmp_path):
    with pytest.raises(ValueError):
        parse_experiment_spec({"algorithm": "local", "seeds": []})
    with pytest.raises(ValueError):
        parse_experiment_spec({"algorithm": "local", "seeds": [0]})
    with pytest.raises(ValueError):
        parse_experiment_spec({"algorithm": "local", "seeds": [0],
                               "gen": {"family": "path", "n": 3},
                               "input": "x.txt"})


# --------------------------------------------------------------------- CLI

def test_cli_round_trip(tmp_path):
    edges = tmp_path / "g.txt"
    tsv = tmp_path / "a.tsv"
    stats = tmp_path / "s.csv"
    assert main(["gen", "--family", "cycle", "--n", "30",
                 "--out", str(edges)]) == 0
    assert main(["run", "--algo", "local", "--input", str(edges),
                 "--seed", "7", "--finalize-threshold", "0",
                 "--assignment-out", str(tsv), "--stats-csv", str(stats)]) == 0
    assert main(["verify", "--input", str(edges), "--assignment", str(tsv)]) == 0
    assert stats.read_text().startswith("algorithm,")


def test_cli_verify_failure_is_exit_one(tmp_path):
    edges = tmp_path / "g.txt"
    tsv = tmp_path / "a.tsv"
    main(["gen", "--family", "path", "--n", "10", "--out", str(edges)])
    lines = ["{}\t{}".format(v, v) for v in range(10)]  # all singletons
    tsv.write_text("\n".join(lines) + "\n")
    assert main(["verify", "--input", str(edges), "--assignment", str(tsv)]) == 1


def test_cli_abort_is_exit_two():
    rc = main(["run", "--algo", "hash2min",
               "--gen-spec", json.dumps({"family": "path", "n": 64})])
    assert rc == 2


def test_cli_usage_errors_exit_three(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["run", "--algo", "nope", "--gen-spec", "{}"])
    assert info.value.code == 3
    with pytest.raises(SystemExit) as info:
        main(["run", "--algo", "local"])  # no input source
    assert info.value.code == 3
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 3


def test_cli_bench_spec_file(tmp_path):
    specs = [
        {"algorithm": "local", "seeds": [0, 1],
         "gen": {"family": "gnp", "n": 50, "p": 0.06},
         "stats_csv": str(tmp_path / "local.csv"),
         "config": {"finalize_threshold": 0}},
        {"algorithm": "hashmin", "seeds": [0],
         "gen": {"family": "star", "n": 50},
         "stats_csv": str(tmp_path / "hm.csv")},
    ]
    spec_file = tmp_path / "bench.json"
    spec_file.write_text(json.dumps(specs))
    assert main(["bench", "--spec-file", str(spec_file)]) == 0
    assert (tmp_path / "local.csv").exists()
    assert (tmp_path / "hm.csv").exists()


def test_cli_gen_matches_library(tmp_path):
    out = tmp_path / "g.txt"
    main(["gen", "--family", "gnp", "--n", "40", "--p", "0.1",
          "--seed", "3", "--out", str(out)])
    from mpcc.graph import load_edge_list
    g, _ = load_edge_list(out)
    want = generate(GenSpec("gnp", 40, p=0.1, seed=3))
    assert np.array_equal(g.indptr, want.indptr)
    assert np.array_equal(g.indices, want.indices)
