"""Connected components under a metered parallel-computation cost model.

Contraction algorithms (two-hop local contraction with an optional
merge-to-large step, tree contraction via pointer jumping or a key-value
store) next to flooding baselines (hash-min, hash-to-min, cracker), all
emitting exact component assignments plus round and message ledgers, with
seeded graph generators and an experiment CLI on top.
"""

from ._kernels import BACKEND, mix64
from .algorithms import (AlgoConfig, AlgorithmAbort, RunResult,
                         finalize_small_graph, functional_wcc_dht,
                         functional_wcc_pointer_jumping,
                         local_contraction_labels, merge_to_large_labels,
                         run_cracker, run_hash_min, run_hash_to_min,
                         run_local_contraction, run_tree_contraction,
                         tree_functional_graph)
from .bench import (ALGORITHM_IDS, ExperimentSpec, edge_decay_report,
                    run_algorithm, run_experiment, verify)
from .contraction import (ContractionOutcome, PhaseLedgerEntry, PriorityMap,
                          compose_mappings, contract_by_labels, prune_isolated,
                          sample_priorities, subset_priorities)
from .generators import (GenSpec, diameter, eccentricity_lower_bound, generate,
                         parse_gen_spec)
from .graph import (ComponentAssignment, Graph, from_edges, graph_components,
                    load_edge_list, partition_equal, read_assignment,
                    union_find_components, write_assignment, write_edge_list)
from .mpc import (BudgetExceededError, CostModel, DhtHandle,
                  DhtVisibilityError, MpcError, RoundLedger, advance_round,
                  charge_pass)

__version__ = "0.1.0"

__all__ = [
    "AlgoConfig", "AlgorithmAbort", "ALGORITHM_IDS", "BACKEND",
    "BudgetExceededError", "ComponentAssignment", "ContractionOutcome",
    "CostModel", "DhtHandle", "DhtVisibilityError", "ExperimentSpec",
    "GenSpec", "Graph", "MpcError", "PhaseLedgerEntry", "PriorityMap",
    "RoundLedger", "RunResult", "advance_round", "charge_pass",
    "compose_mappings", "contract_by_labels", "diameter",
    "eccentricity_lower_bound", "edge_decay_report", "finalize_small_graph",
    "from_edges", "functional_wcc_dht", "functional_wcc_pointer_jumping",
    "generate", "graph_components", "load_edge_list",
    "local_contraction_labels", "merge_to_large_labels", "mix64",
    "parse_gen_spec", "partition_equal", "prune_isolated", "read_assignment",
    "run_algorithm", "run_cracker", "run_experiment", "run_hash_min",
    "run_hash_to_min", "run_local_contraction", "run_tree_contraction",
    "sample_priorities", "subset_priorities", "tree_functional_graph",
    "union_find_components", "verify", "write_assignment", "write_edge_list",
]
