"""Connected-components algorithms over the metered substrate.

Five families share the same outer shape (label, merge, prune, repeat):

* local contraction: label every vertex with the smallest-priority vertex
  of its two-hop ball, optionally followed by a merge-to-large step that
  pulls whole clusters onto heavy neighbours;
* tree contraction: point every vertex at its smallest-priority neighbour
  and collapse the weakly connected components of that functional graph,
  resolved either by pointer jumping or by chasing pointers through the
  key-value store;
* label flooding (hash-min) and cluster gossip (hash-to-min), which never
  contract and serve as baselines;
* the rewiring scheme (cracker), which stars each neighbourhood around its
  local minimum before labelling.

Every run produces a ComponentAssignment whose representative is the
minimum vertex id of the component, a per-phase ledger, and a round ledger.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from ._kernels import INT64_MAX
from .contraction import (PhaseLedgerEntry, PriorityMap, compose_mappings,
                          contract_by_labels, prune_isolated, sample_priorities)
from .graph import ComponentAssignment, Graph, from_edges, graph_components
from .mpc import CostModel, RoundLedger, DhtHandle, advance_round, charge_pass


class AlgorithmAbort(Exception):
    """Raised when a run exceeds its phase or message budget.

    Carries the partial result (assignment is None) for ledger inspection.
    """

    def __init__(self, reason, result=None):
        super().__init__(reason)
        self.reason = reason
        self.result = result


@dataclass
class AlgoConfig:
    global_seed: int = 0
    finalize_threshold: int = 1_000_000
    merge_to_large_enabled: bool = False
    alpha0: int | None = None
    alpha_growth: float = 2.0
    max_phases: int | None = None
    reuse_priorities: bool = False
    message_cap_factor: int = 64

    def __post_init__(self):
        if self.finalize_threshold < 0:
            raise ValueError("finalize_threshold must be non-negative")
        if self.alpha0 is not None and self.alpha0 < 2:
            raise ValueError("alpha0 must be at least 2")
        if self.max_phases is not None and self.max_phases < 1:
            raise ValueError("max_phases must be at least 1")

    def phase_cap(self, n):
        if self.max_phases is not None:
            return self.max_phases
        return 4 * math.ceil(math.log2(max(n, 2))) + 16

    def flood_cap(self, n):
        # flooding legitimately runs for up to diameter+1 <= n+1 rounds
        if self.max_phases is not None:
            return self.max_phases
        return n + 2

    def initial_alpha(self, n):
        if self.alpha0 is not None:
            return max(2, self.alpha0)
        return max(2, math.ceil(4.0 * math.log(max(n, 2))))

    def message_cap(self, g):
        return self.message_cap_factor * max(g.m, g.n, 1)


@dataclass
class RunResult:
    algorithm: str
    n0: int
    m0: int
    seed: int
    assignment: ComponentAssignment | None
    phases: list
    ledger: RoundLedger
    converged: bool = True
    phase_count: int = 0
    finalized_early: int = 0


class _PhaseMeter:
    """Captures the ledger delta spanned by one phase."""

    def __init__(self, ledger):
        self.ledger = ledger
        self.mark = len(ledger.entries)
        self.round0 = ledger.rounds

    def close(self, phase_index, nodes_in, edges_in):
        new = self.ledger.entries[self.mark:]
        return PhaseLedgerEntry(
            phase_index=phase_index, nodes_in=nodes_in, edges_in=edges_in,
            rounds_used=self.ledger.rounds - self.round0,
            messages_sent=sum(e.records for e in new),
            dht_puts=sum(e.dht_puts for e in new),
            dht_gets=sum(e.dht_gets for e in new))


def _pair_labels(a, b, rank):
    # Smaller-priority member of each stable pair.
    return np.where(rank[a] <= rank[b], a, b).astype(np.int32)


def local_contraction_labels(g, rho):
    """Label each vertex with the min-priority vertex of its two-hop ball.

    Two neighbourhood-min rounds: the second pass minimises over the first
    pass's results, which covers N(N(v)) with v included throughout.
    """
    m1 = _kernels.neighbor_min(g.indptr, g.indices, rho.rank, True)
    l2 = _kernels.neighbor_min(g.indptr, g.indices, m1, True)
    return rho.order[l2]


def merge_to_large_labels(outcome, rho_prev, alpha):
    """Send every node to the best heavy node within two hops, if any.

    A node is large when it holds at least alpha original vertices.  Its
    priority is the alpha-th largest previous-phase hash among the nodes
    merged into it (the smallest recorded one when fewer were merged);
    every node, large ones included, picks the maximum-priority large node
    in its closed two-hop ball, ties to the smaller id.  Priorities come
    from the top-k summaries carried by the outcome when they are deep
    enough, otherwise from rho_prev directly.
    """
    if alpha < 2:
        raise ValueError("alpha must be at least 2")
    g = outcome.graph
    n = g.n
    ident = np.arange(n, dtype=np.int32)
    large = outcome.cluster_weight >= alpha
    if not large.any():
        return ident
    if outcome.topk_vals is not None and outcome.topk >= alpha:
        offs = outcome.topk_offsets
        counts = np.diff(offs)
        prio = outcome.topk_vals[offs[:-1] + np.minimum(counts, alpha) - 1]
    elif rho_prev is not None:
        perm = np.lexsort((-rho_prev.rank, outcome.mapping))
        starts = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(outcome.cluster_size, out=starts[1:])
        take = np.minimum(outcome.cluster_size, alpha)
        prio = rho_prev.rank[perm][starts[:-1] + take - 1]
    else:
        raise ValueError("need either topk summaries or the previous priorities")
    large_ids = np.flatnonzero(large).astype(np.int32)
    best_first = large_ids[np.lexsort((large_ids, -prio[large]))]
    key = np.full(n, INT64_MAX, dtype=np.int64)
    key[best_first] = np.arange(best_first.size, dtype=np.int64)
    b1 = _kernels.neighbor_min(g.indptr, g.indices, key, True)
    b2 = _kernels.neighbor_min(g.indptr, g.indices, b1, True)
    labels = ident.copy()
    found = b2 < INT64_MAX
    labels[found] = best_first[b2[found]]
    return labels


def tree_functional_graph(g, rho):
    """f(v) = the min-priority neighbour of v, excluding v itself.

    Requires minimum degree 1; prune isolated vertices first.
    """
    fkey = _kernels.neighbor_min(g.indptr, g.indices, rho.rank, False)
    if fkey.size and fkey.max() == INT64_MAX:
        raise ValueError("functional graph needs minimum degree 1")
    return rho.order[fkey]


def functional_wcc_pointer_jumping(f, rank):
    """Labels of the weak components of f by repeated pointer squaring.

    Returns (labels, iterations); iteration count includes the squaring
    that detects stability.
    """
    if f.size == 0:
        return np.zeros(0, dtype=np.int32), 0
    g = f.copy()
    iters = 0
    while True:
        g2 = g[g]
        iters += 1
        if np.array_equal(g2, g):
            break
        g = g2
    return _pair_labels(g, f[g], rank), iters


def functional_wcc_dht(f, rank, dht=None):
    """Same labels as pointer jumping, but each vertex chases its pointer
    through the key-value store until the trajectory repeats at distance 2.

    Returns (labels, chase_lengths, dht).
    """
    n = f.size
    if dht is None:
        dht = DhtHandle()
    if n == 0:
        return np.zeros(0, dtype=np.int32), np.zeros(0, dtype=np.int32), dht
    dht.put_batch(np.arange(n), f)
    advance_round(dht)

    def step(keys):
        return np.array(dht.get_batch(keys), dtype=np.int32)

    idx = np.arange(n, dtype=np.int64)
    x0 = idx.astype(np.int32)
    x1 = step(x0)
    x2 = step(x1)
    d = np.full(n, -1, dtype=np.int32)
    a = np.zeros(n, dtype=np.int32)
    b = np.zeros(n, dtype=np.int32)
    k = 0
    while idx.size:
        done = x2 == x0
        if done.any():
            sel = idx[done]
            d[sel] = k
            a[sel] = x0[done]
            b[sel] = x1[done]
            keep = ~done
            idx, x0, x1, x2 = idx[keep], x0[keep], x1[keep], x2[keep]
            if idx.size == 0:
                break
        if k > n:
            raise RuntimeError("pointer chase failed to stabilize within n steps")
        x0, x1 = x1, x2
        x2 = step(x2)
        k += 1
    return _pair_labels(a, b, rank), d, dht


class _ContractionDriver:
    """Shared outer loop: prune, label, contract, compose, finalize."""

    def __init__(self, g, cfg, cost, algorithm):
        self.cfg = cfg
        self.algorithm = algorithm
        self.ledger = RoundLedger(cost=cost or CostModel(), n0=g.n, m0=g.m)
        self.chain = []
        self.phase_rows = []
        self.n0 = g.n
        self.m0 = g.m
        self.finalized_early = 0
        self.weights = None
        self.hashes = None
        if cfg.merge_to_large_enabled:
            self.weights = np.ones(g.n, dtype=np.int64)
        if cfg.reuse_priorities:
            self.hashes = sample_priorities(cfg.global_seed, 0, g.n).hashes.copy()
        self.g = self._prune(g)

    def _prune(self, g):
        pr = prune_isolated(g)
        if pr.finalized.size:
            step = pr.old_to_new.copy()
            exited = step < 0
            step[exited] = -np.arange(g.n, dtype=np.int32)[exited] - 1
            self.chain.append(step)
            self.finalized_early += pr.finalized.size
            if self.weights is not None:
                self.weights = self.weights[pr.old_to_new >= 0]
            if self.hashes is not None:
                self.hashes = self.hashes[pr.old_to_new >= 0]
        return pr.graph

    def priorities(self, phase_index, source=None):
        if source is not None:
            return source(phase_index, self.g.n)
        if self.cfg.reuse_priorities:
            return PriorityMap.from_hashes(self.hashes, seed=self.cfg.global_seed, phase=0)
        return sample_priorities(self.cfg.global_seed, phase_index, self.g.n)

    def contract_and_prune(self, labels, rho=None, topk=0):
        """One contraction (records charged by the caller) then a prune.

        Returns the pre-prune outcome; the driver state moves to the pruned
        graph and the composed phase step is appended to the chain.
        """
        g = self.g
        outcome = contract_by_labels(
            g, labels, weights=self.weights,
            rank=None if rho is None else rho.rank, topk=topk)
        step = outcome.mapping
        nxt = outcome.graph
        weights = outcome.cluster_weight if self.weights is not None else None
        return outcome, step, nxt, weights

    def push_phase(self, step, nxt, weights):
        pr = prune_isolated(nxt)
        mapped = pr.old_to_new[step]
        composed = np.where(mapped >= 0, mapped, -step - 1).astype(np.int32)
        self.chain.append(composed)
        if pr.finalized.size:
            self.finalized_early += pr.finalized.size
        if self.weights is not None:
            self.weights = weights[pr.old_to_new >= 0]
        if self.hashes is not None:
            acc = np.full(step.max() + 1 if step.size else 0,
                          np.uint64(0xFFFFFFFFFFFFFFFF), dtype=np.uint64)
            np.minimum.at(acc, step, self.hashes)
            self.hashes = acc[pr.old_to_new >= 0]
        self.g = pr.graph

    def finish(self, final_labels=None):
        asn = compose_mappings(self.chain, self.g.n, final_labels)
        return RunResult(
            algorithm=self.algorithm, n0=self.n0, m0=self.m0,
            seed=self.cfg.global_seed, assignment=asn, phases=self.phase_rows,
            ledger=self.ledger, converged=True,
            phase_count=len(self.phase_rows),
            finalized_early=self.finalized_early)

    def abort(self, reason):
        partial = RunResult(
            algorithm=self.algorithm, n0=self.n0, m0=self.m0,
            seed=self.cfg.global_seed, assignment=None, phases=self.phase_rows,
            ledger=self.ledger, converged=False,
            phase_count=len(self.phase_rows),
            finalized_early=self.finalized_early)
        raise AlgorithmAbort(reason, partial)

    def maybe_finalize(self):
        """Ship the leftover graph to one machine once it is small enough."""
        if 0 < self.g.m <= self.cfg.finalize_threshold:
            labels = finalize_small_graph(self.g, self.cfg.finalize_threshold,
                                          ledger=self.ledger).labels
            return self.finish(final_labels=labels)
        return None


def finalize_small_graph(g, threshold, ledger=None):
    """Solve the remainder with sequential union-find on one machine."""
    if g.m > threshold:
        raise ValueError(f"graph has {g.m} edges, above the finalize threshold {threshold}")
    if ledger is not None:
        charge_pass(ledger, g.m, "finalize", rounds=1)
    return graph_components(g)


def _run_contracting(g, cfg, cost, algorithm, phase_labels, topk_for_phase=None,
                     priority_source=None, post_label_hook=None):
    drv = _ContractionDriver(g, cfg, cost, algorithm)
    cap = cfg.phase_cap(g.n)
    phase = 0
    while drv.g.m > 0:
        done = drv.maybe_finalize()
        if done is not None:
            return done
        if phase >= cap:
            drv.abort(f"phase cap {cap} exceeded")
        meter = _PhaseMeter(drv.ledger)
        nodes_in, edges_in = drv.g.n, drv.g.m
        rho = drv.priorities(phase, priority_source)
        topk = topk_for_phase(phase) if topk_for_phase else 0
        labels = phase_labels(drv, drv.g, rho, phase)
        outcome, step, nxt, weights = drv.contract_and_prune(labels, rho=rho, topk=topk)
        charge_pass(drv.ledger, edges_in, "contract",
                    rounds=drv.ledger.cost.rounds_contract_pass)
        if post_label_hook is not None:
            step, nxt, weights = post_label_hook(drv, outcome, step, nxt, weights, edges_in)
        drv.push_phase(step, nxt, weights)
        drv.phase_rows.append(meter.close(phase, nodes_in, edges_in))
        phase += 1
    return drv.finish()


def run_local_contraction(g, cfg=None, cost=None, priority_source=None):
    """Two-hop minimum labelling, optionally with the merge-to-large step."""
    cfg = cfg or AlgoConfig()
    algorithm = "local+mtl" if cfg.merge_to_large_enabled else "local"
    state = {"alpha": cfg.initial_alpha(g.n)}

    def beta():
        return max(2, math.ceil(state["alpha"] / 4))

    def labels_fn(drv, cur, rho, phase):
        charge_pass(drv.ledger, cur.m, "label",
                    rounds=drv.ledger.cost.rounds_label_pass)
        return local_contraction_labels(cur, rho)

    topk_fn = (lambda phase: beta()) if cfg.merge_to_large_enabled else None

    def mtl_hook(drv, outcome, step, nxt, weights, edges_in):
        if not cfg.merge_to_large_enabled or nxt.m == 0:
            return step, nxt, weights
        charge_pass(drv.ledger, nxt.m, "merge",
                    rounds=drv.ledger.cost.rounds_merge_pass)
        labels2 = merge_to_large_labels(outcome, None, beta())
        out2 = contract_by_labels(nxt, labels2, weights=weights)
        charge_pass(drv.ledger, nxt.m, "contract",
                    rounds=drv.ledger.cost.rounds_contract_pass)
        # Squaring schedule, capped by the cube-root validity window.
        guard = max(2, math.ceil(edges_in ** (1.0 / 3.0)))
        state["alpha"] = max(2, min(int(state["alpha"] ** cfg.alpha_growth), guard))
        w2 = out2.cluster_weight if weights is not None else None
        return out2.mapping[step], out2.graph, w2

    return _run_contracting(g, cfg, cost, algorithm, labels_fn,
                            topk_for_phase=topk_fn,
                            priority_source=priority_source,
                            post_label_hook=mtl_hook)


def run_tree_contraction(g, cfg=None, cost=None, variant="pj", priority_source=None):
    """Collapse weak components of the min-neighbour functional graph.

    variant "pj" resolves components by pointer squaring, "dht" by chasing
    pointers through the key-value store one hop per lookup.
    """
    if variant not in ("pj", "dht"):
        raise ValueError(f"unknown variant {variant!r}")
    cfg = cfg or AlgoConfig()

    def labels_fn(drv, cur, rho, phase):
        charge_pass(drv.ledger, cur.m, "functional", rounds=1)
        f = tree_functional_graph(cur, rho)
        if variant == "pj":
            labels, iters = functional_wcc_pointer_jumping(f, rho.rank)
            charge_pass(drv.ledger, cur.n * iters, "jump", rounds=max(iters, 1))
        else:
            labels, d, dht = functional_wcc_dht(f, rho.rank)
            charge_pass(drv.ledger, cur.n, "dht_put", rounds=1, dht_puts=dht.puts)
            charge_pass(drv.ledger, dht.gets, "dht_chase", rounds=1, dht_gets=dht.gets)
        counts = np.bincount(labels, minlength=cur.n)
        sizes = counts[labels]
        assert sizes.min() >= 2, "every functional cluster joins at least two vertices"
        return labels

    return _run_contracting(g, cfg, cost, f"tree-{variant}", labels_fn,
                            priority_source=priority_source)


def run_cracker(g, cfg=None, cost=None, priority_source=None):
    """Star every neighbourhood around its local minimum, then label by the
    minimum over the rewired neighbourhood and merge equal labels."""
    cfg = cfg or AlgoConfig()

    def labels_fn(drv, cur, rho, phase):
        wkey = _kernels.neighbor_min(cur.indptr, cur.indices, rho.rank, True)
        w = rho.order[wkey]
        charge_pass(drv.ledger, cur.m, "rewire_min", rounds=1)
        src = np.concatenate([np.repeat(w, cur.degrees), w]).astype(np.int64)
        dst = np.concatenate([cur.indices, np.arange(cur.n, dtype=np.int32)]).astype(np.int64)
        charge_pass(drv.ledger, src.size, "rewire_emit", rounds=1)
        rw = from_edges(cur.n, src, dst)
        lkey = _kernels.neighbor_min(rw.indptr, rw.indices, rho.rank, True)
        charge_pass(drv.ledger, rw.m, "label", rounds=1)
        return rho.order[lkey]

    return _run_contracting(g, cfg, cost, "cracker", labels_fn,
                            priority_source=priority_source)


def run_hash_min(g, cfg=None, cost=None):
    """Flood minimum labels along edges until nothing improves.

    Only vertices whose label changed send in the next round, which leaves
    the label trajectory identical to the dense schedule.
    """
    cfg = cfg or AlgoConfig()
    ledger = RoundLedger(cost=cost or CostModel(), n0=g.n, m0=g.m)
    cap = cfg.flood_cap(g.n)
    labels = np.arange(g.n, dtype=np.int64)
    frontier = np.arange(g.n, dtype=np.int64)
    rows = []
    rounds = 0
    while frontier.size:
        counts = (g.indptr[frontier + 1] - g.indptr[frontier])
        gathered = _kernels.gather_rows_np(g.indptr, g.indices, frontier, counts)
        if gathered.size == 0:
            break
        candidates = np.unique(gathered).astype(np.int64)
        new = _kernels.rows_neighbor_min(g.indptr, g.indices, labels, candidates, True)
        improved = new < labels[candidates]
        if not improved.any():
            break
        if rounds >= cap:
            raise AlgorithmAbort(
                f"round cap {cap} exceeded",
                RunResult("hashmin", g.n, g.m, cfg.global_seed, None, rows,
                          ledger, converged=False, phase_count=rounds))
        meter = _PhaseMeter(ledger)
        charge_pass(ledger, int(gathered.size), "hashmin", rounds=1)
        labels[candidates[improved]] = new[improved]
        frontier = candidates[improved]
        rows.append(meter.close(rounds, g.n, g.m))
        rounds += 1
    asn = ComponentAssignment(labels=labels.astype(np.int32))
    return RunResult("hashmin", g.n, g.m, cfg.global_seed, asn, rows, ledger,
                     converged=True, phase_count=rounds)


def run_hash_to_min(g, cfg=None, cost=None):
    """Cluster gossip: send C(v) to the minimum of C(v) and the minimum to
    everyone in C(v); stop at the first round that changes nothing.

    Priorities are the static external-id order.  The reported phase count
    excludes the confirming round except when it is the only round.
    """
    cfg = cfg or AlgoConfig()
    ledger = RoundLedger(cost=cost or CostModel(), n0=g.n, m0=g.m)
    cap_rounds = cfg.flood_cap(g.n)
    cap_records = cfg.message_cap(g)
    n = g.n
    ident = np.arange(n, dtype=np.int64)
    eu, ev = g.edges()
    codes = np.unique(np.concatenate([
        ident * n + ident,
        eu.astype(np.int64) * n + ev,
        ev.astype(np.int64) * n + eu])) if n else np.zeros(0, np.int64)
    rows = []
    executed = 0
    while True:
        own = codes // n if n else codes
        mem = codes % n if n else codes
        first = np.ones(own.size, dtype=bool)
        first[1:] = own[1:] != own[:-1]
        mv = np.empty(n, dtype=np.int64)
        mv[own[first]] = mem[first]
        if n == 0:
            break
        messages = 2 * codes.size
        if messages > cap_records:
            raise AlgorithmAbort(
                f"round would send {messages} records, cap {cap_records}",
                RunResult("hash2min", g.n, g.m, cfg.global_seed, None, rows,
                          ledger, converged=False, phase_count=executed))
        if executed >= cap_rounds:
            raise AlgorithmAbort(
                f"round cap {cap_rounds} exceeded",
                RunResult("hash2min", g.n, g.m, cfg.global_seed, None, rows,
                          ledger, converged=False, phase_count=executed))
        meter = _PhaseMeter(ledger)
        to_min = mv[own]
        dest = np.concatenate([to_min, mem])
        charge_pass(ledger, messages, "hash2min", rounds=1,
                    dest=dest, combinable=False)
        new_codes = np.unique(np.concatenate([
            to_min * n + mem,
            mem * n + to_min,
            ident * n + ident]))
        rows.append(meter.close(executed, g.n, g.m))
        executed += 1
        if new_codes.size == codes.size and np.array_equal(new_codes, codes):
            break
        codes = new_codes
    reported = max(1, executed - 1) if executed else 0
    labels = mv.astype(np.int32) if n else np.zeros(0, np.int32)
    asn = ComponentAssignment(labels=labels)
    return RunResult("hash2min", g.n, g.m, cfg.global_seed, asn, rows, ledger,
                     converged=True, phase_count=reported)
