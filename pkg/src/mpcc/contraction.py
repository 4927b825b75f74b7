"""Per-phase priorities and the merge-by-label contraction step.

A priority sample assigns every vertex a 64-bit hash; vertices are compared
by (hash, id), so the order is total.  The hash of vertex v in a phase is
the splitmix64 finalizer applied to base + (v+1)*gamma, where base depends
only on (global seed, phase index).  Adding (v+1)*gamma is injective modulo
2^64 and the finalizer is a bijection, so hashes never collide within a
phase; the id tie-break exists only as a guarantee of last resort.

Kernels never see raw hashes.  They see `rank`, the position of each vertex
in the (hash, id) order, which compares identically and keeps every hot
loop on int64 values with room for sentinels.

A LabelMap is an int32 array giving each vertex a target vertex id; merging
collapses equal labels to one node.  New node ids are the dense renumbering
of the sorted distinct labels.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from ._kernels import GAMMA, INT64_MAX, mix64
from .graph import Graph, ComponentAssignment, from_edges

_PHASE_SALT = np.uint64(0xD1B54A32D192ED03)


@dataclass(frozen=True)
class PriorityMap:
    """One phase's vertex priorities; smaller rank = smaller (hash, id)."""

    hashes: np.ndarray
    rank: np.ndarray
    order: np.ndarray
    seed: int = -1
    phase: int = -1

    @property
    def n(self):
        return self.hashes.size

    @classmethod
    def from_hashes(cls, hashes, seed=-1, phase=-1):
        hashes = np.asarray(hashes, dtype=np.uint64)
        order = np.argsort(hashes, kind="stable").astype(np.int32)
        rank = np.empty(hashes.size, dtype=np.int64)
        rank[order] = np.arange(hashes.size, dtype=np.int64)
        return cls(hashes=hashes, rank=rank, order=order, seed=seed, phase=phase)


def sample_priorities(global_seed, phase_index, n):
    """Counter-based hash sample: reproducible, collision-free per phase."""
    if n < 0:
        raise ValueError("n must be non-negative")
    salted = (global_seed ^ (phase_index * int(_PHASE_SALT))) & 0xFFFFFFFFFFFFFFFF
    base = mix64(np.uint64(salted))
    with np.errstate(over="ignore"):
        counters = np.arange(1, n + 1, dtype=np.uint64) * GAMMA + base
    return PriorityMap.from_hashes(mix64(counters), seed=global_seed, phase=phase_index)


@dataclass
class PhaseLedgerEntry:
    phase_index: int
    nodes_in: int
    edges_in: int
    rounds_used: int = 0
    messages_sent: int = 0
    dht_puts: int = 0
    dht_gets: int = 0


@dataclass
class ContractionOutcome:
    """Result of merging a graph by a label map.

    cluster_size counts merged vertices of the input graph; cluster_weight
    counts original vertices (phase-0 units) and equals cluster_size when
    no weights are supplied.  When `topk` is requested the outcome carries,
    per node, up to topk of the largest priority ranks found among the
    merged vertices, descending (`topk_vals` flattened by `topk_offsets`).
    """

    graph: Graph
    mapping: np.ndarray
    cluster_size: np.ndarray
    cluster_weight: np.ndarray
    topk: int = 0
    topk_vals: np.ndarray | None = None
    topk_offsets: np.ndarray | None = None


def _ragged_prefix_take(starts, take):
    # Index array selecting the first take[j] items of each segment.
    total = int(take.sum())
    if total == 0:
        return np.zeros(0, dtype=np.int64)
    nz = take > 0
    s = starts[nz]
    t = take[nz]
    idx = np.ones(total, dtype=np.int64)
    idx[0] = s[0]
    cum = np.cumsum(t)
    idx[cum[:-1]] = s[1:] - s[:-1] - t[:-1] + 1
    return np.cumsum(idx)


def contract_by_labels(g, labels, weights=None, rank=None, topk=0):
    """Merge vertices with equal labels into one node.

    Labels must be vertex ids; vertices in different components never share
    a label under any algorithm here, so components are preserved.  Edges
    are relabeled, self loops dropped and duplicates collapsed.
    """
    labels = np.asarray(labels)
    if labels.size != g.n:
        raise ValueError("label map size must match vertex count")
    if labels.size and (labels.min() < 0 or labels.max() >= g.n):
        raise ValueError("labels must be vertex ids")
    uniq = np.unique(labels)
    mapping = np.searchsorted(uniq, labels).astype(np.int32)
    n_new = uniq.size
    eu, ev = g.edges()
    contracted = from_edges(n_new, mapping[eu].astype(np.int64), mapping[ev].astype(np.int64))
    cluster_size = np.bincount(mapping, minlength=n_new).astype(np.int64)
    out = ContractionOutcome(graph=contracted, mapping=mapping,
                             cluster_size=cluster_size, cluster_weight=cluster_size)
    if weights is not None or topk:
        if topk and rank is None:
            raise ValueError("topk summaries need the phase priority ranks")
        key = rank if topk else np.zeros(g.n, dtype=np.int64)
        perm = np.lexsort((-key, mapping))
        starts = np.zeros(n_new + 1, dtype=np.int64)
        np.cumsum(cluster_size, out=starts[1:])
        if weights is not None:
            w = np.asarray(weights, dtype=np.int64)[perm]
            out.cluster_weight = np.add.reduceat(
                np.concatenate([w, [0]]), starts[:-1])[:n_new] if w.size else cluster_size * 0
            out.cluster_weight = out.cluster_weight.astype(np.int64)
        if topk:
            take = np.minimum(cluster_size, topk)
            sel = _ragged_prefix_take(starts[:-1], take)
            out.topk = topk
            out.topk_vals = key[perm][sel]
            offs = np.zeros(n_new + 1, dtype=np.int64)
            np.cumsum(take, out=offs[1:])
            out.topk_offsets = offs
    return out


@dataclass
class PruneResult:
    graph: Graph
    old_to_new: np.ndarray
    finalized: np.ndarray


def prune_isolated(g):
    """Split off degree-0 nodes; they are finished component roots."""
    deg = g.degrees
    keep = np.flatnonzero(deg > 0)
    finalized = np.flatnonzero(deg == 0).astype(np.int32)
    if finalized.size == 0:
        return PruneResult(graph=g, old_to_new=np.arange(g.n, dtype=np.int32),
                           finalized=finalized)
    old_to_new = np.full(g.n, -1, dtype=np.int32)
    old_to_new[keep] = np.arange(keep.size, dtype=np.int32)
    new_indptr = np.zeros(keep.size + 1, dtype=np.int64)
    np.cumsum(deg[keep], out=new_indptr[1:])
    sub = Graph(n=keep.size, indptr=new_indptr,
                indices=old_to_new[g.indices].astype(np.int32))
    return PruneResult(graph=sub, old_to_new=old_to_new, finalized=finalized)


def compose_mappings(chain, n_final, final_labels=None):
    """Fold per-phase mappings into a full component assignment.

    chain[i] maps phase-i node ids to phase-(i+1) node ids; a negative
    entry -c-1 means the node exited at phase i as finished root c of the
    contracted graph.  final_labels assigns roots to the nodes still alive
    after the last phase (identity when omitted).
    """
    if final_labels is None:
        comp = np.arange(n_final, dtype=np.int64)
    else:
        comp = np.asarray(final_labels, dtype=np.int64).copy()
    width = np.int64(max(n_final, max((c.size for c in chain), default=0)) + 1)
    comp += width * np.int64(len(chain))
    for i in range(len(chain) - 1, -1, -1):
        step = chain[i]
        if comp.size:
            tokens = comp[np.where(step >= 0, step, 0)]
        else:
            tokens = np.zeros(step.size, dtype=np.int64)
        exited = step < 0
        if exited.any():
            tokens[exited] = width * np.int64(i) + (-step[exited].astype(np.int64) - 1)
        comp = tokens
    n0 = comp.size
    uniq, inv = np.unique(comp, return_inverse=True)
    rep = np.full(uniq.size, n0, dtype=np.int64)
    np.minimum.at(rep, inv, np.arange(n0, dtype=np.int64))
    return ComponentAssignment(labels=rep[inv].astype(np.int32))


def subset_priorities(prio, keep):
    """Priority map restricted to the kept vertices (for reuse mode)."""
    return PriorityMap.from_hashes(prio.hashes[keep], seed=prio.seed, phase=prio.phase)
