"""Normalized undirected graphs in CSR form, plus edge-list and assignment IO.

External vertex ids are arbitrary non-negative 64-bit integers.  Internally
vertices are dense int32 ids `0..n-1`, assigned in sorted order of the
external ids, so the minimum internal id of a component always corresponds
to the minimum external id.
"""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

MAX_VERTICES = np.iinfo(np.int32).max


def _as_int_array(a, dtype=np.int64):
    arr = np.asarray(a, dtype=dtype)
    if arr.ndim != 1:
        raise ValueError("expected a 1-d array of vertex ids")
    return arr


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph: no self loops, no duplicates, sorted rows."""

    n: int
    indptr: np.ndarray
    indices: np.ndarray
    ext_ids: np.ndarray | None = None

    def __post_init__(self):
        assert self.indptr.size == self.n + 1
        assert self.indptr[0] == 0 and self.indptr[-1] == self.indices.size
        self.indptr.flags.writeable = False
        self.indices.flags.writeable = False
        if self.ext_ids is not None:
            self.ext_ids.flags.writeable = False

    @property
    def m(self):
        """Undirected edge count."""
        return self.indices.size // 2

    @property
    def degrees(self):
        return np.diff(self.indptr)

    def neighbors(self, v):
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def edges(self):
        """Canonical (u, v) arrays with u < v, sorted lexicographically."""
        u = np.repeat(np.arange(self.n, dtype=np.int32), self.degrees)
        keep = u < self.indices
        return u[keep], self.indices[keep]

    def external(self):
        if self.ext_ids is None:
            return np.arange(self.n, dtype=np.int64)
        return self.ext_ids

    def validate(self):
        """Full invariant check, meant for tests rather than hot paths."""
        assert self.indices.size % 2 == 0
        assert np.all(np.diff(self.indptr) >= 0)
        if self.indices.size:
            assert 0 <= self.indices.min() and self.indices.max() < self.n
        deg = self.degrees
        for v in range(self.n):
            row = self.neighbors(v)
            assert np.all(np.diff(row) > 0), "rows must be strictly sorted"
            assert v not in row, "self loop"
        u, w = self.edges()
        back = from_edges(self.n, w.astype(np.int64), u.astype(np.int64))
        assert np.array_equal(back.indptr, self.indptr)
        assert np.array_equal(back.indices, self.indices)
        assert deg.sum() == 2 * self.m
        if self.ext_ids is not None:
            assert self.ext_ids.size == self.n
            assert np.all(np.diff(self.ext_ids) > 0)


def from_edges(n, u, v, ext_ids=None):
    """Build a normalized Graph on n vertices from (possibly messy) edges.

    Self loops are dropped, duplicates and orientation collapse to a single
    undirected edge, and adjacency rows come out sorted.
    """
    if n < 0 or n > MAX_VERTICES:
        raise ValueError(f"vertex count {n} out of range")
    u = _as_int_array(u)
    v = _as_int_array(v)
    if u.size != v.size:
        raise ValueError("endpoint arrays differ in length")
    if u.size:
        lo = min(u.min(), v.min())
        hi = max(u.max(), v.max())
        if lo < 0 or hi >= n:
            raise ValueError(f"vertex id out of range [0, {n})")
    keep = u != v
    a = np.minimum(u[keep], v[keep])
    b = np.maximum(u[keep], v[keep])
    del keep
    codes = np.unique(a * np.int64(n) + b)
    a = (codes // n).astype(np.int32)
    b = (codes % n).astype(np.int32)
    del codes
    src = np.concatenate([a, b])
    dst = np.concatenate([b, a])
    del a, b
    # int32 lexsort keeps the peak transient small at 10^8-edge scale
    order = np.lexsort((dst, src))
    indices = dst[order]
    del order
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
    return Graph(n=n, indptr=indptr, indices=indices, ext_ids=ext_ids)


def load_edge_list(path):
    """Read a SNAP-style whitespace edge list.

    Lines starting with '#' are comments.  Vertices are the distinct ids
    seen in the file; a self loop contributes its vertex but no edge.
    Returns (graph, id_table) where id_table[dense_id] = external id.
    """
    us = []
    vs = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'u v', got {s!r}")
            try:
                a = int(parts[0])
                b = int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: non-integer vertex id in {s!r}") from None
            if a < 0 or b < 0:
                raise ValueError(f"{path}:{lineno}: negative vertex id in {s!r}")
            us.append(a)
            vs.append(b)
    ext_u = np.array(us, dtype=np.int64)
    ext_v = np.array(vs, dtype=np.int64)
    table = np.unique(np.concatenate([ext_u, ext_v]))
    if table.size > MAX_VERTICES:
        raise ValueError("too many vertices for int32 internal ids")
    du = np.searchsorted(table, ext_u)
    dv = np.searchsorted(table, ext_v)
    g = from_edges(table.size, du, dv, ext_ids=table)
    return g, table


def write_edge_list(path, g):
    """Write canonical 'u v' lines (external ids, u < v, sorted).

    Isolated vertices are recorded as self loops so a round trip through
    load_edge_list reproduces the vertex set exactly.
    """
    ext = g.external()
    u, v = g.edges()
    with open(path, "w") as fh:
        fh.write(f"# undirected graph: {g.n} nodes, {g.m} edges\n")
        isolated = np.flatnonzero(g.degrees == 0)
        for w in isolated:
            fh.write(f"{ext[w]} {ext[w]}\n")
        for a, b in zip(ext[u], ext[v]):
            fh.write(f"{a} {b}\n")


@dataclass
class ComponentAssignment:
    """Maps each internal vertex to its component representative.

    The representative is the minimum internal id of the component, which
    by construction is also the vertex with the minimum external id.
    """

    labels: np.ndarray = field(default_factory=lambda: np.zeros(0, np.int32))

    @property
    def n(self):
        return self.labels.size

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.int32)

    @property
    def num_components(self):
        return np.unique(self.labels).size

    def check(self):
        assert np.array_equal(self.labels[self.labels], self.labels), "labels must be idempotent"
        assert np.all(self.labels <= np.arange(self.n)), "representative must be the class minimum"


def union_find_components(edges, n):
    """Streaming union-find over an edge stream; memory is O(n) plus a chunk.

    `edges` may be a pair of endpoint arrays, an iterable of such pairs,
    or an iterable of (u, v) integer tuples.
    """
    if n < 0 or n > MAX_VERTICES:
        raise ValueError(f"vertex count {n} out of range")
    parent = np.arange(n, dtype=np.int32)

    def feed(us, vs):
        us = _as_int_array(us)
        vs = _as_int_array(vs)
        if us.size != vs.size:
            raise ValueError("endpoint arrays differ in length")
        if us.size == 0:
            return
        if min(us.min(), vs.min()) < 0 or max(us.max(), vs.max()) >= n:
            raise ValueError(f"vertex id out of range [0, {n})")
        _kernels.uf_unite(parent, us.astype(np.int32), vs.astype(np.int32))

    if isinstance(edges, tuple) and len(edges) == 2 and not np.isscalar(edges[0]):
        feed(*edges)
    else:
        buf_u = []
        buf_v = []
        for item in edges:
            a, b = item
            if np.isscalar(a):
                buf_u.append(a)
                buf_v.append(b)
                if len(buf_u) >= 1 << 20:
                    feed(buf_u, buf_v)
                    buf_u, buf_v = [], []
            else:
                feed(a, b)
        if buf_u:
            feed(buf_u, buf_v)
    return ComponentAssignment(labels=_kernels.uf_roots(parent))


def graph_components(g):
    """Union-find oracle applied to a Graph."""
    return union_find_components(g.edges(), g.n)


def partition_equal(a, b):
    """True when two assignments induce the same partition of the vertices."""
    la = a.labels if isinstance(a, ComponentAssignment) else np.asarray(a)
    lb = b.labels if isinstance(b, ComponentAssignment) else np.asarray(b)
    if la.size != lb.size:
        return False
    if la.size == 0:
        return True
    pairs = la.astype(np.int64) * (lb.max() + 1) + lb
    return np.unique(la).size == np.unique(lb).size == np.unique(pairs).size


def write_assignment(path, assignment, ext_ids=None):
    """TSV of 'external_id<TAB>component_representative', sorted by id."""
    ext = ext_ids if ext_ids is not None else np.arange(assignment.n, dtype=np.int64)
    with open(path, "w") as fh:
        for v in range(assignment.n):
            fh.write(f"{ext[v]}\t{ext[assignment.labels[v]]}\n")


def read_assignment(path):
    """Inverse of write_assignment: (external ids, representative ids)."""
    ids = []
    reps = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            parts = s.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'id<TAB>rep', got {s!r}")
            ids.append(int(parts[0]))
            reps.append(int(parts[1]))
    return np.array(ids, dtype=np.int64), np.array(reps, dtype=np.int64)
