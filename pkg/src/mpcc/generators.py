"""Seeded constructors for the graph families the experiments use.

Everything is deterministic in (family parameters, seed) and returns a
normalized Graph.  The random family gnp samples present pairs directly by
geometric skipping, so sparse graphs cost O(n + m) rather than O(n^2);
gnp_plus unions a gnp sample with a fixed edge list, which by construction
only ever adds edges on top of the random draw.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph, from_edges


@dataclass
class GenSpec:
    family: str
    n: int
    p: float | None = None
    seed: int = 0
    extra_edges: list | None = None
    parts: list | None = None


def parse_gen_spec(obj):
    """Build a GenSpec from a plain dict (CLI JSON); parts recurse."""
    if isinstance(obj, GenSpec):
        return obj
    known = {"family", "n", "p", "seed", "extra_edges", "parts"}
    unknown = set(obj) - known
    if unknown:
        raise ValueError(f"unknown GenSpec fields: {sorted(unknown)}")
    if "family" not in obj:
        raise ValueError("GenSpec needs a family")
    parts = obj.get("parts")
    if parts is not None:
        parts = [parse_gen_spec(s) for s in parts]
    return GenSpec(family=obj["family"], n=int(obj.get("n", 0)),
                   p=obj.get("p"), seed=int(obj.get("seed", 0)),
                   extra_edges=obj.get("extra_edges"), parts=parts)


def _decode_triu(t, n):
    """Map linear indices over the i<j upper triangle to (i, j) pairs."""
    t = t.astype(np.int64)
    # off(i) = number of pairs with first coordinate < i
    off = lambda i: i * (2 * n - i - 1) // 2
    guess = n - 0.5 - np.sqrt((n - 0.5) ** 2 - 2.0 * t)
    i = np.clip(np.floor(guess).astype(np.int64), 0, max(n - 2, 0))
    for _ in range(64):
        lo = t < off(i)
        hi = t >= off(i + 1)
        if not (lo.any() or hi.any()):
            break
        i = i - lo + hi
    else:
        raise AssertionError("triangular decode failed to converge")
    j = t - off(i) + i + 1
    return i, j


def _gnp_pair_indices(n, p, rng):
    total = n * (n - 1) // 2
    if total == 0 or p <= 0.0:
        return np.zeros(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(total, dtype=np.int64)
    logq = math.log1p(-p)
    chunks = []
    cur = np.int64(-1)
    while True:
        est = max(int((total - int(cur)) * p * 1.15) + 16, 1024)
        u = 1.0 - rng.random(est)
        gaps = np.floor(np.log(u) / logq).astype(np.int64) + 1
        pos = cur + np.cumsum(gaps)
        inside = pos < total
        chunks.append(pos[inside])
        if not inside.all():
            break
        cur = pos[-1]
    return np.concatenate(chunks) if len(chunks) > 1 else chunks[0]


def _gnp(n, p, seed):
    if p is None or not (0.0 <= p <= 1.0):
        raise ValueError(f"gnp needs p in [0, 1], got {p!r}")
    rng = np.random.default_rng(seed)
    t = _gnp_pair_indices(n, p, rng)
    u, v = _decode_triu(t, n)
    del t
    return from_edges(n, u.astype(np.int32), v.astype(np.int32))


def _edge_array(pairs):
    arr = np.asarray(pairs, dtype=np.int64)
    if arr.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("extra_edges must be a list of (u, v) pairs")
    return arr[:, 0], arr[:, 1]


def _path(n):
    if n <= 1:
        return from_edges(n, np.zeros(0, np.int64), np.zeros(0, np.int64))
    u = np.arange(n - 1, dtype=np.int64)
    return from_edges(n, u, u + 1)


def generate(spec):
    spec = parse_gen_spec(spec) if isinstance(spec, dict) else spec
    fam, n = spec.family, spec.n
    if n < 0:
        raise ValueError("n must be non-negative")
    if fam == "gnp":
        return _gnp(n, spec.p, spec.seed)
    if fam == "gnp_plus":
        base = _gnp(n, spec.p, spec.seed)
        eu, ev = base.edges()
        xu, xv = _edge_array(spec.extra_edges or [])
        return from_edges(n, np.concatenate([eu.astype(np.int64), xu]),
                          np.concatenate([ev.astype(np.int64), xv]))
    if fam == "path":
        return _path(n)
    if fam == "cycle":
        if n <= 2:
            return _path(n)
        u = np.arange(n, dtype=np.int64)
        return from_edges(n, u, (u + 1) % n)
    if fam == "star":
        # hub is vertex 0
        if n <= 1:
            return from_edges(n, np.zeros(0, np.int64), np.zeros(0, np.int64))
        v = np.arange(1, n, dtype=np.int64)
        return from_edges(n, np.zeros(n - 1, np.int64), v)
    if fam == "complete":
        i, j = np.triu_indices(n, 1)
        return from_edges(n, i.astype(np.int64), j.astype(np.int64))
    if fam == "binary_tree":
        if n <= 1:
            return from_edges(n, np.zeros(0, np.int64), np.zeros(0, np.int64))
        c = np.arange(1, n, dtype=np.int64)
        return from_edges(n, (c - 1) // 2, c)
    if fam == "caterpillar":
        # path spine of n//2, remaining vertices hang off random spine nodes
        if n <= 1:
            return from_edges(n, np.zeros(0, np.int64), np.zeros(0, np.int64))
        spine = max(1, n // 2)
        su = np.arange(spine - 1, dtype=np.int64)
        rng = np.random.default_rng(spec.seed)
        legs = np.arange(spine, n, dtype=np.int64)
        anchors = rng.integers(0, spine, size=legs.size, dtype=np.int64)
        return from_edges(n, np.concatenate([su, anchors]),
                          np.concatenate([su + 1, legs]))
    if fam == "disjoint_union":
        if not spec.parts:
            raise ValueError("disjoint_union needs parts")
        us, vs = [], []
        offset = 0
        for sub in spec.parts:
            g = generate(sub)
            eu, ev = g.edges()
            us.append(eu.astype(np.int64) + offset)
            vs.append(ev.astype(np.int64) + offset)
            offset += g.n
        return from_edges(offset, np.concatenate(us) if us else np.zeros(0, np.int64),
                          np.concatenate(vs) if vs else np.zeros(0, np.int64))
    raise ValueError(f"unknown family {fam!r}")


def diameter(g):
    """Exact diameter by BFS from every vertex; per-component maximum.

    Quadratic-ish, meant for test-scale graphs.
    """
    best = 0
    for s in range(g.n):
        lev = _kernels.bfs_levels(g.indptr, g.indices, s)
        reached = lev[lev >= 0]
        if reached.size:
            best = max(best, int(reached.max()))
    return best


def eccentricity_lower_bound(g, samples=8, seed=0, sweeps=2):
    """Diameter lower bound by the double-sweep heuristic.

    Each BFS eccentricity bounds the diameter from below; restarting from
    the farthest vertex found tightens the bound.  Exact on trees.
    """
    if g.n == 0:
        return 0
    rng = np.random.default_rng(seed)
    best = 0
    for _ in range(samples):
        s = int(rng.integers(0, g.n))
        for _ in range(max(1, sweeps)):
            lev = _kernels.bfs_levels(g.indptr, g.indices, s)
            far = int(np.argmax(lev))
            ecc = int(lev[far])
            if ecc <= 0:
                break
            best = max(best, ecc)
            s = far
    return best
