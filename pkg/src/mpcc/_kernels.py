"""Hot loops over CSR adjacency, with numba and pure-numpy implementations.

Both backends compute exact integer results, so outputs are identical
element for element.  Set MPCC_NUMPY=1 to force the numpy path; the
numpy path is also used automatically when numba is not importable.
"""

import os

import numpy as np

INT64_MAX = np.iinfo(np.int64).max

GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def mix64(x):
    """splitmix64 finalizer, a bijection on 64-bit words (vectorized)."""
    z = np.asarray(x, dtype=np.uint64).copy()
    z ^= z >> np.uint64(30)
    z *= _MIX1
    z ^= z >> np.uint64(27)
    z *= _MIX2
    z ^= z >> np.uint64(31)
    return z


USE_NUMBA = os.environ.get("MPCC_NUMPY", "") != "1"
if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:
        USE_NUMBA = False


def _segment_min(vals, starts, nonempty, nseg):
    # Min per segment; empty segments get INT64_MAX.  Consecutive equal
    # offsets collapse, so reduceat over nonempty starts stays aligned.
    out = np.full(nseg, INT64_MAX, dtype=np.int64)
    if vals.size:
        out[nonempty] = np.minimum.reduceat(vals, starts[nonempty])
    return out


def neighbor_min_np(indptr, indices, key, include_self):
    n = indptr.size - 1
    starts = indptr[:-1]
    nonempty = starts < indptr[1:]
    out = _segment_min(key[indices], starts, nonempty, n)
    if include_self:
        np.minimum(out, key[: n], out=out)
    return out


def rows_neighbor_min_np(indptr, indices, key, rows, include_self):
    counts = indptr[rows + 1] - indptr[rows]
    gathered = gather_rows_np(indptr, indices, rows, counts)
    starts = np.concatenate(([0], np.cumsum(counts[:-1]))) if rows.size else np.zeros(0, np.int64)
    out = _segment_min(key[gathered], starts, counts > 0, rows.size)
    if include_self:
        np.minimum(out, key[rows], out=out)
    return out


def gather_rows_np(indptr, indices, rows, counts):
    # Concatenation of adjacency slices for the given rows.
    total = int(counts.sum())
    if total == 0:
        return np.zeros(0, dtype=indices.dtype)
    nz = counts > 0
    starts = indptr[rows[nz]]
    cnz = counts[nz]
    idx = np.ones(total, dtype=np.int64)
    idx[0] = starts[0]
    cum = np.cumsum(cnz)
    idx[cum[:-1]] = starts[1:] - starts[:-1] - cnz[:-1] + 1
    return indices[np.cumsum(idx)]


def bfs_levels_np(indptr, indices, src):
    n = indptr.size - 1
    levels = np.full(n, -1, dtype=np.int32)
    levels[src] = 0
    frontier = np.array([src], dtype=indices.dtype)
    depth = 0
    while frontier.size:
        counts = indptr[frontier + 1] - indptr[frontier]
        nbrs = gather_rows_np(indptr, indices, frontier, counts)
        nbrs = nbrs[levels[nbrs] < 0]
        if nbrs.size == 0:
            break
        frontier = np.unique(nbrs)
        depth += 1
        levels[frontier] = depth
    return levels


def uf_unite_np(parent, us, vs):
    # In-place union over an edge batch, path halving on the way up.
    for i in range(us.size):
        a = us[i]
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        b = vs[i]
        while parent[b] != b:
            parent[b] = parent[parent[b]]
            b = parent[b]
        if a < b:
            parent[b] = a
        elif b < a:
            parent[a] = b


def uf_roots_np(parent):
    out = parent.copy()
    for v in range(out.size):
        r = v
        while out[r] != r:
            r = out[r]
        while out[v] != r:
            nxt = out[v]
            out[v] = r
            v = nxt
    return out


def chase_cycle2_np(f, cap):
    # d(v) = first k with f^k(v) == f^(k+2)(v); also returns the pair
    # (f^d(v), f^(d+1)(v)) and leaves d = -1 past the step cap.
    n = f.size
    d = np.full(n, -1, dtype=np.int32)
    a = np.zeros(n, dtype=f.dtype)
    b = np.zeros(n, dtype=f.dtype)
    idx = np.arange(n, dtype=np.int64)
    x0 = idx.astype(f.dtype)
    x1 = f[x0]
    x2 = f[x1]
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
        if k >= cap:
            break
        x0, x1 = x1, x2
        x2 = f[x2]
        k += 1
    return d, a, b


if USE_NUMBA:

    @njit(cache=True)
    def _neighbor_min_nb(indptr, indices, key, include_self):
        n = indptr.size - 1
        out = np.empty(n, dtype=np.int64)
        for v in range(n):
            best = key[v] if include_self else INT64_MAX
            for e in range(indptr[v], indptr[v + 1]):
                k = key[indices[e]]
                if k < best:
                    best = k
            out[v] = best
        return out

    @njit(cache=True)
    def _rows_neighbor_min_nb(indptr, indices, key, rows, include_self):
        out = np.empty(rows.size, dtype=np.int64)
        for i in range(rows.size):
            v = rows[i]
            best = key[v] if include_self else INT64_MAX
            for e in range(indptr[v], indptr[v + 1]):
                k = key[indices[e]]
                if k < best:
                    best = k
            out[i] = best
        return out

    @njit(cache=True)
    def _bfs_levels_nb(indptr, indices, src):
        n = indptr.size - 1
        levels = np.full(n, -1, dtype=np.int32)
        queue = np.empty(n, dtype=np.int64)
        queue[0] = src
        levels[src] = 0
        head = 0
        tail = 1
        while head < tail:
            v = queue[head]
            head += 1
            lvl = levels[v] + 1
            for e in range(indptr[v], indptr[v + 1]):
                u = indices[e]
                if levels[u] < 0:
                    levels[u] = lvl
                    queue[tail] = u
                    tail += 1
        return levels

    @njit(cache=True)
    def _uf_unite_nb(parent, us, vs):
        for i in range(us.size):
            a = us[i]
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            b = vs[i]
            while parent[b] != b:
                parent[b] = parent[parent[b]]
                b = parent[b]
            if a < b:
                parent[b] = a
            elif b < a:
                parent[a] = b

    @njit(cache=True)
    def _uf_roots_nb(parent):
        out = parent.copy()
        for v in range(out.size):
            r = v
            while out[r] != r:
                r = out[r]
            while out[v] != r:
                nxt = out[v]
                out[v] = r
                v = nxt
        return out

    @njit(cache=True)
    def _chase_cycle2_nb(f, cap):
        n = f.size
        d = np.full(n, -1, dtype=np.int32)
        a = np.zeros(n, dtype=np.int32)
        b = np.zeros(n, dtype=np.int32)
        for v in range(n):
            x0 = np.int64(v)
            x1 = np.int64(f[x0])
            x2 = np.int64(f[x1])
            k = 0
            while x2 != x0:
                if k >= cap:
                    k = -1
                    break
                x0 = x1
                x1 = x2
                x2 = np.int64(f[x2])
                k += 1
            if k >= 0:
                d[v] = k
                a[v] = np.int32(x0)
                b[v] = np.int32(x1)
        return d, a, b

    def neighbor_min(indptr, indices, key, include_self):
        return _neighbor_min_nb(indptr, indices, key, include_self)

    def rows_neighbor_min(indptr, indices, key, rows, include_self):
        return _rows_neighbor_min_nb(indptr, indices, key, rows, include_self)

    def bfs_levels(indptr, indices, src):
        return _bfs_levels_nb(indptr, indices, src)

    def uf_unite(parent, us, vs):
        _uf_unite_nb(parent, us, vs)

    def uf_roots(parent):
        return _uf_roots_nb(parent)

    def chase_cycle2(f, cap):
        return _chase_cycle2_nb(f, cap)

    BACKEND = "numba"
else:
    neighbor_min = neighbor_min_np
    rows_neighbor_min = rows_neighbor_min_np
    bfs_levels = bfs_levels_np
    uf_unite = uf_unite_np
    uf_roots = uf_roots_np
    chase_cycle2 = chase_cycle2_np
    BACKEND = "numpy"
