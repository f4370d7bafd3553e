"""Vectorized numpy implementations of the loop kernels.

Level-synchronous BFS reproduces the FIFO discovery order of the loop
kernels exactly: within a level the frontier is kept in discovery order and
candidates are expanded frontier-major, adjacency-minor, so the first
occurrence of a vertex in the candidate stream coincides with the first
time the queue version would pop it.
"""

import numpy as np

_POPCOUNT = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(1)


def _expand(indptr, nbrs, frontier):
    """All adjacency slots of the frontier, frontier-major, adjacency-minor."""
    starts = indptr[frontier]
    cnt = indptr[frontier + 1] - starts
    total = int(cnt.sum())
    if total == 0:
        return np.empty(0, np.int64), cnt
    offs = np.zeros(len(cnt), dtype=np.int64)
    np.cumsum(cnt[:-1], out=offs[1:])
    slots = np.arange(total, dtype=np.int64) - np.repeat(offs, cnt) + np.repeat(starts, cnt)
    return slots, cnt


def bfs_distances(indptr, nbrs, src, n):
    dist = np.full(n, -1, dtype=np.int64)
    dist[src] = 0
    frontier = np.array([src], dtype=np.int64)
    d = 0
    while frontier.size:
        slots, _ = _expand(indptr, nbrs, frontier)
        if slots.size == 0:
            break
        cand = nbrs[slots]
        cand = cand[dist[cand] < 0]
        if cand.size == 0:
            break
        _, first = np.unique(cand, return_index=True)
        first.sort()
        frontier = cand[first]
        d += 1
        dist[frontier] = d
    return dist


def gated_bfs(indptr, nbrs, seeds, n):
    dist = np.full(n, -1, dtype=np.int64)
    gate = np.full(n, -1, dtype=np.int64)
    frontier = seeds.astype(np.int64)
    dist[frontier] = 0
    gate[frontier] = frontier
    d = 0
    while frontier.size:
        slots, cnt = _expand(indptr, nbrs, frontier)
        if slots.size == 0:
            break
        cand = nbrs[slots]
        src_gate = np.repeat(gate[frontier], cnt)
        new = dist[cand] < 0
        cand = cand[new]
        src_gate = src_gate[new]
        if cand.size == 0:
            break
        _, first = np.unique(cand, return_index=True)
        first.sort()
        frontier = cand[first]
        d += 1
        dist[frontier] = d
        gate[frontier] = src_gate[first]
    return dist, gate


def sigma_rows(indptr, nbrs, adj_eid, edge_class, eu, ev, q, n):
    nbytes = (q + 7) >> 3
    rows = np.zeros((n, nbytes), dtype=np.uint8)
    dist = np.full(n, -1, dtype=np.int64)
    dist[0] = 0
    frontier = np.array([0], dtype=np.int64)
    seen = 1
    d = 0
    while frontier.size:
        slots, cnt = _expand(indptr, nbrs, frontier)
        if slots.size == 0:
            break
        cand = nbrs[slots]
        parent = np.repeat(frontier, cnt)
        new = dist[cand] < 0
        cand, parent, slots = cand[new], parent[new], slots[new]
        if cand.size == 0:
            break
        _, first = np.unique(cand, return_index=True)
        first.sort()
        children = cand[first]
        d += 1
        dist[children] = d
        seen += children.size
        rows[children] = rows[parent[first]]
        c = edge_class[adj_eid[slots[first]]]
        rows[children, c >> 3] |= (np.uint8(1) << (c & 7).astype(np.uint8))
        frontier = children
    if seen < n:
        return rows, np.int64(1), np.int64(-1)
    if eu.shape[0]:
        x = rows[eu] ^ rows[ev]
        pop = _POPCOUNT[x].sum(1)
        hit = x[np.arange(eu.shape[0]), edge_class >> 3]
        ok = (pop == 1) & (hit == (np.uint8(1) << (edge_class & 7).astype(np.uint8)))
        if not ok.all():
            return rows, np.int64(2), np.int64(np.flatnonzero(~ok)[0])
    return rows, np.int64(0), np.int64(-1)


def find_squares(in_indptr, in_nbrs, in_eids, n):
    lower = [in_nbrs[in_indptr[y]:in_indptr[y + 1]] for y in range(n)]
    eids = [in_eids[in_indptr[y]:in_indptr[y + 1]] for y in range(n)]
    lowsets = [dict(zip(l.tolist(), e.tolist())) for l, e in zip(lower, eids)]
    quads = []
    for y in range(n):
        ly = lower[y]
        ey = eids[y]
        for i in range(len(ly)):
            a = ly[i]
            da = lowsets[a]
            for j in range(i + 1, len(ly)):
                b = ly[j]
                db = lowsets[b]
                if len(db) < len(da):
                    small, other = db, da
                else:
                    small, other = da, db
                found = None
                for z, ez in small.items():
                    if z in other:
                        if found is not None:
                            return (np.array(quads, dtype=np.int64).reshape(-1, 4),
                                    np.int64(3))
                        found = (da[z], int(ey[i]), db[z], int(ey[j]))
                if found is not None:
                    quads.append(found)
    return np.array(quads, dtype=np.int64).reshape(-1, 4), np.int64(0)


def union_pairs(m, pa, pb):
    from scipy.sparse import coo_matrix
    from scipy.sparse.csgraph import connected_components

    if pa.shape[0] == 0:
        return np.arange(m, dtype=np.int64)
    data = np.ones(pa.shape[0], dtype=np.int8)
    g = coo_matrix((data, (pa, pb)), shape=(m, m))
    _, labels = connected_components(g, directed=False)
    # canonical root: smallest edge id in each component (matches the loop
    # kernel, whose union always keeps the smaller root on top)
    root_of_label = np.full(int(labels.max()) + 1, m, dtype=np.int64)
    np.minimum.at(root_of_label, labels, np.arange(m, dtype=np.int64))
    return root_of_label[labels]
