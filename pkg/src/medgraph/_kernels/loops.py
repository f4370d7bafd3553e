"""Loop kernels over CSR adjacency arrays.

Every function here is written in the numpy-scalar subset that numba's
nopython mode accepts; the jit backend compiles these exact functions and
the numpy backend replaces them with vectorized equivalents.  Outputs of
the two backends must match element for element, including BFS tie-breaks
(queue order follows adjacency order, adjacency is sorted by neighbor id).
"""

import numpy as np


def bfs_distances(indptr, nbrs, src, n):
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[src] = 0
    queue[0] = src
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        for k in range(indptr[v], indptr[v + 1]):
            w = nbrs[k]
            if dist[w] < 0:
                dist[w] = dv
                queue[tail] = w
                tail += 1
    return dist


def gated_bfs(indptr, nbrs, seeds, n):
    # Multi-source BFS: the queue starts holding every seed, so each vertex
    # ends up with the distance to the seed set and the seed that reached it
    # first (its gate when the seed set is gated).
    dist = np.full(n, -1, dtype=np.int64)
    gate = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    tail = 0
    for i in range(seeds.shape[0]):
        s = seeds[i]
        dist[s] = 0
        gate[s] = s
        queue[tail] = s
        tail += 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        gv = gate[v]
        for k in range(indptr[v], indptr[v + 1]):
            w = nbrs[k]
            if dist[w] < 0:
                dist[w] = dv
                gate[w] = gv
                queue[tail] = w
                tail += 1
    return dist, gate


def sigma_rows(indptr, nbrs, adj_eid, edge_class, eu, ev, q, n):
    """Per-vertex bitmask of edge classes crossed on a shortest path from 0.

    Fills rows along a BFS tree, then checks that every edge flips exactly
    its own class bit.  Status: 0 ok, 1 disconnected, 2 some edge flips the
    wrong bit set (bad edge id returned alongside).
    """
    nbytes = (q + 7) >> 3
    rows = np.zeros((n, nbytes), dtype=np.uint8)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    dist[0] = 0
    queue[0] = 0
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        dv = dist[v] + 1
        for k in range(indptr[v], indptr[v + 1]):
            w = nbrs[k]
            if dist[w] < 0:
                dist[w] = dv
                c = edge_class[adj_eid[k]]
                for b in range(nbytes):
                    rows[w, b] = rows[v, b]
                rows[w, c >> 3] |= np.uint8(1 << (c & 7))
                queue[tail] = w
                tail += 1
    if tail < n:
        return rows, np.int64(1), np.int64(-1)
    m = eu.shape[0]
    for e in range(m):
        u = eu[e]
        v = ev[e]
        c = edge_class[e]
        cb = c >> 3
        cbit = np.uint8(1 << (c & 7))
        for b in range(nbytes):
            x = rows[u, b] ^ rows[v, b]
            if b == cb:
                if x != cbit:
                    return rows, np.int64(2), np.int64(e)
            elif x != 0:
                return rows, np.int64(2), np.int64(e)
    return rows, np.int64(0), np.int64(-1)


def find_squares(in_indptr, in_nbrs, in_eids, n):
    """Enumerate 4-cycles via their top vertex in a basepoint orientation.

    in_* is the CSR of neighbors strictly closer to the basepoint (sorted by
    id).  For each pair of lower neighbors (a, b) of y, the cycle closes at
    the common lower neighbor z of a and b; two or more completions mean a
    K_{2,3}, which cannot sit in a median graph.  Returns the four edge ids
    (za, ay, zb, by) per square and a status (0 ok, 3 multiple completions).
    """
    total = 0
    for y in range(n):
        deg = in_indptr[y + 1] - in_indptr[y]
        total += (deg * (deg - 1)) // 2
    out = np.empty((total, 4), dtype=np.int64)
    cnt = 0
    for y in range(n):
        lo = in_indptr[y]
        hi = in_indptr[y + 1]
        for i in range(lo, hi):
            a = in_nbrs[i]
            for j in range(i + 1, hi):
                b = in_nbrs[j]
                # two-pointer intersection of the sorted lower neighborhoods
                pa = in_indptr[a]
                ea = in_indptr[a + 1]
                pb = in_indptr[b]
                eb = in_indptr[b + 1]
                found = 0
                while pa < ea and pb < eb:
                    za = in_nbrs[pa]
                    zb = in_nbrs[pb]
                    if za < zb:
                        pa += 1
                    elif zb < za:
                        pb += 1
                    else:
                        if found == 1:
                            return out[:cnt], np.int64(3)
                        found = 1
                        out[cnt, 0] = in_eids[pa]
                        out[cnt, 1] = in_eids[i]
                        out[cnt, 2] = in_eids[pb]
                        out[cnt, 3] = in_eids[j]
                        cnt += 1
                        pa += 1
                        pb += 1
    return out[:cnt], np.int64(0)


def union_pairs(m, pa, pb):
    """Union-find over edge ids; returns the root of each edge."""
    parent = np.arange(m, dtype=np.int64)
    for i in range(pa.shape[0]):
        x = pa[i]
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        y = pb[i]
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        if x < y:
            parent[y] = x
        elif y < x:
            parent[x] = y
    roots = np.empty(m, dtype=np.int64)
    for e in range(m):
        x = e
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        roots[e] = x
    return roots
