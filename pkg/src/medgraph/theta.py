"""Theta classes of a median graph and everything derived from them.

A theta class is an equivalence class of edges under the transitive closure
of "opposite sides of a 4-cycle".  In a median graph each class is a
perfect-matching cutset whose removal leaves exactly two convex halfspaces.
Class ids are canonical: class k contains the k-th smallest of the classes'
minimum edge ids, so class 0 always contains edge 0.

Side indicators are signature bitmasks: bit c of row v says whether a
shortest path from vertex 0 to v crosses class c, i.e. whether v lies in
the side-1 halfspace of c (side 0 is the component of vertex 0).  The rows
are filled along one BFS tree and validated against every edge: an edge of
class c must flip exactly bit c.  That check fails on any non-median input
whose classes do not behave like halfspace cuts.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .graph import Graph, GraphError, NotMedianGraphError

_POPCOUNT = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(1)


class ThetaPartition:
    __slots__ = ("n", "m", "q", "edge_class", "side_rows", "cls_indptr",
                 "cls_eids", "orth_pairs", "_orth_set", "_sizes_by_side")

    def __init__(self, n, m, q, edge_class, side_rows, cls_indptr, cls_eids,
                 orth_pairs):
        self.n = n
        self.m = m
        self.q = q
        self.edge_class = edge_class
        self.side_rows = side_rows
        self.cls_indptr = cls_indptr
        self.cls_eids = cls_eids
        self.orth_pairs = orth_pairs
        self._orth_set = None
        self._sizes_by_side = None

    def __repr__(self):
        return f"ThetaPartition(n={self.n}, m={self.m}, q={self.q})"

    def class_edges(self, c):
        return self.cls_eids[self.cls_indptr[c]:self.cls_indptr[c + 1]]

    def class_size(self, c):
        return int(self.cls_indptr[c + 1] - self.cls_indptr[c])

    def side_of(self, verts, c):
        """Side indicator (0/1) of each vertex for class c."""
        v = np.asarray(verts, dtype=np.int64)
        return (self.side_rows[v, c >> 3] >> (c & 7)) & 1

    def halfspace_mask(self, c, side):
        """Boolean membership vector of one halfspace of class c."""
        bits = (self.side_rows[:, c >> 3] >> (c & 7)) & 1
        return bits == side

    def orth_set(self):
        if self._orth_set is None:
            self._orth_set = {(int(a), int(b)) for a, b in self.orth_pairs}
        return self._orth_set


def compute_theta_classes(g: Graph) -> ThetaPartition:
    """Partition edges into theta classes and build side indicators.

    Squares are enumerated through their top vertex in the orientation away
    from vertex 0; each pair of in-edges of a vertex closes at most one
    square (a second completion is a K_{2,3} and rejects the input).  The
    class partition is the union-find closure over opposite edge pairs.
    """
    n, m = g.n, g.m
    if m == 0:
        return ThetaPartition(n, 0, 0,
                              np.empty(0, np.int64),
                              np.zeros((n, 0), np.uint8),
                              np.zeros(1, np.int64),
                              np.empty(0, np.int64),
                              np.empty((0, 2), np.int64))

    dist = K.bfs_distances(g.indptr, g.nbrs, 0, n)
    owner = np.repeat(np.arange(n, dtype=np.int64), np.diff(g.indptr))
    down = dist[g.nbrs] < dist[owner]
    in_counts = np.bincount(owner[down], minlength=n)
    in_indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(in_counts, out=in_indptr[1:])
    in_nbrs = g.nbrs[down]
    in_eids = g.adj_eid[down]

    quads, status = K.find_squares(in_indptr, in_nbrs, in_eids, n)
    if status == 3:
        raise NotMedianGraphError("two 4-cycles share three corners (K_{2,3})")

    pa = np.concatenate([quads[:, 0], quads[:, 1]])
    pb = np.concatenate([quads[:, 3], quads[:, 2]])
    roots = K.union_pairs(m, pa, pb)

    # canonical ids ordered by each class's smallest edge id; roots from the
    # kernels are already the minimum edge id of the class
    uniq, edge_class = np.unique(roots, return_inverse=True)
    q = uniq.size
    edge_class = edge_class.astype(np.int64)

    # matching property: a vertex cannot carry two edges of one class
    slot_cls = edge_class[g.adj_eid]
    keys = owner * q + slot_cls
    if np.unique(keys).size != keys.size:
        raise NotMedianGraphError("vertex incident to two edges of one class")

    rows, st, bad = K.sigma_rows(g.indptr, g.nbrs, g.adj_eid, edge_class,
                                 g.edges_u, g.edges_v, q, n)
    if st == 1:
        raise GraphError("graph is not connected")
    if st == 2:
        raise NotMedianGraphError(
            f"edge {int(bad)} does not cross exactly its own class cut")

    order = np.argsort(edge_class, kind="stable")
    cls_indptr = np.zeros(q + 1, dtype=np.int64)
    np.cumsum(np.bincount(edge_class, minlength=q), out=cls_indptr[1:])
    cls_eids = order.astype(np.int64)

    if quads.shape[0]:
        a = edge_class[quads[:, 0]]
        b = edge_class[quads[:, 1]]
        lo = np.minimum(a, b)
        hi = np.maximum(a, b)
        orth = np.unique(lo * q + hi)
        orth_pairs = np.column_stack([orth // q, orth % q])
    else:
        orth_pairs = np.empty((0, 2), np.int64)

    return ThetaPartition(n, m, q, edge_class, rows, cls_indptr, cls_eids,
                          orth_pairs)


def _col_bitsums(rows, q, subset=None):
    """Per-class popcounts over (a subset of) side rows, chunked."""
    take = rows if subset is None else rows[subset]
    out = np.zeros(q, dtype=np.int64)
    for lo in range(0, take.shape[0], 2048):
        chunk = np.unpackbits(take[lo:lo + 2048], axis=1, bitorder="little")
        out += chunk[:, :q].sum(axis=0, dtype=np.int64)
    return out


def _adjacency_slots(g, verts):
    starts = g.indptr[verts]
    cnt = g.indptr[verts + 1] - starts
    total = int(cnt.sum())
    if total == 0:
        return np.empty(0, np.int64)
    offs = np.zeros(len(cnt), dtype=np.int64)
    np.cumsum(cnt[:-1], out=offs[1:])
    return np.arange(total, dtype=np.int64) - np.repeat(offs, cnt) + np.repeat(starts, cnt)


def halfspace_sizes_all(g: Graph, t: ThetaPartition) -> np.ndarray:
    """Sizes of both halfspaces of every class, keyed by side indicator.

    Computed by peripheral peeling: a halfspace equal to its own boundary is
    summed up (unit weights, accumulated across earlier peels) and folded
    onto its matched neighbors, then removed; every class gets peeled
    exactly once.  Returns an (q, 2) array, column s = size of side s.
    """
    if t._sizes_by_side is not None:
        return t._sizes_by_side
    n, m, q = g.n, g.m, t.q
    sizes = np.full((q, 2), -1, dtype=np.int64)
    if q == 0:
        t._sizes_by_side = sizes
        return sizes

    weight = np.ones(n, dtype=np.int64)
    alive_total = n
    live_edges = np.bincount(t.edge_class, minlength=q).astype(np.int64)
    cnt1 = _col_bitsums(t.side_rows, q)
    edge_alive = np.ones(m, dtype=bool)
    done = np.zeros(q, dtype=bool)

    for _ in range(q):
        cnt0 = alive_total - cnt1
        peripheral = ~done & (live_edges > 0) & ((cnt1 == live_edges) | (cnt0 == live_edges))
        cand = np.flatnonzero(peripheral)
        if cand.size == 0:
            raise NotMedianGraphError("no peripheral class; halfspace structure broken")
        c = int(cand[0])
        side = 0 if cnt0[c] == live_edges[c] else 1

        ceids = t.class_edges(c)
        ceids = ceids[edge_alive[ceids]]
        u = g.edges_u[ceids]
        v = g.edges_v[ceids]
        u_side = t.side_of(u, c)
        removed = np.where(u_side == side, u, v)
        mates = np.where(u_side == side, v, u)
        sizes[c, side] = int(weight[removed].sum())
        sizes[c, 1 - side] = n - sizes[c, side]
        done[c] = True

        weight[mates] += weight[removed]
        alive_total -= removed.size
        cnt1 -= _col_bitsums(t.side_rows, q, subset=removed)

        slots = _adjacency_slots(g, removed)
        if slots.size:
            eids = g.adj_eid[slots]
            eids = np.unique(eids[edge_alive[eids]])
            edge_alive[eids] = False
            np.subtract.at(live_edges, t.edge_class[eids], 1)

    if (live_edges != 0).any() or not done.all():
        raise NotMedianGraphError("peeling left live edges behind")
    t._sizes_by_side = sizes
    return sizes


def halfspace_sizes_minmaj(g: Graph, t: ThetaPartition) -> np.ndarray:
    """(q, 2) array of (minority, majority) halfspace sizes per class."""
    s = halfspace_sizes_all(g, t)
    return np.column_stack([s.min(axis=1), s.max(axis=1)])


def boundaries(g: Graph, t: ThetaPartition, c: int):
    """Endpoint sets of class-c edges, split by side (side-0 set first)."""
    if not 0 <= c < t.q:
        raise GraphError(f"class id {c} out of range")
    eids = t.class_edges(c)
    u = g.edges_u[eids]
    v = g.edges_v[eids]
    u_side = t.side_of(u, c)
    side0 = np.where(u_side == 0, u, v)
    side1 = np.where(u_side == 0, v, u)
    side0.sort()
    side1.sort()
    return side0, side1


def median_set(g: Graph, t: ThetaPartition) -> np.ndarray:
    """Vertices minimizing total distance, via the majority rule.

    Orient every edge of a non-egalitarian class toward the larger
    halfspace; the median set is the set of vertices with no outgoing arc.
    """
    sizes = halfspace_sizes_all(g, t)
    if t.q == 0:
        return np.arange(g.n, dtype=np.int64)
    non_sink = np.zeros(g.n, dtype=bool)
    cls = t.edge_class
    s0 = sizes[cls, 0]
    s1 = sizes[cls, 1]
    u_side = t.side_of(g.edges_u, cls)
    # endpoint sitting in the strictly smaller halfspace is not a sink
    u_minor = (u_side == 0) & (s0 < s1) | (u_side == 1) & (s1 < s0)
    v_minor = (s0 != s1) & ~u_minor
    non_sink[g.edges_u[u_minor]] = True
    non_sink[g.edges_v[v_minor]] = True
    return np.flatnonzero(~non_sink).astype(np.int64)


@dataclass(frozen=True)
class LadderTable:
    """Ladder sets L_{v0, v}: classes adjacent to v0 separating v from v0."""

    v0: int
    dist: np.ndarray
    ladders: list
    adjacent_classes: frozenset


def ladder_table(g: Graph, t: ThetaPartition, v0: int) -> LadderTable:
    """BFS label propagation of ladder sets from basepoint v0.

    Crossing an edge of a class adjacent to v0 extends the ladder by that
    class; every other step keeps it.  Each ladder is a pairwise-orthogonal
    family of at most log2(n) classes, stored as a sorted tuple.
    """
    if not 0 <= v0 < g.n:
        raise GraphError(f"vertex id {v0} out of range")
    adj = frozenset(int(c) for c in t.edge_class[g.incident_edges(v0)])
    dist = np.full(g.n, -1, dtype=np.int64)
    ladders: list = [None] * g.n
    dist[v0] = 0
    ladders[v0] = ()
    queue = deque([v0])
    indptr, nbrs, adj_eid, ecls = g.indptr, g.nbrs, g.adj_eid, t.edge_class
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        lad = ladders[v]
        for k in range(indptr[v], indptr[v + 1]):
            w = nbrs[k]
            if dist[w] >= 0:
                continue
            dist[w] = dv
            c = int(ecls[adj_eid[k]])
            if c in adj:
                grown = lad + (c,)
                if len(grown) > 1 and c < grown[-2]:
                    grown = tuple(sorted(grown))
                ladders[w] = grown
            else:
                ladders[w] = lad
            queue.append(w)
    return LadderTable(v0, dist, ladders, adj)


def is_pof(t: ThetaPartition, classes) -> bool:
    """Whether the classes are pairwise orthogonal (share squares pairwise)."""
    cs = sorted(int(c) for c in classes)
    for c in cs:
        if not 0 <= c < t.q:
            raise GraphError(f"class id {c} out of range")
    if len(set(cs)) != len(cs):
        raise GraphError("duplicate class id")
    orth = t.orth_set()
    return all((cs[i], cs[j]) in orth
               for i in range(len(cs)) for j in range(i + 1, len(cs)))
