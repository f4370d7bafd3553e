"""Graph container, BFS wrappers, induced subgraphs and text I/O.

Graphs are unweighted, undirected, connected, with dense 0-based vertex ids.
Internally everything is CSR over numpy arrays: adjacency sorted by neighbor
id, edges sorted lexicographically with u < v.  Edge ids are positions in
that sorted edge list.  Vertex weights are a separate int64 array.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels as K

MAX_WEIGHT = 1 << 40


class GraphError(ValueError):
    """Structurally invalid input (format, ids, connectivity, parity)."""


class NotMedianGraphError(GraphError):
    """A check that every median graph satisfies failed."""


class Graph:
    __slots__ = ("n", "m", "edges_u", "edges_v", "indptr", "nbrs", "adj_eid")

    def __init__(self, n, edges_u, edges_v, indptr, nbrs, adj_eid):
        self.n = int(n)
        self.m = int(edges_u.shape[0])
        self.edges_u = edges_u
        self.edges_v = edges_v
        self.indptr = indptr
        self.nbrs = nbrs
        self.adj_eid = adj_eid

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def neighbors(self, v):
        return self.nbrs[self.indptr[v]:self.indptr[v + 1]]

    def incident_edges(self, v):
        return self.adj_eid[self.indptr[v]:self.indptr[v + 1]]

    def degree(self, v):
        return int(self.indptr[v + 1] - self.indptr[v])


def build_graph(n, edges, validate=True):
    """Build a Graph from an (m, 2) array-like of endpoint pairs.

    Pairs are canonicalized to u < v and sorted lexicographically; edge ids
    refer to the sorted order.  With validate=True the graph must be simple,
    connected and bipartite; a density above n*log2(n) edges only warns,
    since it already rules out a median graph.
    """
    n = int(n)
    if n <= 0:
        raise GraphError("vertex count must be positive")
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    m = edges.shape[0]
    if m:
        if edges.min() < 0 or edges.max() >= n:
            raise GraphError("edge endpoint out of range")
        u = edges.min(axis=1)
        v = edges.max(axis=1)
        if (u == v).any():
            raise GraphError("self loop")
        order = np.lexsort((v, u))
        u, v = u[order], v[order]
        dup = (u[1:] == u[:-1]) & (v[1:] == v[:-1])
        if dup.any():
            raise GraphError("duplicate edge")
    else:
        u = np.empty(0, dtype=np.int64)
        v = np.empty(0, dtype=np.int64)

    eid = np.arange(m, dtype=np.int64)
    ends = np.concatenate([u, v])
    other = np.concatenate([v, u])
    eids2 = np.concatenate([eid, eid])
    deg = np.bincount(ends, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(deg, out=indptr[1:])
    order = np.lexsort((other, ends))
    nbrs = other[order]
    adj_eid = eids2[order]
    g = Graph(n, u, v, indptr, nbrs, adj_eid)

    if validate:
        if n > 1:
            dist = K.bfs_distances(g.indptr, g.nbrs, 0, n)
            if (dist < 0).any():
                raise GraphError("graph is not connected")
            if m and (dist[u] == dist[v]).any():
                raise GraphError("graph is not bipartite")
        if n >= 2 and m > n * math.log2(n):
            warnings.warn(
                f"graph has {m} edges, above the n*log2(n) bound every "
                "median graph satisfies",
                stacklevel=2,
            )
    return g


def validate_weights(w, n):
    """Coerce to an int64 weight vector, rejecting negatives and > 2**40."""
    w = np.asarray(w, dtype=np.int64)
    if w.shape != (n,):
        raise GraphError(f"expected {n} weights, got shape {w.shape}")
    if w.size and w.min() < 0:
        raise GraphError("weights must be nonnegative")
    if w.size and w.max() > MAX_WEIGHT:
        raise GraphError("weights above 2**40 are not supported")
    return w


def zero_weights(n):
    return np.zeros(n, dtype=np.int64)


def bfs_distances(g, src):
    """Hop distances from src; adjacent vertices always differ by <= 1."""
    if not 0 <= src < g.n:
        raise GraphError(f"vertex id {src} out of range")
    return K.bfs_distances(g.indptr, g.nbrs, src, g.n)


@dataclass(frozen=True)
class GateAssignment:
    """Result of a multi-source BFS from a gated set h.

    dist[v] is the hop distance from v to h, gate[v] the first h-vertex a
    BFS from all of h reaches v through; for gated h that vertex is the
    unique gate of v.  Vertices of h have dist 0 and gate themselves.
    """

    seeds: np.ndarray
    dist: np.ndarray
    gate: np.ndarray


def gated_bfs(g, h):
    """Distances and gates for the vertex set h (seeded multi-source BFS)."""
    h = np.unique(np.asarray(h, dtype=np.int64))
    if h.size == 0:
        raise GraphError("gated BFS needs a nonempty seed set")
    if h[0] < 0 or h[-1] >= g.n:
        raise GraphError("seed vertex out of range")
    dist, gate = K.gated_bfs(g.indptr, g.nbrs, h, g.n)
    return GateAssignment(h, dist, gate)


@dataclass(frozen=True)
class SubgraphMap:
    """Induced subgraph together with both vertex id directions."""

    child: Graph
    to_parent: np.ndarray
    to_child: np.ndarray
    edge_to_parent: np.ndarray


def induced_subgraph(g, verts):
    """Induced subgraph on verts (must be nonempty and connected in g).

    Child vertex ids follow the sorted order of verts, child edge ids the
    parent edge order, so the construction is deterministic.
    """
    verts = np.unique(np.asarray(verts, dtype=np.int64))
    if verts.size == 0:
        raise GraphError("empty vertex subset")
    if verts[0] < 0 or verts[-1] >= g.n:
        raise GraphError("subset vertex out of range")
    nc = verts.size
    to_child = np.full(g.n, -1, dtype=np.int64)
    to_child[verts] = np.arange(nc, dtype=np.int64)
    keep = (to_child[g.edges_u] >= 0) & (to_child[g.edges_v] >= 0)
    eids = np.flatnonzero(keep)
    cu = to_child[g.edges_u[eids]]
    cv = to_child[g.edges_v[eids]]
    child = build_graph(nc, np.column_stack([cu, cv]), validate=False)
    if nc > 1:
        dist = K.bfs_distances(child.indptr, child.nbrs, 0, nc)
        if (dist < 0).any():
            raise GraphError("vertex subset is not connected")
    return SubgraphMap(child, verts, to_child, eids)


# -- text formats -----------------------------------------------------------

def save_graph(g, path):
    lines = [f"{g.n} {g.m}\n"]
    lines.extend(f"{u} {v}\n" for u, v in zip(g.edges_u.tolist(), g.edges_v.tolist()))
    with open(path, "w", newline="") as fh:
        fh.writelines(lines)


def load_graph(path, validate=True):
    """Strict reader for the graph text format.

    Line 1 is "n m", then m lines "u v" with 0 <= u < v < n, single spaces,
    sorted lexicographically.
    """
    with open(path) as fh:
        text = fh.read()
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise GraphError("empty graph file")
    head = lines[0].split(" ")
    if len(head) != 2:
        raise GraphError("header must be 'n m'")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise GraphError("header must be two integers") from exc
    if len(lines) - 1 != m:
        raise GraphError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = np.empty((m, 2), dtype=np.int64)
    prev = (-1, -1)
    for i, line in enumerate(lines[1:]):
        parts = line.split(" ")
        if len(parts) != 2:
            raise GraphError(f"edge line {i + 2}: expected 'u v'")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphError(f"edge line {i + 2}: not integers") from exc
        if not 0 <= u < v < n:
            raise GraphError(f"edge line {i + 2}: need 0 <= u < v < n")
        if (u, v) <= prev:
            raise GraphError(f"edge line {i + 2}: edges not sorted")
        prev = (u, v)
        edges[i, 0] = u
        edges[i, 1] = v
    return build_graph(n, edges, validate=validate)


def save_weights(w, path):
    with open(path, "w", newline="") as fh:
        fh.writelines(f"{int(x)}\n" for x in w)


def load_weights(path, n):
    with open(path) as fh:
        lines = [ln for ln in fh.read().split("\n") if ln != ""]
    if len(lines) != n:
        raise GraphError(f"expected {n} weight lines, found {len(lines)}")
    try:
        w = [int(ln) for ln in lines]
    except ValueError as exc:
        raise GraphError("weights must be integers") from exc
    return validate_weights(w, n)
