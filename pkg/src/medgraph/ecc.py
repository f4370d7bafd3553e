"""All weighted eccentricities of a median graph in quasilinear time.

The recursion has two regimes.  When some cut class splits the graph into
two halfspaces that are both at least n/(2 ln n) vertices, we recurse on the
halfspaces and merge through the cut's gates.  When every class is lopsided,
the graph has a single dominant center: half the vertices read their answer
straight off a BFS from it, and the remaining minority-side "slices" are
solved by a pair of small recursions each — once with the original weights
and once with weights lifted over the slice boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import (Graph, GraphError, bfs_distances, gated_bfs,
                    induced_subgraph, validate_weights, zero_weights)
from .theta import (ThetaPartition, boundaries, compute_theta_classes,
                    halfspace_sizes_all, ladder_table, median_set)

_WSTAR_CAP = 1 << 62  # headroom check for lifted weights in nested recursions


@dataclass(frozen=True)
class BalanceVerdict:
    """Split-class search result: the class whose smaller halfspace is
    largest, and whether it clears the n/(2 ln n) threshold."""

    balanced: bool
    cls: int
    min_side: int


def find_balanced_class(g: Graph, t: ThetaPartition, sizes) -> BalanceVerdict:
    """Pick the best split class, preferring the most even cut.

    The threshold comparison is min_side * 2 ln(n) >= n in double precision,
    exact for all supported sizes.  Ties on min side go to the smallest
    class id.
    """
    n = g.n
    if n < 3:
        raise GraphError("balance test is defined for n >= 3")
    mins = sizes.min(axis=1)
    c = int(np.argmax(mins))
    min_side = int(mins[c])
    balanced = min_side * (2.0 * math.log(n)) >= float(n)
    return BalanceVerdict(balanced, c, min_side)


def merge_balanced(g: Graph, t: ThetaPartition, c: int, ecc_h1, ecc_h2):
    """Combine per-halfspace eccentricities across cut class c.

    ecc_h1 / ecc_h2 are indexed by ascending vertex id within side 0 / side 1
    (the induced-subgraph order).  For a vertex u, the farthest point across
    the cut is reached through u's gate on the other side, so one gated BFS
    per side settles every cross term.
    """
    b0, b1 = boundaries(g, t, c)
    mask1 = t.halfspace_mask(c, 1)
    verts0 = np.flatnonzero(~mask1)
    verts1 = np.flatnonzero(mask1)
    ecc_by_parent = np.full(g.n, -1, dtype=np.int64)
    ecc_by_parent[verts0] = ecc_h1
    ecc_by_parent[verts1] = ecc_h2

    out = np.full(g.n, -1, dtype=np.int64)
    to1 = gated_bfs(g, b1)
    out[verts0] = np.maximum(
        ecc_by_parent[verts0],
        to1.dist[verts0] + ecc_by_parent[to1.gate[verts0]])
    to0 = gated_bfs(g, b0)
    out[verts1] = np.maximum(
        ecc_by_parent[verts1],
        to0.dist[verts1] + ecc_by_parent[to0.gate[verts1]])
    return out


@dataclass(frozen=True)
class CenterShortcut:
    """The center's own weight dominates every distance from it."""

    v0: int


def ecc_from_center(g: Graph, w, v0: int):
    """Eccentricities when the center weight dominates: eps(u) = d(u,v0) + w(v0)."""
    dist = bfs_distances(g, v0)
    assert bool(np.all(dist + w <= w[v0])), \
        "center shortcut taken but some vertex outweighs the center"
    return dist + w[v0]


class SliceDecomposition:
    """Layered view of a graph with no balanced class.

    v0 is the unique unweighted median, u_max the (weighted-)farthest vertex
    from it.  The classes adjacent to v0 separating it from u_max, in
    ascending id order, carve the minority sides into disjoint slices
    S_0..S_{ell-1}; everything else is the large set, which keeps at least
    half of the vertices and contains v0.  slice_of holds each vertex's
    slice index, -1 for the large set.
    """

    __slots__ = ("g", "v0", "u_max", "ladder", "slice_of", "dist_v0",
                 "slice_maps", "_assignments")

    def __init__(self, g, v0, u_max, ladder, slice_of, dist_v0, slice_maps):
        self.g = g
        self.v0 = v0
        self.u_max = u_max
        self.ladder = ladder
        self.slice_of = slice_of
        self.dist_v0 = dist_v0
        self.slice_maps = slice_maps
        self._assignments = {}

    @property
    def ell(self):
        return len(self.ladder)

    def large_mask(self):
        return self.slice_of < 0

    def residual_vertices(self, i):
        """Vertices of the i-th residual graph: slices i.. plus the large set."""
        return np.flatnonzero((self.slice_of < 0) | (self.slice_of >= i))

    def assignment(self, i):
        """(submap, dist, gate) of the residual graph at stage i, gated into
        slice i.  Shared by the weight lift and the peel; cached."""
        hit = self._assignments.get(i)
        if hit is not None:
            return hit
        gmap = induced_subgraph(self.g, self.residual_vertices(i))
        seeds = gmap.to_child[self.slice_maps[i].to_parent]
        ga = gated_bfs(gmap.child, seeds)
        self._assignments[i] = (gmap, ga.dist, ga.gate)
        return self._assignments[i]

    def lifted_weights(self, i, w):
        """Stage-i slice weights folded over the slice boundary (child order)."""
        gmap, dist, gate = self.assignment(i)
        slice_child = gmap.to_child[self.slice_maps[i].to_parent]
        return star_weights(gmap.child, slice_child, w[gmap.to_parent],
                            assignment=(dist, gate))


def star_weights(gi: Graph, slice_verts, w, assignment=None):
    """Fold the outside of a gated slice onto the slice's boundary.

    For each slice vertex x, the result is the largest d(x, z) + w(z) over
    outside vertices z gated at x, or w(x) when nothing outside lands on x.
    Returned in slice_verts order.  Every slice vertex with an outside
    neighbor must receive at least one contribution (its matched neighbor
    sits in its fiber); that is asserted.
    """
    slice_verts = np.asarray(slice_verts, dtype=np.int64)
    if assignment is None:
        ga = gated_bfs(gi, slice_verts)
        dist, gate = ga.dist, ga.gate
    else:
        dist, gate = assignment
    in_slice = np.zeros(gi.n, dtype=bool)
    in_slice[slice_verts] = True
    outside = np.flatnonzero(~in_slice)
    assert outside.size > 0, "slice equals its residual graph; nothing to fold"

    best = np.full(gi.n, -1, dtype=np.int64)
    np.maximum.at(best, gate[outside], dist[outside] + w[outside])

    eu, ev = gi.edges_u, gi.edges_v
    mixed_u = in_slice[eu] & ~in_slice[ev]
    mixed_v = in_slice[ev] & ~in_slice[eu]
    boundary = np.concatenate([eu[mixed_u], ev[mixed_v]])
    assert boundary.size > 0, "gated slice with empty boundary"
    assert bool((best[boundary] >= 0).all()), \
        "a boundary vertex received no fiber contribution"

    picked = best[slice_verts]
    return np.where(picked >= 0, picked, w[slice_verts])


def unbalanced_setup(g: Graph, t: ThetaPartition, sizes, w):
    """Center, farthest target, and slice layers for the lopsided regime.

    Returns a CenterShortcut when the center's weight dominates everything;
    otherwise a SliceDecomposition.  Requires that no class was balanced,
    which forces the median set to be a single vertex.
    """
    med = median_set(g, t)
    assert med.size == 1, \
        "no balanced class, yet the median set is not a single vertex"
    v0 = int(med[0])
    dist_v0 = bfs_distances(g, v0)
    scores = dist_v0 + w
    best = int(scores.max())
    if int(scores[v0]) == best:
        return CenterShortcut(v0)
    u_max = int(np.flatnonzero(scores == best)[0])

    lt = ladder_table(g, t, v0)
    ladder = lt.ladders[u_max]
    assert ladder, "farthest vertex is separated from the center by no class"

    v0_sides = {c: int(t.side_of(np.array([v0]), c)[0]) for c in ladder}
    slice_of = np.full(g.n, -1, dtype=np.int64)
    for i in range(len(ladder) - 1, -1, -1):
        c = ladder[i]
        far = t.halfspace_mask(c, 1 - v0_sides[c])
        slice_of[far] = i
    assert slice_of[v0] == -1 and slice_of[u_max] == 0

    slice_maps = []
    for i in range(len(ladder)):
        verts = np.flatnonzero(slice_of == i)
        assert verts.size > 0, "empty slice layer"
        slice_maps.append(induced_subgraph(g, verts))
    return SliceDecomposition(g, v0, u_max, tuple(ladder), slice_of, dist_v0,
                              slice_maps)


def peel_slices(dec: SliceDecomposition, ecc_slices, w):
    """Assemble full eccentricities from per-slice pairs.

    Large-set vertices read d(z, v0) plus the center's weighted reach
    directly.  Slice vertices start from the max of their two recursive
    vectors (own weights / lifted weights) and then absorb, walking stages
    backward, the relayed eccentricity of their gate into every earlier
    slice.
    """
    g, n = dec.g, dec.g.n
    w = np.asarray(w, dtype=np.int64)
    eps = np.full(n, -1, dtype=np.int64)
    large = dec.large_mask()
    center_reach = int(dec.dist_v0[dec.u_max] + w[dec.u_max])
    eps[large] = dec.dist_v0[large] + center_reach

    slice_pos = np.full(n, -1, dtype=np.int64)
    for smap in dec.slice_maps:
        slice_pos[smap.to_parent] = np.arange(smap.child.n, dtype=np.int64)

    acc = np.full(n, -1, dtype=np.int64)
    for i in range(dec.ell - 1, -1, -1):
        smap = dec.slice_maps[i]
        e_plain, e_star = ecc_slices[i]
        gmap, dist, gate = dec.assignment(i)

        later = np.flatnonzero(dec.slice_of > i)
        if later.size:
            lc = gmap.to_child[later]
            gate_parent = gmap.to_parent[gate[lc]]
            relay = dist[lc] + e_plain[slice_pos[gate_parent]]
            acc[later] = np.maximum(acc[later], relay)

        own = np.maximum(e_plain, e_star)
        acc[smap.to_parent] = np.maximum(acc[smap.to_parent], own)

    sliced = ~large
    eps[sliced] = acc[sliced]
    assert int(eps.min()) >= 0
    return eps


@dataclass
class _Ctx:
    depth_limit: float
    stats: dict


def _base_case(g, w):
    if g.n == 1:
        return w.copy()
    a, b = int(w[0]), int(w[1])
    return np.array([max(a, 1 + b), max(b, 1 + a)], dtype=np.int64)


def _morse(g, w, depth, ctx):
    st = ctx.stats
    st["nodes"] += 1
    if depth > st["max_depth"]:
        st["max_depth"] = depth
    assert depth <= ctx.depth_limit, \
        f"recursion depth {depth} exceeds 2 ln^2(n)+2 = {ctx.depth_limit:.2f}"

    n = g.n
    if n <= 2:
        st["base_nodes"] += 1
        return _base_case(g, w)

    t = compute_theta_classes(g)
    sizes = halfspace_sizes_all(g, t)
    verdict = find_balanced_class(g, t, sizes)
    two_ln_n = 2.0 * math.log(n)

    if verdict.balanced:
        st["balanced_nodes"] += 1
        mask1 = t.halfspace_mask(verdict.cls, 1)
        verts0 = np.flatnonzero(~mask1)
        verts1 = np.flatnonzero(mask1)
        # balancedness is exactly the per-child size certificate
        assert verts0.size + verts1.size == n
        assert min(verts0.size, verts1.size) * two_ln_n >= float(n)
        m0 = induced_subgraph(g, verts0)
        m1 = induced_subgraph(g, verts1)
        e0 = _morse(m0.child, w[verts0], depth + 1, ctx)
        e1 = _morse(m1.child, w[verts1], depth + 1, ctx)
        return merge_balanced(g, t, verdict.cls, e0, e1)

    setup = unbalanced_setup(g, t, sizes, w)
    if isinstance(setup, CenterShortcut):
        st["center_shortcuts"] += 1
        return ecc_from_center(g, w, setup.v0)

    dec = setup
    st["unbalanced_nodes"] += 1
    recursive_load = 0
    for smap in dec.slice_maps:
        s = smap.child.n
        assert s * two_ln_n < float(n), "slice not below the balance threshold"
        recursive_load += 2 * s
    assert recursive_load <= n, "children exceed the parent's vertex budget"
    assert 2 * int(dec.large_mask().sum()) >= n, \
        "large set holds fewer than half the vertices"

    pairs = []
    for i, smap in enumerate(dec.slice_maps):
        e_plain = _morse(smap.child, w[smap.to_parent], depth + 1, ctx)
        lifted = dec.lifted_weights(i, w)
        assert int(lifted.max()) < _WSTAR_CAP, "lifted weights out of headroom"
        e_star = _morse(smap.child, lifted, depth + 1, ctx)
        pairs.append((e_plain, e_star))
    return peel_slices(dec, pairs, w)


def morse(g: Graph, w=None, stats=None) -> np.ndarray:
    """Exact weighted eccentricities eps(u) = max_v d(u,v) + w(v).

    Runs the balanced-split / dominant-center recursion.  Pass a dict as
    `stats` to receive node counts and the maximum recursion depth reached.
    """
    w = zero_weights(g.n) if w is None else validate_weights(w, g.n)
    if g.n >= 3:
        limit = 2.0 * math.log(g.n) ** 2 + 2.0
    else:
        limit = 2.0
    ctx = _Ctx(depth_limit=limit,
               stats={"nodes": 0, "base_nodes": 0, "balanced_nodes": 0,
                      "unbalanced_nodes": 0, "center_shortcuts": 0,
                      "max_depth": 0})
    out = _morse(g, w, 0, ctx)
    if stats is not None:
        stats.update(ctx.stats)
    return out
