"""Generators and brute-force oracles used to check the fast paths.

Everything here follows definitions directly and leans on scipy.sparse.csgraph
for distances, so none of the package's own BFS/theta machinery is on both
sides of a comparison.  Size guards keep the quadratic/cubic oracles at desk
scale; each guard can be lifted through an environment variable for extended
runs:

  MEDGRAPH_GUARD_BRUTE     brute_ecc / brute_median_set / all_pairs (default 4096)
  MEDGRAPH_GUARD_DJOKOVIC  djokovic_partition, O(m^2) pair scan (default 1024)
  MEDGRAPH_GUARD_VERIFY    full structural verification, O(n^3)-ish (default 256)
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, floyd_warshall, shortest_path

from .graph import Graph, GraphError, build_graph

_POPCOUNT = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(1)


def _guard(name, default, n):
    limit = int(os.environ.get(name, default))
    if n > limit:
        raise GraphError(
            f"n={n} above {name} guard {limit}; raise the env var for extended runs")


def _scipy_adj(g: Graph):
    data = np.ones(2 * g.m, dtype=np.int8)
    rows = np.concatenate([g.edges_u, g.edges_v])
    cols = np.concatenate([g.edges_v, g.edges_u])
    return csr_matrix((data, (rows, cols)), shape=(g.n, g.n))


def distance_rows(g: Graph, sources) -> np.ndarray:
    """Hop distances from the given sources to everything, via scipy BFS."""
    sources = np.asarray(sources, dtype=np.int64)
    if g.m == 0:
        return np.zeros((sources.size, g.n), dtype=np.int64)
    d = shortest_path(_scipy_adj(g), method="auto", unweighted=True, indices=sources)
    return d.astype(np.int64)


@dataclass(frozen=True)
class AllPairsOracle:
    matrix: np.ndarray

    def dist(self, u, v):
        return int(self.matrix[u, v])


def all_pairs(g: Graph) -> AllPairsOracle:
    _guard("MEDGRAPH_GUARD_BRUTE", 4096, g.n)
    return AllPairsOracle(distance_rows(g, np.arange(g.n)))


def all_pairs_fw(g: Graph) -> AllPairsOracle:
    """Floyd-Warshall variant, for cross-checking the BFS route on small inputs."""
    _guard("MEDGRAPH_GUARD_VERIFY", 256, g.n)
    d = floyd_warshall(_scipy_adj(g).astype(np.float64))
    return AllPairsOracle(d.astype(np.int64))


def brute_ecc(g: Graph, w) -> np.ndarray:
    """max_v d(u, v) + w(v) for every u, one BFS row at a time."""
    _guard("MEDGRAPH_GUARD_BRUTE", 4096, g.n)
    w = np.asarray(w, dtype=np.int64)
    out = np.empty(g.n, dtype=np.int64)
    for lo in range(0, g.n, 256):
        src = np.arange(lo, min(lo + 256, g.n))
        rows = distance_rows(g, src)
        out[src] = (rows + w[None, :]).max(axis=1)
    return out


def brute_median_set(g: Graph) -> np.ndarray:
    """argmin_u sum_v d(u, v), computed exhaustively."""
    _guard("MEDGRAPH_GUARD_BRUTE", 4096, g.n)
    totals = np.empty(g.n, dtype=np.int64)
    for lo in range(0, g.n, 256):
        src = np.arange(lo, min(lo + 256, g.n))
        totals[src] = distance_rows(g, src).sum(axis=1)
    return np.flatnonzero(totals == totals.min()).astype(np.int64)


def djokovic_partition(g: Graph) -> np.ndarray:
    """Edge classes from the distance-based relation, closed transitively.

    Edges uv and xy are related iff d(u,x)+d(v,y) != d(u,y)+d(v,x).  Labels
    are canonical: classes numbered by their smallest edge id.
    """
    _guard("MEDGRAPH_GUARD_DJOKOVIC", 1024, g.n)
    m = g.m
    if m == 0:
        return np.empty(0, dtype=np.int64)
    D = all_pairs(g).matrix
    u, v = g.edges_u, g.edges_v
    pairs_a = []
    pairs_b = []
    for i in range(m):
        du_x = D[u[i], u]
        du_y = D[u[i], v]
        dv_x = D[v[i], u]
        dv_y = D[v[i], v]
        rel = np.flatnonzero((du_x + dv_y) != (du_y + dv_x))
        rel = rel[rel > i]
        if rel.size:
            pairs_a.append(np.full(rel.size, i, dtype=np.int64))
            pairs_b.append(rel.astype(np.int64))
    if pairs_a:
        pa = np.concatenate(pairs_a)
        pb = np.concatenate(pairs_b)
        rel_graph = csr_matrix((np.ones(pa.size, np.int8), (pa, pb)), shape=(m, m))
        _, labels = connected_components(rel_graph, directed=False)
    else:
        labels = np.arange(m)
    first = np.full(int(labels.max()) + 1, m, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(m, dtype=np.int64))
    roots = first[labels]
    _, canon = np.unique(roots, return_inverse=True)
    return canon.astype(np.int64)


@dataclass
class StructureReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def add(self, msg):
        self.violations.append(msg)


def _is_convex(D, member, adj_list):
    """Geodesic convexity via first steps: a geodesic between members may
    never step outside the set."""
    verts = np.flatnonzero(member)
    for x in verts:
        outside = np.array([w for w in adj_list[x] if not member[w]], dtype=np.int64)
        if outside.size == 0:
            continue
        # any y in the set with a geodesic x -> y through an outside neighbor?
        dxy = D[x, verts]
        through = D[np.ix_(outside, verts)] + 1
        if (through == dxy[None, :]).any():
            return False
    return True


def verify_structure(g: Graph, t) -> StructureReport:
    """Definition-level verification of a theta partition.

    Checks, per class: perfect matching, exactly two components after
    removal, agreement of side indicators with those components, convexity
    of both halfspaces and both boundaries, and that the matching induces
    an isomorphism between the boundaries.
    """
    _guard("MEDGRAPH_GUARD_VERIFY", 256, g.n)
    rep = StructureReport()
    if t.q == 0:
        return rep
    D = all_pairs(g).matrix
    adj_list = [g.neighbors(v).tolist() for v in range(g.n)]
    edge_set = {(int(a), int(b)) for a, b in zip(g.edges_u, g.edges_v)}

    cover = np.zeros(g.m, dtype=bool)
    for c in range(t.q):
        eids = t.class_edges(c)
        cover[eids] = True
        u = g.edges_u[eids]
        v = g.edges_v[eids]
        touched = np.concatenate([u, v])
        if np.unique(touched).size != touched.size:
            rep.add(f"class {c}: not a matching")
            continue

        keep = np.ones(g.m, dtype=bool)
        keep[eids] = False
        ru = g.edges_u[keep]
        rv = g.edges_v[keep]
        red = csr_matrix(
            (np.ones(2 * ru.size, np.int8),
             (np.concatenate([ru, rv]), np.concatenate([rv, ru]))),
            shape=(g.n, g.n))
        ncomp, labels = connected_components(red, directed=False)
        if ncomp != 2:
            rep.add(f"class {c}: removal leaves {ncomp} components, not 2")
            continue
        side1 = labels != labels[0]
        if not np.array_equal(side1, t.halfspace_mask(c, 1)):
            rep.add(f"class {c}: side indicators disagree with components")
            continue

        mask0 = ~side1
        u_side1 = side1[u]
        b0 = np.where(u_side1, v, u)
        b1 = np.where(u_side1, u, v)
        bmask0 = np.zeros(g.n, dtype=bool)
        bmask0[b0] = True
        bmask1 = np.zeros(g.n, dtype=bool)
        bmask1[b1] = True
        for name, mask in (("halfspace0", mask0), ("halfspace1", side1),
                           ("boundary0", bmask0), ("boundary1", bmask1)):
            if not _is_convex(D, mask, adj_list):
                rep.add(f"class {c}: {name} not convex")

        mate = {}
        for a, b in zip(b0.tolist(), b1.tolist()):
            mate[a] = b
            mate[b] = a
        for i, a in enumerate(b0.tolist()):
            for b in b0.tolist()[i + 1:]:
                lo, hi = min(a, b), max(a, b)
                e_there = (lo, hi) in edge_set
                ma, mb = mate[a], mate[b]
                lo2, hi2 = min(ma, mb), max(ma, mb)
                e_back = (lo2, hi2) in edge_set
                if e_there != e_back:
                    rep.add(f"class {c}: matching is not a boundary isomorphism")
                    break
            else:
                continue
            break
    if not cover.all():
        rep.add("classes do not cover all edges")
    return rep


def is_median_graph(g: Graph, samples=100_000, seed=0) -> bool:
    """Unique-median test over vertex triples.

    Exhaustive for n <= 256 (interval bitsets); above that, `samples`
    seeded random triples.  Assumes g already passed construction checks
    (connected, bipartite).
    """
    n = g.n
    if n <= 2:
        return True
    if n <= 256:
        D = all_pairs(g).matrix.astype(np.int32)
        nb = (n + 7) >> 3
        iv = np.empty((n, n, nb), dtype=np.uint8)
        for x in range(n):
            on_geo = D[x][None, :] + D == D[x][:, None]
            iv[x] = np.packbits(on_geo, axis=1, bitorder="little")[:, :nb]
        for x in range(n):
            for y in range(x + 1, n):
                rows = iv[x][y][None, :] & iv[x][y + 1:] & iv[y][y + 1:]
                if (np.int64(_POPCOUNT[rows].sum(axis=1)) != 1).any():
                    return False
        return True
    rng = np.random.default_rng(seed)
    pool = rng.choice(n, size=min(n, 1024), replace=False)
    rows = {}
    for lo in range(0, pool.size, 256):
        chunk = pool[lo:lo + 256]
        dr = distance_rows(g, chunk)
        for i, s in enumerate(chunk):
            rows[int(s)] = dr[i]
    tri = rng.choice(pool, size=(samples, 3))
    for x, y, z in tri:
        s = rows[int(x)] + rows[int(y)] + rows[int(z)]
        mn = s.min()
        half = (rows[int(x)][y] + rows[int(y)][z] + rows[int(x)][z]) // 2
        if mn != half or (s == mn).sum() != 1:
            return False
    return True


# -- generators --------------------------------------------------------------

def path_graph(n: int) -> Graph:
    if n < 1:
        raise GraphError("path needs at least one vertex")
    i = np.arange(n - 1, dtype=np.int64)
    return build_graph(n, np.column_stack([i, i + 1]))


def random_tree(n: int, seed: int = 0) -> Graph:
    """Uniform random attachment tree: vertex i hangs off a random j < i."""
    if n < 1:
        raise GraphError("tree needs at least one vertex")
    rng = np.random.default_rng(seed)
    if n == 1:
        return build_graph(1, np.empty((0, 2), np.int64))
    parents = np.array([rng.integers(0, i) for i in range(1, n)], dtype=np.int64)
    child = np.arange(1, n, dtype=np.int64)
    return build_graph(n, np.column_stack([parents, child]))


def star(n_leaves: int) -> Graph:
    c = np.zeros(n_leaves, dtype=np.int64)
    return build_graph(n_leaves + 1, np.column_stack([c, np.arange(1, n_leaves + 1)]))


def cartesian_product(g1: Graph, g2: Graph) -> Graph:
    """Box product: (a, b) ~ (a', b) for a~a' and (a, b) ~ (a, b')."""
    n1, n2 = g1.n, g2.n
    a = np.arange(n1, dtype=np.int64)
    e2 = []
    if g2.m:
        left = (a[:, None] * n2 + g2.edges_u[None, :]).ravel()
        right = (a[:, None] * n2 + g2.edges_v[None, :]).ravel()
        e2.append(np.column_stack([left, right]))
    if g1.m:
        b = np.arange(n2, dtype=np.int64)
        left = (g1.edges_u[:, None] * n2 + b[None, :]).ravel()
        right = (g1.edges_v[:, None] * n2 + b[None, :]).ravel()
        e2.append(np.column_stack([left, right]))
    edges = np.concatenate(e2) if e2 else np.empty((0, 2), np.int64)
    return build_graph(n1 * n2, edges)


def grid(dims) -> Graph:
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise GraphError("grid dims must be positive")
    g = path_graph(dims[0])
    for d in dims[1:]:
        g = cartesian_product(g, path_graph(d))
    return g


def hypercube(k: int) -> Graph:
    if k < 0:
        raise GraphError("hypercube dimension must be >= 0")
    n = 1 << k
    x = np.arange(n, dtype=np.int64)
    edges = []
    for b in range(k):
        mask = (x >> b) & 1 == 0
        lo = x[mask]
        edges.append(np.column_stack([lo, lo | (1 << b)]))
    e = np.concatenate(edges) if edges else np.empty((0, 2), np.int64)
    return build_graph(n, e)


def _majority_close(masks: set, k: int) -> set:
    """Close a set of k-bit masks under coordinatewise majority."""
    seen = np.zeros(1 << k, dtype=bool)
    arr = np.array(sorted(masks), dtype=np.int64)
    seen[arr] = True
    frontier = arr
    while frontier.size:
        base = np.array(sorted(np.flatnonzero(seen)), dtype=np.int64)
        pa = base[:, None] & base[None, :]
        po = base[:, None] | base[None, :]
        new = []
        for f in frontier:
            vals = pa | (f & po)
            vals = vals[~seen[vals]]
            if vals.size:
                vals = np.unique(vals)
                seen[vals] = True
                new.append(vals)
        frontier = np.concatenate(new) if new else np.empty(0, np.int64)
    return {int(x) for x in np.flatnonzero(seen)}


def median_closure(k: int, points: int, seed: int = 0) -> Graph:
    """Induced subgraph of Q_k on the majority closure of random points.

    The closure is repaired to be connected: while the induced subgraph has
    several components, a greedy bit-flip path joins the two closest ones
    and the closure is recomputed.
    """
    if not 1 <= k <= 20:
        raise GraphError("closure dimension out of range")
    total = 1 << k
    points = max(1, min(points, total))
    rng = np.random.default_rng(seed)
    masks = {int(x) for x in rng.choice(total, size=points, replace=False)}
    while True:
        masks = _majority_close(masks, k)
        comps = _mask_components(masks, k)
        if len(comps) == 1:
            break
        # join the closest pair of components (ties: smallest masks)
        best = None
        for i in range(len(comps)):
            for j in range(i + 1, len(comps)):
                a_arr = np.array(comps[i], dtype=np.int64)
                b_arr = np.array(comps[j], dtype=np.int64)
                xor = a_arr[:, None] ^ b_arr[None, :]
                h = (_POPCOUNT[xor & 0xFF] + _POPCOUNT[(xor >> 8) & 0xFF]
                     + _POPCOUNT[(xor >> 16) & 0xFF])
                key = h * (np.int64(1) << 42) + a_arr[:, None] * (np.int64(1) << 21) \
                    + b_arr[None, :]
                ai, bi = np.unravel_index(np.argmin(key), key.shape)
                cand = (int(h[ai, bi]), int(a_arr[ai]), int(b_arr[bi]))
                if best is None or cand < best:
                    best = cand
        _, a, b = best
        x = a
        diff = a ^ b
        while diff:
            bit = diff & -diff
            x ^= bit
            masks.add(x)
            diff ^= bit
    verts = sorted(masks)
    index = {v: i for i, v in enumerate(verts)}
    edges = []
    for v in verts:
        for bpos in range(k):
            wmask = v | (1 << bpos)
            if wmask != v and wmask in index:
                edges.append((index[v], index[wmask]))
    e = np.array(edges, dtype=np.int64) if edges else np.empty((0, 2), np.int64)
    return build_graph(len(verts), e)


def _mask_components(masks: set, k: int):
    comps = []
    left = set(masks)
    while left:
        start = min(left)
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for bpos in range(k):
                w = v ^ (1 << bpos)
                if w in left and w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(seen))
        left -= seen
    return comps


def generate(spec: str, default_seed: int = 0) -> Graph:
    """Build a graph from a family spec string.

    Grammar: "path:N", "tree:N[,seed=S]", "grid:AxB[xC...]", "hypercube:K",
    "closure:k=K,p=P[,seed=S]", "product:SPEC|SPEC".
    """
    spec = spec.strip()
    if ":" not in spec:
        raise GraphError(f"malformed family spec {spec!r}")
    kind, _, rest = spec.partition(":")
    kind = kind.strip().lower()
    try:
        if kind == "path":
            return path_graph(int(rest))
        if kind in ("tree", "random_tree"):
            parts = rest.split(",")
            n = int(parts[0].split("=")[-1])
            seed = default_seed
            for p in parts[1:]:
                key, _, val = p.partition("=")
                if key.strip() == "seed":
                    seed = int(val)
                else:
                    raise GraphError(f"unknown tree option {key!r}")
            return random_tree(n, seed)
        if kind == "grid":
            return grid([int(d) for d in rest.lower().split("x")])
        if kind == "hypercube":
            return hypercube(int(rest))
        if kind == "closure":
            opts = {}
            for p in rest.split(","):
                key, _, val = p.partition("=")
                opts[key.strip()] = int(val)
            extra = set(opts) - {"k", "p", "seed"}
            if extra or "k" not in opts or "p" not in opts:
                raise GraphError(f"closure spec needs k=..,p=..[,seed=..], got {rest!r}")
            return median_closure(opts["k"], opts["p"], opts.get("seed", default_seed))
        if kind == "product":
            left, sep, right = rest.partition("|")
            if not sep:
                raise GraphError("product spec needs 'product:SPEC|SPEC'")
            return cartesian_product(generate(left, default_seed),
                                     generate(right, default_seed))
    except GraphError:
        raise
    except (ValueError, IndexError) as exc:
        raise GraphError(f"malformed family spec {spec!r}: {exc}") from exc
    raise GraphError(f"unknown family {kind!r}")
