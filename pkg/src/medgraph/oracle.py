"""Exact-distance labels for median graphs, built by nested 1/3-balanced
splits, and the query engine that answers from labels alone.

Every vertex carries one record per level of a recursive decomposition:
while a cut class splits the subproblem with both sides at least a third
of it, the record stores the vertex's side plus its gate and distance into
the far side; once every class is lopsided, the subproblem has a single
center, the rest splits into fibers keyed by their ladder set toward the
center, and the record stores that ladder, the center distance, and one
(class, gate, distance) hop triplet into each one-class-smaller fiber.
A query walks the two record lists level-synchronously, hopping across
cuts and down fibers, and never touches the graph.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .graph import (Graph, GraphError, bfs_distances, build_graph, gated_bfs,
                    induced_subgraph)
from .theta import (boundaries, compute_theta_classes, halfspace_sizes_all,
                    ladder_table, median_set)


@dataclass(frozen=True, slots=True)
class BalancedRec:
    sub: int
    cls: int
    side: int
    gate: int
    dist: int


@dataclass(frozen=True, slots=True)
class UnbalancedRec:
    sub: int
    center: int
    ladder: tuple
    dist: int
    fibs: tuple  # ((removed class id, gate vertex id, gate distance), ...)


@dataclass(frozen=True, slots=True)
class CenterRec:
    sub: int


@dataclass(frozen=True, slots=True)
class LeafRec:
    sub: int
    partner: Optional[int]


@dataclass
class LabelTable:
    """Per-vertex record sequences plus a subproblem registry.

    records[v] is v's list of LevelRecords, ending in Center or Leaf.  All
    vertex ids inside records are top-level ids; class ids are local to
    their subproblem.  registry maps subproblem id -> (parent id, kind)
    and exists purely for diagnostics.
    """

    n: int
    records: list
    registry: dict = field(default_factory=dict)

    def depth(self):
        return max((len(r) for r in self.records), default=0)


def build_oracle(g: Graph) -> LabelTable:
    """Build distance labels for a median graph."""
    records = [[] for _ in range(g.n)]
    registry = {}
    counter = itertools.count()
    depth_limit = math.ceil(math.log(g.n, 1.5)) + 1 if g.n >= 2 else 1

    def build(sub, to_global, parent, depth):
        assert depth <= depth_limit, \
            f"oracle nesting {depth} beyond log_1.5(n)+1 = {depth_limit}"
        sid = next(counter)
        n = sub.n
        if n <= 2:
            registry[sid] = (parent, "leaf")
            if n == 1:
                records[int(to_global[0])].append(LeafRec(sid, None))
            else:
                a, b = int(to_global[0]), int(to_global[1])
                records[a].append(LeafRec(sid, b))
                records[b].append(LeafRec(sid, a))
            return

        t = compute_theta_classes(sub)
        sizes = halfspace_sizes_all(sub, t)
        mins = sizes.min(axis=1)
        c = int(np.argmax(mins))
        if int(mins[c]) * 3 >= n:
            registry[sid] = (parent, "balanced")
            _build_balanced(sub, to_global, t, c, sid, depth)
        else:
            registry[sid] = (parent, "unbalanced")
            _build_unbalanced(sub, to_global, t, sid, depth)

    def _build_balanced(sub, to_global, t, c, sid, depth):
        n = sub.n
        b0, b1 = boundaries(sub, t, c)
        mask1 = t.halfspace_mask(c, 1)
        verts0 = np.flatnonzero(~mask1)
        verts1 = np.flatnonzero(mask1)
        to1 = gated_bfs(sub, b1)
        to0 = gated_bfs(sub, b0)
        for u in verts0:
            records[int(to_global[u])].append(BalancedRec(
                sid, c, 0, int(to_global[to1.gate[u]]), int(to1.dist[u])))
        for u in verts1:
            records[int(to_global[u])].append(BalancedRec(
                sid, c, 1, int(to_global[to0.gate[u]]), int(to0.dist[u])))
        assert 3 * verts0.size <= 2 * n and 3 * verts1.size <= 2 * n, \
            "balanced child above two thirds of its parent"
        m0 = induced_subgraph(sub, verts0)
        m1 = induced_subgraph(sub, verts1)
        build(m0.child, to_global[verts0], sid, depth + 1)
        build(m1.child, to_global[verts1], sid, depth + 1)

    def _build_unbalanced(sub, to_global, t, sid, depth):
        n = sub.n
        med = median_set(sub, t)
        assert med.size == 1, \
            "no third-balanced class, yet the median set is not a single vertex"
        v0 = int(med[0])
        dist_v0 = bfs_distances(sub, v0)
        lt = ladder_table(sub, t, v0)
        records[int(to_global[v0])].append(CenterRec(sid))

        fibers = {}
        for x in range(n):
            if x == v0:
                continue
            lad = lt.ladders[x]
            assert lad, "non-center vertex with empty ladder"
            fibers.setdefault(lad, []).append(x)

        # bucket the edges: inside one fiber, or crossing between a fiber
        # and its one-class-smaller neighbor fiber
        inner = {lad: [] for lad in fibers}
        cross = {}
        ladders = lt.ladders
        eu, ev = sub.edges_u, sub.edges_v
        ecls = t.edge_class
        for eid in range(sub.m):
            a, b = int(eu[eid]), int(ev[eid])
            if a == v0 or b == v0:
                continue
            la, lb = ladders[a], ladders[b]
            if la == lb:
                inner[la].append((a, b))
                continue
            if len(la) < len(lb):
                a, b = b, a
                la, lb = lb, la
            cls = int(ecls[eid])
            assert len(la) == len(lb) + 1 and set(la) - set(lb) == {cls}, \
                "adjacent fibers differ by more than the edge's class"
            cross.setdefault((la, cls), []).append((a, b))

        hop_of = {}
        for lad, verts in fibers.items():
            if len(lad) < 2:
                continue  # the only smaller subset is empty: that way lies
                # the center, reached through the stored center distance
            hop_of[lad] = {}
            for cls in lad:
                sub_lad = tuple(x for x in lad if x != cls)
                assert sub_lad in fibers, \
                    "one-class-smaller fiber missing; structure corrupted"
                pairs = cross.get((lad, cls))
                assert pairs, "no edges toward a one-class-smaller fiber"
                hop_of[lad][cls] = _fiber_hops(
                    verts, inner[lad], pairs, ladders, sub_lad)

        for lad, verts in fibers.items():
            hops = hop_of.get(lad, {})
            for x in verts:
                fibs = []
                if hops:
                    for cls in lad:
                        gx, dx = hops[cls][x]
                        fibs.append((cls, int(to_global[gx]), int(dx)))
                records[int(to_global[x])].append(UnbalancedRec(
                    sid, int(to_global[v0]), lad, int(dist_v0[x]),
                    tuple(fibs)))

        for lad, verts in fibers.items():
            varr = np.array(sorted(verts), dtype=np.int64)
            assert 3 * varr.size < n, "fiber is not a minority halfspace subset"
            fmap = induced_subgraph(sub, varr)
            build(fmap.child, to_global[varr], sid, depth + 1)

    build(g, np.arange(g.n, dtype=np.int64), -1, 1)
    table = LabelTable(g.n, records, registry)
    for recs in table.records:
        assert recs and isinstance(recs[-1], (CenterRec, LeafRec))
    return table


def _fiber_hops(fiber_verts, inner_pairs, cross_pairs, ladders, target_ladder):
    """Gates and distances from one fiber into a one-class-smaller fiber.

    Runs a gated BFS over the auxiliary graph made of the fiber, the
    crossing edges, and their far endpoints; distances within the fiber
    plus one crossing step meet every geodesic into the smaller fiber.
    Returns {fiber vertex: (gate, dist)} in subproblem-local ids.
    """
    far = sorted({b for _, b in cross_pairs})
    verts = np.array(sorted(fiber_verts) + far, dtype=np.int64)
    local = {int(v): i for i, v in enumerate(verts)}

    edges = [(local[a], local[b]) for a, b in inner_pairs]
    edges += [(local[a], local[b]) for a, b in cross_pairs]
    aux = build_graph(len(verts), np.array(edges, dtype=np.int64),
                      validate=False)

    seeds = np.array([local[b] for b in far], dtype=np.int64)
    ga = gated_bfs(aux, seeds)
    out = {}
    for a in fiber_verts:
        la = local[a]
        gate = int(verts[ga.gate[la]])
        assert ladders[gate] == target_ladder, \
            "hop gate's ladder is not one class smaller"
        out[a] = (gate, int(ga.dist[la]))
    return out


def query(table: LabelTable, u: int, v: int) -> int:
    """Exact hop distance between u and v, from labels alone."""
    d, _ = query_with_stats(table, u, v)
    return d


def query_with_stats(table: LabelTable, u: int, v: int):
    """(distance, number of record fetches) for one query."""
    n = table.n
    if not (0 <= u < n and 0 <= v < n):
        raise GraphError("vertex id out of range")
    records = table.records
    lookups = 0
    total = 0
    k = 0
    while True:
        if u == v:
            return total, lookups
        ru = records[u][k]
        rv = records[v][k]
        lookups += 2
        if ru.sub != rv.sub:
            raise GraphError("foreign vertex / corrupted table")

        kind = type(ru)
        if kind is LeafRec:
            return total + 1, lookups
        if kind is BalancedRec:
            if ru.side == rv.side:
                k += 1
                continue
            total += ru.dist
            u = ru.gate
            k += 1
            continue
        if kind is CenterRec:
            return total + rv.dist, lookups
        if type(rv) is CenterRec:
            return total + ru.dist, lookups

        lu, lv = ru.ladder, rv.ladder
        if lu == lv:
            k += 1
            continue
        inter = set(lu) & set(lv)
        if not inter:
            return total + ru.dist + rv.dist, lookups
        # hop each side down to the common fiber, largest class first
        while set(ru.ladder) != inter:
            cls = max(set(ru.ladder) - inter)
            hop = _hop(ru, cls)
            total += hop[2]
            u = hop[1]
            ru = records[u][k]
            lookups += 1
        while set(rv.ladder) != inter:
            cls = max(set(rv.ladder) - inter)
            hop = _hop(rv, cls)
            total += hop[2]
            v = hop[1]
            rv = records[v][k]
            lookups += 1
        k += 1


def _hop(rec, cls):
    for trip in rec.fibs:
        if trip[0] == cls:
            return trip
    raise GraphError("missing fiber triplet; corrupted table")


def ladder_sequence(lu, lv):
    """Single-class steps from lu down to lu∩lv and up to lv.

    Removals run in descending class id, additions in ascending id."""
    lu = tuple(sorted(set(int(x) for x in lu)))
    lv = tuple(sorted(set(int(x) for x in lv)))
    inter = set(lu) & set(lv)
    seq = [lu]
    cur = set(lu)
    for c in sorted(cur - inter, reverse=True):
        cur.remove(c)
        seq.append(tuple(sorted(cur)))
    for c in sorted(set(lv) - inter):
        cur.add(c)
        seq.append(tuple(sorted(cur)))
    return seq


def label_size_bits(table: LabelTable):
    """(max, mean) label size under the fixed bit-accounting convention.

    Vertex ids, class ids, and distances cost ceil(log2 n) bits each; a side
    bit costs 1; a ladder holds |L| class ids; a fiber triplet holds three
    fields.  Center/Leaf markers and subproblem ids are plumbing and free.
    """
    c = math.ceil(math.log2(table.n)) if table.n > 1 else 0
    sizes = []
    for recs in table.records:
        bits = 0
        for r in recs:
            if isinstance(r, BalancedRec):
                bits += 3 * c + 1
            elif isinstance(r, UnbalancedRec):
                bits += (len(r.ladder) + 1) * c + 3 * len(r.fibs) * c
        sizes.append(bits)
    return max(sizes), float(np.mean(sizes))


def save_labels(table: LabelTable, path):
    """Write labels as versioned line-oriented text."""
    lines = [f"MEDDO 1 {table.n}"]
    for vid in range(table.n):
        recs = table.records[vid]
        lines.append(f"{vid} {len(recs)}")
        for r in recs:
            if isinstance(r, BalancedRec):
                lines.append(f"B {r.sub} {r.cls} {r.side} {r.gate} {r.dist}")
            elif isinstance(r, UnbalancedRec):
                parts = [f"U {r.sub} {r.center} {r.dist} {len(r.ladder)}"]
                parts += [str(x) for x in r.ladder]
                parts.append(str(len(r.fibs)))
                for cls, gate, dist in r.fibs:
                    parts += [str(cls), str(gate), str(dist)]
                lines.append(" ".join(parts))
            elif isinstance(r, CenterRec):
                lines.append(f"C {r.sub}")
            else:
                partner = "-" if r.partner is None else str(r.partner)
                lines.append(f"L {r.sub} {partner}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_labels(path) -> LabelTable:
    """Read a label file, validating structure and rebuilding the registry."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GraphError("empty label file")
    head = lines[0].split()
    if len(head) != 3 or head[0] != "MEDDO" or head[1] != "1":
        raise GraphError(f"bad label header {lines[0]!r}")
    n = _int(head[2])
    pos = 1
    records = []
    for vid in range(n):
        if pos >= len(lines):
            raise GraphError("label file truncated")
        a = lines[pos].split()
        pos += 1
        if len(a) != 2 or _int(a[0]) != vid:
            raise GraphError(f"expected vertex {vid} header, got {a!r}")
        cnt = _int(a[1])
        recs = []
        for _ in range(cnt):
            if pos >= len(lines):
                raise GraphError("label file truncated")
            recs.append(_parse_record(lines[pos], n))
            pos += 1
        if not recs or not isinstance(recs[-1], (CenterRec, LeafRec)):
            raise GraphError(f"vertex {vid}: records do not end in a marker")
        records.append(recs)
    if pos != len(lines):
        raise GraphError("trailing content in label file")

    registry = {}
    kinds = {BalancedRec: "balanced", UnbalancedRec: "unbalanced",
             CenterRec: "unbalanced", LeafRec: "leaf"}
    for recs in records:
        prev = -1
        for r in recs:
            kind = kinds[type(r)]
            seen = registry.get(r.sub)
            if seen is not None and seen[0] != prev:
                raise GraphError("inconsistent subproblem nesting")
            registry[r.sub] = (prev, kind)
            prev = r.sub
    return LabelTable(n, records, registry)


def _int(tok):
    try:
        return int(tok)
    except ValueError as exc:
        raise GraphError(f"bad integer {tok!r} in label file") from exc


def _parse_record(line, n):
    f = line.split()
    if not f:
        raise GraphError("empty record line")
    tag = f[0]
    if tag == "B":
        if len(f) != 6:
            raise GraphError(f"bad balanced record {line!r}")
        sub, cls, side, gate, dist = map(_int, f[1:])
        if side not in (0, 1) or not 0 <= gate < n or dist < 0:
            raise GraphError(f"bad balanced record {line!r}")
        return BalancedRec(sub, cls, side, gate, dist)
    if tag == "U":
        if len(f) < 5:
            raise GraphError(f"bad unbalanced record {line!r}")
        sub, center, dist, lsize = map(_int, f[1:5])
        rest = f[5:]
        if len(rest) < lsize + 1:
            raise GraphError(f"bad unbalanced record {line!r}")
        ladder = tuple(map(_int, rest[:lsize]))
        if list(ladder) != sorted(set(ladder)):
            raise GraphError(f"ladder not sorted in {line!r}")
        tcount = _int(rest[lsize])
        flat = rest[lsize + 1:]
        if len(flat) != 3 * tcount:
            raise GraphError(f"bad triplet count in {line!r}")
        fibs = []
        for i in range(tcount):
            cls, gate, d = map(_int, flat[3 * i:3 * i + 3])
            if not 0 <= gate < n or d < 0:
                raise GraphError(f"bad triplet in {line!r}")
            fibs.append((cls, gate, d))
        if [x[0] for x in fibs] != sorted(x[0] for x in fibs):
            raise GraphError(f"triplets not sorted in {line!r}")
        if not 0 <= center < n or dist < 0:
            raise GraphError(f"bad unbalanced record {line!r}")
        return UnbalancedRec(sub, center, ladder, dist, tuple(fibs))
    if tag == "C":
        if len(f) != 2:
            raise GraphError(f"bad center record {line!r}")
        return CenterRec(_int(f[1]))
    if tag == "L":
        if len(f) != 3:
            raise GraphError(f"bad leaf record {line!r}")
        partner = None if f[2] == "-" else _int(f[2])
        if partner is not None and not 0 <= partner < n:
            raise GraphError(f"bad leaf record {line!r}")
        return LeafRec(_int(f[1]), partner)
    raise GraphError(f"unknown record tag {tag!r}")
