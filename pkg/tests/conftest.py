"""Shared fixtures: the graph-family battery and two hand-built median graphs."""

from __future__ import annotations

import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from medgraph import build_graph, testkit

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", parent=settings.get_profile("default"),
                          max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def _build_families():
    """Small named battery covering every generator family."""
    return [
        ("single", testkit.path_graph(1)),
        ("edge", testkit.path_graph(2)),
        ("p3", testkit.path_graph(3)),
        ("p10", testkit.path_graph(10)),
        ("star3", testkit.star(3)),
        ("star7", testkit.star(7)),
        ("tree40", testkit.random_tree(40, seed=3)),
        ("grid2x3", testkit.grid([2, 3])),
        ("grid4x7", testkit.grid([4, 7])),
        ("grid3x3x3", testkit.grid([3, 3, 3])),
        ("q1", testkit.hypercube(1)),
        ("q3", testkit.hypercube(3)),
        ("q4", testkit.hypercube(4)),
        ("tree_x_path", testkit.cartesian_product(
            testkit.random_tree(8, seed=1), testkit.path_graph(4))),
        ("star_x_star", testkit.cartesian_product(
            testkit.star(4), testkit.star(3))),
        ("closure7", testkit.median_closure(7, 20, seed=1)),
        ("closure9", testkit.median_closure(9, 14, seed=2)),
        ("closure10", testkit.median_closure(10, 12, seed=5)),
    ]


FAMILIES = _build_families()


@pytest.fixture(params=[f[0] for f in FAMILIES])
def family_graph(request):
    """One graph of the battery per test invocation."""
    by_name = dict(FAMILIES)
    return request.param, by_name[request.param]


def rand_weights(n, seed, hi=10**6):
    rng = np.random.default_rng(seed)
    return rng.integers(0, hi + 1, size=n, dtype=np.int64)


# A hand-built 21-vertex median graph of dimension 3: a 2x3 grid block
# carrying two cube corners on its right flank, a square flap and pendant
# vertices on its left, and a square hung off the top.  Exercises classes
# of every flavor: a 6-edge class, two 4-edge cube classes, a 3-edge flap
# class, and several singletons.
DIM3_NAMES = [
    "g00", "g01", "g10", "g11", "g12", "g20", "g21", "g22",
    "f1", "f2", "f3", "p1", "p2", "s1", "s2",
    "r0", "r1", "t00", "t01", "t10", "t11",
]
_DIM3_EDGES_BY_NAME = [
    ("g00", "g01"), ("g00", "g10"), ("g01", "g11"), ("g10", "g11"),
    ("g10", "g20"), ("g11", "g21"), ("g20", "g21"),
    ("g11", "g12"), ("g12", "g22"), ("g21", "g22"),
    ("g11", "f1"), ("g01", "f3"), ("g12", "f2"),
    ("f1", "f3"), ("f1", "f2"), ("g01", "p1"),
    ("g12", "s1"), ("g22", "s2"), ("s1", "s2"),
    ("g20", "r0"), ("g21", "r1"), ("r0", "r1"),
    ("f3", "p2"),
    ("t00", "t01"), ("t00", "t10"), ("t01", "t11"), ("t10", "t11"),
    ("g20", "t00"), ("g21", "t01"), ("r0", "t10"), ("r1", "t11"),
]
DIM3_IDX = {name: i for i, name in enumerate(DIM3_NAMES)}
DIM3_EDGES = sorted(
    (min(DIM3_IDX[a], DIM3_IDX[b]), max(DIM3_IDX[a], DIM3_IDX[b]))
    for a, b in _DIM3_EDGES_BY_NAME
)


@pytest.fixture(scope="session")
def dim3_graph():
    return build_graph(len(DIM3_NAMES), DIM3_EDGES)


# A 20-vertex median graph that has no 3-balanced class at the top level:
# a hub carrying three pairwise-orthogonal squares (with their common cube
# corner), one square-pair deepened by an extra square, and five pendant
# 2-paths that keep every class small.  The deepened arm gives two distinct
# ladder fibers whose gates differ, which drives the multi-hop query path.
HUB_NAMES = [
    "hub", "a1", "a2", "a3", "c12", "c13", "c23", "c123", "b1", "d13",
    "q1a", "q1b", "q2a", "q2b", "q3a", "q3b", "q4a", "q4b", "q5a", "q5b",
]
_HUB_EDGES_BY_NAME = [
    ("hub", "a1"), ("hub", "a2"), ("hub", "a3"),
    ("a1", "c12"), ("a2", "c12"),
    ("a1", "c13"), ("a3", "c13"),
    ("a2", "c23"), ("a3", "c23"),
    ("c12", "c123"), ("c13", "c123"), ("c23", "c123"),
    ("a1", "b1"), ("c13", "d13"), ("b1", "d13"),
    ("hub", "q1a"), ("q1a", "q1b"),
    ("hub", "q2a"), ("q2a", "q2b"),
    ("hub", "q3a"), ("q3a", "q3b"),
    ("hub", "q4a"), ("q4a", "q4b"),
    ("hub", "q5a"), ("q5a", "q5b"),
]
HUB_IDX = {name: i for i, name in enumerate(HUB_NAMES)}
HUB_EDGES = sorted(
    (min(HUB_IDX[a], HUB_IDX[b]), max(HUB_IDX[a], HUB_IDX[b]))
    for a, b in _HUB_EDGES_BY_NAME
)


@pytest.fixture(scope="session")
def hub_graph():
    return build_graph(len(HUB_NAMES), HUB_EDGES)


def edge_class_of(g, t, a, b):
    """Class id of edge (a, b) given by endpoint ids."""
    u, v = (a, b) if a < b else (b, a)
    eid = {(int(x), int(y)): i for i, (x, y) in enumerate(zip(g.edges_u, g.edges_v))}
    return int(t.edge_class[eid[(u, v)]])


def same_partition(a, b) -> bool:
    """Two edge labelings induce the same partition of edge ids."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        return False
    pairs = np.unique(np.column_stack([a, b]), axis=0)
    return (len(np.unique(pairs[:, 0])) == len(pairs)
            and len(np.unique(pairs[:, 1])) == len(pairs))
