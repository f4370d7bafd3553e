"""Reference oracles, structure checks, generators, and size guards."""

import numpy as np
import pytest

from medgraph import GraphError, build_graph, compute_theta_classes, testkit as tk

from conftest import rand_weights


def _c6():
    return build_graph(6, np.array([[0, 1], [1, 2], [2, 3], [3, 4], [4, 5], [0, 5]]))


def _k23():
    return build_graph(
        5, np.array([[0, 2], [0, 3], [0, 4], [1, 2], [1, 3], [1, 4]]))


def _q3_minus_corner():
    return build_graph(
        7,
        np.array([[0, 1], [0, 2], [0, 4], [1, 3], [1, 5], [2, 3], [2, 6],
                  [4, 5], [4, 6]]))


class TestDistances:
    def test_all_pairs_path(self):
        D = tk.all_pairs(tk.path_graph(4)).matrix
        i = np.arange(4)
        assert np.array_equal(D, np.abs(i[:, None] - i[None, :]))

    def test_floyd_warshall_agrees(self, family_graph):
        _, g = family_graph
        if g.n > 256:
            pytest.skip("cubic reference capped")
        assert np.array_equal(tk.all_pairs(g).matrix, tk.all_pairs_fw(g).matrix)

    def test_oracle_dist_symmetric(self):
        o = tk.all_pairs(tk.grid((3, 4)))
        assert o.dist(2, 9) == o.dist(9, 2)
        assert o.dist(5, 5) == 0

    def test_distance_rows_subset(self):
        g = tk.hypercube(3)
        rows = tk.distance_rows(g, [1, 6])
        D = tk.all_pairs(g).matrix
        assert np.array_equal(rows[0], D[1])
        assert np.array_equal(rows[1], D[6])


class TestBruteForce:
    def test_ecc_path3(self):
        assert tk.brute_ecc(tk.path_graph(3), np.zeros(3, np.int64)).tolist() == \
            [2, 1, 2]

    def test_ecc_single_vertex_is_own_weight(self):
        assert tk.brute_ecc(tk.path_graph(1), np.array([7])).tolist() == [7]

    def test_ecc_is_max_over_dist_plus_weight(self):
        g = tk.grid((2, 3))
        w = rand_weights(g.n, 5)
        D = tk.all_pairs(g).matrix
        assert np.array_equal(tk.brute_ecc(g, w), (D + w[None, :]).max(axis=1))

    def test_median_set_star(self):
        assert tk.brute_median_set(tk.star(6)).tolist() == [0]

    def test_median_set_path4_two_middles(self):
        assert tk.brute_median_set(tk.path_graph(4)).tolist() == [1, 2]

    def test_median_set_hypercube_everything(self):
        assert tk.brute_median_set(tk.hypercube(4)).tolist() == list(range(16))


class TestDjokovic:
    def test_path_singletons(self):
        assert tk.djokovic_partition(tk.path_graph(3)).tolist() == [0, 1]

    def test_tree_every_edge_own_class(self):
        g = tk.random_tree(30, seed=4)
        lab = tk.djokovic_partition(g)
        assert sorted(lab.tolist()) == list(range(g.m))

    def test_hypercube_directions(self):
        lab = tk.djokovic_partition(tk.hypercube(3))
        assert np.unique(lab).size == 3
        assert np.bincount(lab).tolist() == [4, 4, 4]

    def test_c6_pairs_opposite_edges(self):
        assert tk.djokovic_partition(_c6()).tolist() == [0, 1, 2, 1, 0, 2]


class TestIsMedianGraph:
    def test_true_on_battery(self, family_graph):
        _, g = family_graph
        if g.n > 256:
            pytest.skip("exhaustive check capped")
        assert tk.is_median_graph(g)

    def test_six_cycle(self):
        assert not tk.is_median_graph(_c6())

    def test_complete_bipartite_23(self):
        assert not tk.is_median_graph(_k23())

    def test_cube_minus_corner(self):
        # still a partial cube, but three corners lose their unique median
        assert not tk.is_median_graph(_q3_minus_corner())

    def test_sampled_branch_finds_violation(self):
        big = tk.cartesian_product(_c6(), tk.path_graph(50))
        assert big.n == 300
        assert not tk.is_median_graph(big, samples=3000)

    def test_sampled_branch_accepts_grid(self):
        assert tk.is_median_graph(tk.grid((20, 20)), samples=2000)


class _Relabeled:
    """Wrap a partition, overriding halfspace sides (for negative tests)."""

    def __init__(self, base, flip_class):
        self._base = base
        self._flip = flip_class
        self.q = base.q

    def class_edges(self, c):
        return self._base.class_edges(c)

    def halfspace_mask(self, c, side):
        if c == self._flip:
            side = 1 - side
        return self._base.halfspace_mask(c, side)


class _EdgeLabelPartition:
    """Adapt a raw edge -> class array to the partition interface."""

    def __init__(self, g, labels):
        self._g = g
        self._labels = np.asarray(labels)
        self.q = int(self._labels.max()) + 1 if self._labels.size else 0

    def class_edges(self, c):
        return np.flatnonzero(self._labels == c)

    def halfspace_mask(self, c, side):
        from scipy.sparse import csr_matrix
        from scipy.sparse.csgraph import connected_components
        g = self._g
        keep = self._labels != c
        u, v = g.edges_u[keep], g.edges_v[keep]
        m = csr_matrix(
            (np.ones(2 * u.size, np.int8),
             (np.concatenate([u, v]), np.concatenate([v, u]))),
            shape=(g.n, g.n))
        _, lab = connected_components(m, directed=False)
        return (lab != lab[0]) if side == 1 else (lab == lab[0])


class TestVerifyStructure:
    def test_clean_on_cube(self):
        g = tk.hypercube(3)
        rep = tk.verify_structure(g, compute_theta_classes(g))
        assert rep.ok and rep.violations == []

    def test_clean_on_grid(self):
        g = tk.grid((2, 3))
        assert tk.verify_structure(g, compute_theta_classes(g)).ok

    def test_flags_flipped_sides(self):
        g = tk.grid((2, 3))
        t = _Relabeled(compute_theta_classes(g), flip_class=0)
        rep = tk.verify_structure(g, t)
        assert not rep.ok
        assert any("side indicators" in v for v in rep.violations)

    def test_flags_non_matching(self):
        g = tk.hypercube(2)
        t = _EdgeLabelPartition(g, np.zeros(g.m, np.int64))  # all edges merged
        rep = tk.verify_structure(g, t)
        assert any("not a matching" in v for v in rep.violations)

    def test_flags_wrong_component_count(self):
        g = tk.hypercube(2)
        # one lonely edge in class 0: removing it keeps the square connected
        t = _EdgeLabelPartition(g, np.array([0, 1, 1, 2]))
        rep = tk.verify_structure(g, t)
        assert any("components" in v or "matching" in v for v in rep.violations)

    def test_six_cycle_boundaries_not_convex(self):
        g = _c6()
        t = _EdgeLabelPartition(g, tk.djokovic_partition(g))
        rep = tk.verify_structure(g, t)
        assert not rep.ok
        assert len(rep.violations) == 6
        assert all("not convex" in v and "boundary" in v for v in rep.violations)


class TestGenerators:
    def test_path(self):
        g = tk.path_graph(5)
        assert (g.n, g.m) == (5, 4)
        with pytest.raises(GraphError):
            tk.path_graph(0)

    def test_random_tree_deterministic(self):
        a = tk.random_tree(40, seed=7)
        b = tk.random_tree(40, seed=7)
        c = tk.random_tree(40, seed=8)
        assert np.array_equal(a.edges_u, b.edges_u)
        assert np.array_equal(a.edges_v, b.edges_v)
        assert a.m == 39
        assert not (np.array_equal(a.edges_u, c.edges_u)
                    and np.array_equal(a.edges_v, c.edges_v))

    def test_star(self):
        g = tk.star(4)
        assert (g.n, g.m) == (5, 4)
        assert g.degree(0) == 4

    def test_grid(self):
        g = tk.grid((3, 4))
        assert (g.n, g.m) == (12, 17)
        with pytest.raises(GraphError):
            tk.grid((3, 0))
        with pytest.raises(GraphError):
            tk.grid(())

    def test_hypercube(self):
        g = tk.hypercube(3)
        assert (g.n, g.m) == (8, 12)
        assert tk.hypercube(0).n == 1
        with pytest.raises(GraphError):
            tk.hypercube(-1)

    def test_product_counts(self):
        g1, g2 = tk.random_tree(5, 1), tk.path_graph(4)
        p = tk.cartesian_product(g1, g2)
        assert p.n == g1.n * g2.n
        assert p.m == g1.n * g2.m + g2.n * g1.m
        assert tk.is_median_graph(p)

    def test_closure_median_and_connected(self):
        for seed in range(6):
            g = tk.median_closure(6, 14, seed=seed)
            assert tk.is_median_graph(g), seed

    def test_closure_deterministic(self):
        a = tk.median_closure(7, 20, seed=3)
        b = tk.median_closure(7, 20, seed=3)
        assert (a.n, a.m) == (b.n, b.m)
        assert np.array_equal(a.edges_u, b.edges_u)

    def test_closure_known_instance(self):
        g = tk.median_closure(8, 12, seed=1)
        assert (g.n, g.m) == (160, 560)
        assert tk.is_median_graph(g)

    def test_closure_point_count_clamped(self):
        g = tk.median_closure(2, 100)
        assert (g.n, g.m) == (4, 4)

    def test_closure_dimension_range(self):
        with pytest.raises(GraphError):
            tk.median_closure(0, 5)
        with pytest.raises(GraphError):
            tk.median_closure(21, 5)


class TestGenerate:
    @pytest.mark.parametrize(
        "spec,n,m",
        [
            ("path:5", 5, 4),
            ("grid:3x4", 12, 17),
            ("hypercube:4", 16, 32),
            ("product:path:3|path:4", 12, 17),
            ("closure:k=5,p=10,seed=2", 18, 35),
        ],
    )
    def test_spec_shapes(self, spec, n, m):
        g = tk.generate(spec)
        assert (g.n, g.m) == (n, m)

    def test_tree_spec_matches_generator(self):
        a = tk.generate("tree:12,seed=3")
        b = tk.random_tree(12, seed=3)
        assert np.array_equal(a.edges_u, b.edges_u)
        assert np.array_equal(a.edges_v, b.edges_v)

    def test_default_seed_flows_through(self):
        a = tk.generate("tree:9", default_seed=5)
        b = tk.random_tree(9, seed=5)
        assert np.array_equal(a.edges_u, b.edges_u)

    @pytest.mark.parametrize(
        "spec",
        [
            "blah",
            "path",
            "path:x",
            "grid:3y4",
            "grid:",
            "hypercube:",
            "closure:k=3",
            "closure:p=4",
            "closure:k=3,p=4,extra=1",
            "product:path:3",
            "tree:10,foo=2",
            "torus:3",
        ],
    )
    def test_malformed_specs_rejected(self, spec):
        with pytest.raises(GraphError):
            tk.generate(spec)


class TestGuards:
    def test_brute_guard_env_override(self, monkeypatch):
        g = tk.path_graph(11)
        monkeypatch.setenv("MEDGRAPH_GUARD_BRUTE", "10")
        with pytest.raises(GraphError, match="guard"):
            tk.all_pairs(g)
        with pytest.raises(GraphError, match="guard"):
            tk.brute_ecc(g, np.zeros(11, np.int64))
        monkeypatch.setenv("MEDGRAPH_GUARD_BRUTE", "11")
        assert tk.all_pairs(g).matrix.shape == (11, 11)

    def test_djokovic_guard(self, monkeypatch):
        g = tk.path_graph(6)
        monkeypatch.setenv("MEDGRAPH_GUARD_DJOKOVIC", "5")
        with pytest.raises(GraphError, match="guard"):
            tk.djokovic_partition(g)

    def test_verify_guard(self, monkeypatch):
        g = tk.path_graph(5)
        monkeypatch.setenv("MEDGRAPH_GUARD_VERIFY", "4")
        with pytest.raises(GraphError, match="guard"):
            tk.all_pairs_fw(g)
        with pytest.raises(GraphError, match="guard"):
            tk.verify_structure(g, compute_theta_classes(g))

    def test_verify_guard_default(self):
        g = tk.path_graph(257)
        with pytest.raises(GraphError, match="guard"):
            tk.all_pairs_fw(g)
