"""The jit and numpy kernel backends must agree element for element."""

import subprocess
import sys

import numpy as np
import pytest

from medgraph import _kernels, build_oracle, compute_theta_classes, morse, save_labels
from medgraph import testkit as tk

from conftest import rand_weights

JIT = _kernels.load_backend("jit")
PY = _kernels.load_backend("py")


def _lower_csr(g):
    """CSR of strictly-closer-to-basepoint neighborhoods (edge ids carried)."""
    dist = PY.bfs_distances(g.indptr, g.nbrs, 0, g.n)
    owner = np.repeat(np.arange(g.n, dtype=np.int64), np.diff(g.indptr))
    down = dist[g.nbrs] < dist[owner]
    counts = np.bincount(owner[down], minlength=g.n)
    indptr = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, g.nbrs[down], g.adj_eid[down]


class TestKernelParity:
    def test_bfs_distances(self, family_graph):
        _, g = family_graph
        for src in {0, g.n // 2, g.n - 1}:
            a = JIT.bfs_distances(g.indptr, g.nbrs, src, g.n)
            b = PY.bfs_distances(g.indptr, g.nbrs, src, g.n)
            assert np.array_equal(a, b)

    def test_gated_bfs(self, family_graph):
        _, g = family_graph
        seed_sets = [np.array([0], dtype=np.int64),
                     np.arange(g.n, dtype=np.int64)]
        t = compute_theta_classes(g)
        if t.q:
            seed_sets.append(np.flatnonzero(t.halfspace_mask(0, 0)))
        for seeds in seed_sets:
            da, ga = JIT.gated_bfs(g.indptr, g.nbrs, seeds, g.n)
            db, gb = PY.gated_bfs(g.indptr, g.nbrs, seeds, g.n)
            assert np.array_equal(da, db)
            assert np.array_equal(ga, gb)

    def test_find_squares_and_union(self, family_graph):
        _, g = family_graph
        indptr, nbrs, eids = _lower_csr(g)
        qa, sa = JIT.find_squares(indptr, nbrs, eids, g.n)
        qb, sb = PY.find_squares(indptr, nbrs, eids, g.n)
        assert sa == sb == 0
        assert np.array_equal(qa, qb)
        pa = np.concatenate([qa[:, 0], qa[:, 1]])
        pb = np.concatenate([qa[:, 3], qa[:, 2]])
        ra = JIT.union_pairs(g.m, pa, pb)
        rb = PY.union_pairs(g.m, pa, pb)
        assert np.array_equal(ra, rb)

    def test_sigma_rows(self, family_graph):
        _, g = family_graph
        t = compute_theta_classes(g)
        if t.q == 0:
            pytest.skip("no edges")
        args = (g.indptr, g.nbrs, g.adj_eid, t.edge_class,
                g.edges_u, g.edges_v, t.q, g.n)
        ra, st_a, bad_a = JIT.sigma_rows(*args)
        rb, st_b, bad_b = PY.sigma_rows(*args)
        assert np.array_equal(ra, rb)
        assert (st_a, bad_a) == (st_b, bad_b) == (0, -1)

    def test_bfs_matches_scipy_reference(self, family_graph):
        _, g = family_graph
        if g.n > 600:
            pytest.skip("quadratic reference capped")
        rows = tk.distance_rows(g, np.arange(g.n))
        for src in range(0, g.n, max(1, g.n // 7)):
            assert np.array_equal(
                PY.bfs_distances(g.indptr, g.nbrs, src, g.n), rows[src])


class TestLibraryLevelParity:
    """Whole-pipeline outputs stay bit-identical when the backend swaps."""

    @pytest.fixture(autouse=True)
    def _restore(self):
        saved = _kernels.BACKEND
        yield
        _kernels.use_backend(saved)

    @pytest.mark.parametrize("maker", [
        lambda: tk.median_closure(7, 20, seed=4),
        lambda: tk.grid((5, 6)),
        lambda: tk.random_tree(90, seed=6),
    ])
    def test_morse_identical(self, maker):
        g = maker()
        w = rand_weights(g.n, 3)
        _kernels.use_backend("py")
        ecc_py = morse(g, w)
        _kernels.use_backend("jit")
        ecc_jit = morse(g, w)
        assert np.array_equal(ecc_py, ecc_jit)

    def test_oracle_serialization_identical(self, tmp_path):
        g = tk.median_closure(6, 16, seed=8)
        _kernels.use_backend("py")
        save_labels(build_oracle(g), tmp_path / "py.lbl")
        _kernels.use_backend("jit")
        save_labels(build_oracle(g), tmp_path / "jit.lbl")
        assert (tmp_path / "py.lbl").read_bytes() == \
            (tmp_path / "jit.lbl").read_bytes()


class TestSelection:
    def test_use_backend_rebinds_names(self):
        saved = _kernels.BACKEND
        try:
            _kernels.use_backend("py")
            assert _kernels.BACKEND == "py"
            assert _kernels.bfs_distances is PY.bfs_distances
            _kernels.use_backend("jit")
            assert _kernels.BACKEND == "jit"
            assert _kernels.bfs_distances is not PY.bfs_distances
        finally:
            _kernels.use_backend(saved)

    def test_load_backend_rejects_unknown(self):
        with pytest.raises(ValueError):
            _kernels.load_backend("fortran")

    @pytest.mark.parametrize("env,expected", [("py", "py"), ("jit", "jit"),
                                              ("auto", "jit")])
    def test_env_selection(self, env, expected):
        out = subprocess.run(
            [sys.executable, "-c",
             "from medgraph import _kernels; print(_kernels.BACKEND)"],
            capture_output=True, text=True,
            env={"PATH": "/usr/bin:/bin", "MEDGRAPH_BACKEND": env},
            cwd="/root/pkg",
        )
        assert out.returncode == 0, out.stderr
        assert out.stdout.strip() == expected

    def test_env_rejects_unknown(self):
        out = subprocess.run(
            [sys.executable, "-c", "import medgraph"],
            capture_output=True, text=True,
            env={"PATH": "/usr/bin:/bin", "MEDGRAPH_BACKEND": "brainfuck"},
            cwd="/root/pkg",
        )
        assert out.returncode != 0
        assert "MEDGRAPH_BACKEND" in out.stderr
