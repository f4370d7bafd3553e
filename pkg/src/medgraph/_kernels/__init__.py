"""Kernel backend selection.

MEDGRAPH_BACKEND picks the implementation of the hot loops:

  jit   numba @njit compilation of loops.py (error if numba is unusable)
  py    vectorized numpy fallback
  auto  jit when numba imports, py otherwise (default)

Both backends return identical arrays, tie-breaks included; tests assert
this on a shared battery of graphs.
"""

import os

_KERNEL_NAMES = (
    "bfs_distances",
    "gated_bfs",
    "sigma_rows",
    "find_squares",
    "union_pairs",
)


def _jit_module():
    from numba import njit

    from . import loops

    class _Jit:
        pass

    mod = _Jit()
    for name in _KERNEL_NAMES:
        setattr(mod, name, njit(cache=True)(getattr(loops, name)))
    return mod


def _select():
    choice = os.environ.get("MEDGRAPH_BACKEND", "auto").strip().lower()
    if choice not in ("auto", "jit", "py"):
        raise ValueError(f"MEDGRAPH_BACKEND must be auto, jit or py, got {choice!r}")
    if choice in ("auto", "jit"):
        try:
            return _jit_module(), "jit"
        except ImportError:
            if choice == "jit":
                raise
    from . import numpy_backend

    return numpy_backend, "py"


_impl, BACKEND = _select()

bfs_distances = _impl.bfs_distances
gated_bfs = _impl.gated_bfs
sigma_rows = _impl.sigma_rows
find_squares = _impl.find_squares
union_pairs = _impl.union_pairs


def load_backend(name):
    """Explicit backend module, independent of the env selection (benchmarks)."""
    if name == "jit":
        return _jit_module()
    if name == "py":
        from . import numpy_backend

        return numpy_backend
    raise ValueError(f"unknown backend {name!r}")


def use_backend(name):
    """Rebind the active kernels in place (CLI bench --backend)."""
    global _impl, BACKEND
    _impl = load_backend(name)
    BACKEND = name
    g = globals()
    for kname in _KERNEL_NAMES:
        g[kname] = getattr(_impl, kname)
