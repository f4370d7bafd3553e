"""Median-graph algorithms: weighted eccentricities and a labeled distance oracle.

The package is organized around a small immutable :class:`~medgraph.graph.Graph`
container (CSR adjacency) plus pure functions:

- :mod:`medgraph.graph` — graph construction, BFS, gated BFS, subgraphs, I/O.
- :mod:`medgraph.theta` — edge-class partition, halfspaces, median set, ladders.
- :mod:`medgraph.ecc` — all weighted eccentricities via balanced/unbalanced
  recursion (:func:`morse`).
- :mod:`medgraph.oracle` — distance-label construction, queries, label I/O.
- :mod:`medgraph.testkit` — brute-force references and graph generators.
- :mod:`medgraph.cli` — command-line front end (``medgraph``).

Numeric kernels run through numba when available; set ``MEDGRAPH_BACKEND=py``
to force the pure-numpy fallback or ``MEDGRAPH_BACKEND=jit`` to require numba.
"""

from .graph import (
    MAX_WEIGHT,
    Graph,
    GraphError,
    NotMedianGraphError,
    bfs_distances,
    build_graph,
    gated_bfs,
    induced_subgraph,
    load_graph,
    load_weights,
    save_graph,
    save_weights,
    validate_weights,
    zero_weights,
)
from .theta import (
    ThetaPartition,
    boundaries,
    compute_theta_classes,
    halfspace_sizes_all,
    halfspace_sizes_minmaj,
    is_pof,
    ladder_table,
    median_set,
)
from .ecc import morse
from .oracle import (
    LabelTable,
    build_oracle,
    label_size_bits,
    ladder_sequence,
    load_labels,
    query,
    query_with_stats,
    save_labels,
)

__version__ = "0.1.0"

__all__ = [
    "MAX_WEIGHT",
    "Graph",
    "GraphError",
    "NotMedianGraphError",
    "bfs_distances",
    "build_graph",
    "gated_bfs",
    "induced_subgraph",
    "load_graph",
    "load_weights",
    "save_graph",
    "save_weights",
    "validate_weights",
    "zero_weights",
    "ThetaPartition",
    "boundaries",
    "compute_theta_classes",
    "halfspace_sizes_all",
    "halfspace_sizes_minmaj",
    "is_pof",
    "ladder_table",
    "median_set",
    "morse",
    "LabelTable",
    "build_oracle",
    "label_size_bits",
    "ladder_sequence",
    "load_labels",
    "query",
    "query_with_stats",
    "save_labels",
    "__version__",
]
