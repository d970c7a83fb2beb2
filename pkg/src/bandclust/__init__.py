"""Adjacency-constrained Ward clustering of banded similarity matrices.

Quasi-linear constrained hierarchical agglomerative clustering for ordered
objects whose similarity vanishes beyond a bandwidth h, with pencil-sum
tables for constant-time Ward linkages, a quadratic reference oracle, model
selection (broken stick, slope heuristic), dendrogram comparison metrics and
similarity builders for genotype (r^2) and contact-count (log) data.
"""

from .band import (
    BandMatrix,
    ContactMatrix,
    GenotypeMatrix,
    build_hic_log,
    build_ld_r2,
    from_coo,
    from_dense,
    shift_diagonal,
    to_dense,
)
from .compare import adjusted_rand, bakers_gamma, first_difference_index, rand_index
from .engine import (
    HAVE_COMPILED_CORE,
    Dendrogram,
    Partition,
    cluster,
    cluster_shifted,
    cut,
    read_merge_table,
    write_merge_table,
)
from .errors import BandClustError, InputError, NonFiniteError
from .oracle import cluster_naive, euclidean_ward_check
from .pencils import PencilTable, cluster_sum, precompute, ward_linkage
from .selection import (
    broken_stick_expectations,
    loss_curve,
    select_broken_stick,
    select_slope_heuristic,
)

__version__ = "0.1.0"

__all__ = [
    "BandMatrix", "ContactMatrix", "GenotypeMatrix",
    "build_hic_log", "build_ld_r2", "from_coo", "from_dense",
    "shift_diagonal", "to_dense",
    "adjusted_rand", "bakers_gamma", "first_difference_index", "rand_index",
    "HAVE_COMPILED_CORE", "Dendrogram", "Partition", "cluster",
    "cluster_shifted", "cut", "read_merge_table", "write_merge_table",
    "BandClustError", "InputError", "NonFiniteError",
    "cluster_naive", "euclidean_ward_check",
    "PencilTable", "cluster_sum", "precompute", "ward_linkage",
    "broken_stick_expectations", "loss_curve", "select_broken_stick",
    "select_slope_heuristic",
]
