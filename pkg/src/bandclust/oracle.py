"""Trusted quadratic reference for adjacency-constrained Ward HAC.

Deliberately shares no machinery with the fast engine: linkages are
recomputed from scratch at every step by direct summation over the dense
similarity matrix (or directly from point coordinates), so agreement between
the two implementations is evidence of correctness rather than tautology.
"""

from __future__ import annotations

import numpy as np

from .band import BandMatrix, to_dense
from .engine import Dendrogram
from .errors import InputError

__all__ = ["cluster_naive", "euclidean_ward_check"]


def _run_constrained_hac(p, linkage_of):
    """Shared outer loop: intervals as (start, end) inclusive, leftmost ties."""
    bounds = [(i, i) for i in range(1, p + 1)]
    node = [-i for i in range(1, p + 1)]
    nm = p - 1
    left = np.empty(nm, dtype=np.int64)
    right = np.empty(nm, dtype=np.int64)
    heights = np.empty(nm, dtype=np.float64)
    starts = np.empty(nm, dtype=np.int64)
    splits = np.empty(nm, dtype=np.int64)
    ends = np.empty(nm, dtype=np.int64)
    for t in range(1, p):
        best_u = 0
        best_d = np.inf
        for u in range(len(bounds) - 1):
            d = linkage_of(bounds[u], bounds[u + 1])
            if d < best_d:  # strict: ties keep the leftmost pair
                best_d = d
                best_u = u
        u = best_u
        left[t - 1] = node[u]
        right[t - 1] = node[u + 1]
        heights[t - 1] = best_d
        starts[t - 1] = bounds[u][0]
        splits[t - 1] = bounds[u][1]
        ends[t - 1] = bounds[u + 1][1]
        bounds[u] = (bounds[u][0], bounds[u + 1][1])
        node[u] = t
        del bounds[u + 1]
        del node[u + 1]
    return Dendrogram(p=p, left=left, right=right, heights=heights,
                      starts=starts, splits=splits, ends=ends)


def cluster_naive(values) -> Dendrogram:
    """Literal constrained Ward HAC on a dense symmetric similarity matrix.

    Accepts a dense array or a BandMatrix (materialized with zeros outside
    the band). Every adjacent linkage is recomputed each step by direct
    double summation; cost is at least O(p^2).
    """
    if isinstance(values, BandMatrix):
        s = to_dense(values)
    else:
        s = np.asarray(values, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise InputError(f"similarity must be square, got shape {s.shape}")
    if not np.allclose(s, s.T):
        raise InputError("similarity must be symmetric")
    p = s.shape[0]

    def linkage_of(c1, c2):
        i1, j1 = c1
        i2, j2 = c2
        s1 = s[i1 - 1:j1, i1 - 1:j1].sum()
        s2 = s[i2 - 1:j2, i2 - 1:j2].sum()
        s12 = s[i1 - 1:j2, i1 - 1:j2].sum()
        return s1 / (j1 - i1 + 1) + s2 / (j2 - i2 + 1) - s12 / (j2 - i1 + 1)

    return _run_constrained_hac(p, linkage_of)


def euclidean_ward_check(points) -> Dendrogram:
    """Constrained Ward HAC from Euclidean coordinates via error sums of squares.

    The linkage is the direct variance increase
    ESS(C u C') - ESS(C) - ESS(C'), with no similarity matrix involved; used
    to validate the similarity-space linkage formula on Gram matrices.
    """
    x = np.asarray(points, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    p = x.shape[0]

    def ess(i, j):
        block = x[i - 1:j]
        centered = block - block.mean(axis=0)
        return float((centered ** 2).sum())

    def linkage_of(c1, c2):
        return ess(c1[0], c2[1]) - ess(*c1) - ess(*c2)

    return _run_constrained_hac(p, linkage_of)
