"""Choosing the number of clusters from a dendrogram.

Two heuristics are provided. The broken-stick rule splits greedily from the
root and stops when the next split explains no more dispersion than the
largest expected piece of a randomly broken stick. The slope heuristic
penalizes the pseudo-inertia loss curve with a data-calibrated multiple of
log C(p-1, K-1), the number of contiguous partitions into K clusters.
"""

from __future__ import annotations

import heapq
import math
import warnings

import numpy as np
from scipy import stats

from .engine import Dendrogram
from .errors import InputError

__all__ = [
    "loss_curve",
    "broken_stick_expectations",
    "select_broken_stick",
    "log_binomial_shape",
    "select_slope_heuristic",
    "select_slope_from_loss",
]


def loss_curve(d: Dendrogram) -> np.ndarray:
    """Pseudo-inertia loss(K) for K = 1..p.

    loss(K) is the total variance-increase accumulated by the merges applied
    to reach K clusters, i.e. the sum of the first p - K merge heights;
    loss(p) = 0 and each split undoes one merge's height.
    """
    csum = np.concatenate(([0.0], np.cumsum(d.heights)))
    return csum[::-1].copy()  # index K-1 holds loss(K) = csum[p - K]


def broken_stick_expectations(n: int) -> np.ndarray:
    """Expected ordered proportions E_i = (1/n) * sum_{k=i..n} 1/k, i = 1..n."""
    if n < 1:
        raise InputError(f"n must be positive, got {n}")
    inv = 1.0 / np.arange(1, n + 1)
    return np.cumsum(inv[::-1])[::-1] / n


def select_broken_stick(d: Dendrogram) -> int:
    """Number of clusters from the broken-stick stopping rule.

    Splits greedily from the root, always undoing the available merge with
    the largest height. With i clusters, the unexplained dispersion R is the
    sum of the p - i remaining merge heights; the next split of gain g is
    accepted while g / R exceeds the expected largest piece of a stick broken
    into p - i parts. Negative heights are clamped to 0 for the proportions.
    """
    p = d.p
    if p < 2:
        return 1
    heights = d.heights
    if np.any(heights < 0):
        warnings.warn("negative merge heights clamped to 0 for broken-stick "
                      "proportions", stacklevel=2)
        heights = np.maximum(heights, 0.0)
    total = float(heights.sum())
    if total <= 0.0:
        return 1

    # max-heap of splittable clusters keyed by their root-merge height
    candidates = [(-heights[p - 2], p - 1)]  # (neg gain, merge index 1-based)
    remaining = total
    k = 1
    while candidates:
        n_pieces = p - k
        neg_gain, t = heapq.heappop(candidates)
        gain = -neg_gain
        e1 = sum(1.0 / j for j in range(1, n_pieces + 1)) / n_pieces
        if gain / remaining < e1:
            break
        k += 1
        remaining -= gain
        if remaining <= 0.0:
            break
        for child in (d.left[t - 1], d.right[t - 1]):
            if child > 0:
                heapq.heappush(candidates, (-heights[child - 1], int(child)))
    return k


def log_binomial_shape(p: int, k: int) -> float:
    """log C(p-1, k-1), the penalty shape; log-gamma keeps it finite for huge p."""
    return (math.lgamma(p) - math.lgamma(k) - math.lgamma(p - k + 1))


def select_slope_from_loss(loss: np.ndarray, p: int, k_max: int,
                           multiplier: float = 2.0,
                           fit_window=None) -> int:
    """Slope-heuristic selection from an explicit loss curve.

    ``loss[K-1]`` is the criterion value at K clusters. The slope is
    estimated by Theil-Sen regression of loss against the penalty shape over
    ``fit_window`` (a (lo, hi) inclusive K range; default the upper half of
    1..k_max), then K minimizing loss(K) + multiplier * s * shape(K) is
    returned, with s the magnitude of the fitted (negative) slope.
    """
    if k_max < 2:
        raise InputError(f"k_max must be at least 2, got {k_max}")
    if k_max > p:
        raise InputError(f"k_max={k_max} exceeds p={p}")
    shape = np.array([log_binomial_shape(p, k) for k in range(1, k_max + 1)])
    if fit_window is None:
        fit_window = (max(2, (k_max + 1) // 2), k_max)
    lo, hi = fit_window
    if not (1 <= lo < hi <= k_max):
        raise InputError(f"invalid fit window {fit_window} for k_max={k_max}")
    xs = shape[lo - 1:hi]
    ys = np.asarray(loss[lo - 1:hi], dtype=np.float64)
    slope = stats.theilslopes(ys, xs).slope
    s_hat = max(0.0, -float(slope))
    crit = loss[:k_max] + multiplier * s_hat * shape
    return int(np.argmin(crit)) + 1


def select_slope_heuristic(d: Dendrogram, k_max: int, multiplier: float = 2.0,
                           fit_window=None) -> int:
    """Slope-heuristic number of clusters for a dendrogram."""
    if not 2 <= k_max <= d.p:
        raise InputError(f"k_max must be in [2, p], got {k_max} with p={d.p}")
    return select_slope_from_loss(loss_curve(d), d.p, k_max,
                                  multiplier=multiplier, fit_window=fit_window)
