"""Agreement metrics between dendrograms and between partitions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .engine import Dendrogram, Partition
from .errors import InputError

__all__ = [
    "first_difference_index",
    "bakers_gamma",
    "BakersGammaResult",
    "adjusted_rand",
    "rand_index",
]


def first_difference_index(d1: Dendrogram, d2: Dendrogram) -> float:
    """t / (p - 1) where t is the number of leading identical merges.

    Merges are identical when they join the same child pair (same interval
    extents and split point); heights are ignored.
    """
    if d1.p != d2.p:
        raise InputError(f"dendrograms have different p: {d1.p} vs {d2.p}")
    p = d1.p
    if p == 1:
        return 1.0
    same = ((d1.starts == d2.starts) & (d1.splits == d2.splits)
            & (d1.ends == d2.ends))
    diff = np.flatnonzero(~same)
    t = p - 1 if diff.size == 0 else int(diff[0])
    return t / (p - 1)


def _boundary_steps(d: Dendrogram) -> np.ndarray:
    """steps[b-1] = merge index removing the boundary between b and b+1."""
    steps = np.empty(d.p - 1, dtype=np.int64)
    steps[d.splits - 1] = np.arange(1, d.p, dtype=np.int64)
    return steps


@dataclass(frozen=True)
class BakersGammaResult:
    value: float
    exact: bool
    n_pairs: int
    seed: int | None


def bakers_gamma(d1: Dendrogram, d2: Dendrogram, exact_cap: int = 2000,
                 n_samples: int = 100_000, seed: int = 0) -> BakersGammaResult:
    """Spearman correlation of pairwise fusion steps (average-rank ties).

    For contiguous dendrograms the step at which objects i < j first share a
    cluster is the latest removal step among the boundaries i..j-1. All
    p(p-1)/2 pairs are used when p <= exact_cap; beyond that, n_samples pairs
    are drawn uniformly with the given seed.
    """
    if d1.p != d2.p:
        raise InputError(f"dendrograms have different p: {d1.p} vs {d2.p}")
    p = d1.p
    if p < 2:
        raise InputError("Baker's Gamma requires p >= 2")
    t1 = _boundary_steps(d1)
    t2 = _boundary_steps(d2)
    if p <= exact_cap:
        r1 = np.concatenate([np.maximum.accumulate(t1[i:]) for i in range(p - 1)])
        r2 = np.concatenate([np.maximum.accumulate(t2[i:]) for i in range(p - 1)])
        if np.array_equal(r1, r2):  # exact 1.0, not 1 - eps from the rank fit
            value = 1.0
        else:
            value = float(stats.spearmanr(r1, r2).statistic)
        return BakersGammaResult(value=value, exact=True, n_pairs=r1.size, seed=None)
    rng = np.random.default_rng(seed)
    i = rng.integers(1, p, size=n_samples)
    j = rng.integers(1, p, size=n_samples)
    lo = np.minimum(i, j)
    hi = np.maximum(i, j)
    hi = np.where(lo == hi, hi + 1, hi)  # force i < j
    r1 = np.array([t1[a - 1:b - 1].max() for a, b in zip(lo, hi)])
    r2 = np.array([t2[a - 1:b - 1].max() for a, b in zip(lo, hi)])
    value = float(stats.spearmanr(r1, r2).statistic)
    return BakersGammaResult(value=value, exact=False, n_pairs=n_samples, seed=seed)


def _contingency(a: Partition, b: Partition) -> np.ndarray:
    la = np.asarray(a.labels)
    lb = np.asarray(b.labels)
    if la.shape != lb.shape:
        raise InputError(f"partitions have different p: {la.size} vs {lb.size}")
    ka = int(la.max() - la.min()) + 1
    kb = int(lb.max() - lb.min()) + 1
    idx = (la - la.min()) * kb + (lb - lb.min())
    return np.bincount(idx, minlength=ka * kb).reshape(ka, kb)


def _comb2(x):
    return x * (x - 1) / 2.0


def adjusted_rand(a: Partition, b: Partition) -> float:
    """Hubert-Arabie adjusted Rand index from the contingency table."""
    c = _contingency(a, b)
    n = c.sum()
    sum_ij = _comb2(c).sum()
    sum_a = _comb2(c.sum(axis=1)).sum()
    sum_b = _comb2(c.sum(axis=0)).sum()
    expected = sum_a * sum_b / _comb2(n)
    max_index = (sum_a + sum_b) / 2.0
    if max_index == expected:  # both trivial partitions
        return 1.0 if np.array_equal(a.labels, b.labels) else 0.0
    return float((sum_ij - expected) / (max_index - expected))


def rand_index(a: Partition, b: Partition) -> float:
    """Raw (unadjusted) Rand index: fraction of concordant object pairs."""
    c = _contingency(a, b)
    n = c.sum()
    total = _comb2(n)
    sum_ij = _comb2(c).sum()
    sum_a = _comb2(c.sum(axis=1)).sum()
    sum_b = _comb2(c.sum(axis=0)).sum()
    return float((total + 2 * sum_ij - sum_a - sum_b) / total)
