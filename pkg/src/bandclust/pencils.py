"""Forward/backward pencil tables for O(1) cluster-sum and Ward-linkage queries.

The forward pencil ``P(r, l)`` sums every entry ``s_ab`` with
``1 <= a, b <= r`` and ``|a - b| < l``; the backward pencil sums the mirrored
region ``r <= a, b <= p``. For any contiguous cluster ``C = {i, ..., j-1}`` of
size ``k`` the identity

    S(C) = P(j - 1, h_k) + Pbar(i, h_k) - P(p, h_k),    h_k = min(h, k)

recovers the full within-cluster similarity sum from two table lookups, which
makes each Ward linkage evaluation constant-time.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .band import BandMatrix
from .errors import InputError

try:  # compiled fused-pass table builder; numpy path below is the fallback
    from . import _core as _compiled
except ImportError:  # pragma: no cover - depends on build environment
    _compiled = None

__all__ = ["PencilTable", "precompute", "cluster_sum", "ward_linkage"]


@dataclass(frozen=True)
class PencilTable:
    """Precomputed pencil sums: forward[l-1, r-1] = P(r, l), same for backward."""

    p: int
    h: int
    forward: np.ndarray = field(repr=False)
    backward: np.ndarray = field(repr=False)
    full: np.ndarray = field(repr=False)  # full[l-1] = P(p, l)

    @property
    def entry_count(self) -> int:
        """Stored table entries, excluding the h cached full pencils."""
        return 2 * self.p * self.h


def _forward_table(bands: np.ndarray) -> np.ndarray:
    """Forward pencil table from diagonal-major band storage.

    Uses the recurrence P(r, l) = P(r-1, l) + s_rr + 2 * T(r, l) where
    T(r, l) sums the l-1 band entries ending at column r; both cumulations
    run in O(ph). Accumulation is done in the widest native float type.
    The compiled kernel fuses the two cumulations into one pass with the
    identical operation order, so the tables it emits are bit-identical.
    """
    if _compiled is not None:
        return _compiled.forward_table(np.ascontiguousarray(bands))
    return _forward_table_numpy(bands)


def _forward_table_numpy(bands: np.ndarray) -> np.ndarray:
    p, h = bands.shape
    # column gather: above[r, d] = s_{r-d, r} (0 where r - d < 0)
    above = np.zeros((p, h), dtype=np.longdouble)
    for d in range(1, h):
        above[d:, d] = bands[:p - d, d]
    t = np.cumsum(above, axis=1)  # t[r, l-1] = sum_{d=1..l-1} above[r, d]
    rowterm = bands[:, :1].astype(np.longdouble) + 2.0 * t
    return np.ascontiguousarray(np.cumsum(rowterm, axis=0).astype(np.float64).T)


def _reversed_bands(bands: np.ndarray) -> np.ndarray:
    """Band storage of the index-reversed matrix s'_{ij} = s_{p+1-i, p+1-j}."""
    p, h = bands.shape
    rev = np.zeros_like(bands)
    for d in range(h):
        rev[:p - d, d] = bands[:p - d, d][::-1]
    return rev


def precompute(m: BandMatrix) -> PencilTable:
    """Build the 2ph-entry pencil table (plus h cached full pencils) in O(ph)."""
    forward = _forward_table(m.bands)
    if _compiled is not None:
        backward = _compiled.backward_table(np.ascontiguousarray(m.bands))
    else:
        backward = _forward_table(_reversed_bands(m.bands))[:, ::-1].copy()
    full = forward[:, -1].copy()
    for a in (forward, backward, full):
        a.flags.writeable = False
    return PencilTable(p=m.p, h=m.h, forward=forward, backward=backward, full=full)


def cluster_sum(t: PencilTable, i: int, j_excl: int) -> float:
    """Within-cluster similarity sum S(C) for C = {i, ..., j_excl - 1} (1-based)."""
    if not (1 <= i < j_excl <= t.p + 1):
        raise InputError(f"cluster bounds ({i}, {j_excl}) invalid for p={t.p}")
    k = j_excl - i
    hk = min(t.h, k)
    return float(t.forward[hk - 1, j_excl - 2] + t.backward[hk - 1, i - 1] - t.full[hk - 1])


def ward_linkage(t: PencilTable, c1, c2) -> float:
    """Ward linkage of two adjacent contiguous clusters.

    Clusters are half-open 1-based intervals ``(start, stop)``; ``c1`` must end
    exactly where ``c2`` begins. Evaluates
    S(C)/|C| + S(C')/|C'| - S(C u C')/|C u C'| from three cluster-sum queries.
    """
    i1, j1 = c1
    i2, j2 = c2
    if j1 != i2:
        raise InputError(f"clusters {c1} and {c2} are not adjacent")
    if not (i1 < j1 < j2):
        raise InputError(f"invalid cluster intervals {c1}, {c2}")
    s1 = cluster_sum(t, i1, j1)
    s2 = cluster_sum(t, i2, j2)
    s12 = cluster_sum(t, i1, j2)
    return s1 / (j1 - i1) + s2 / (j2 - i2) - s12 / (j2 - i1)
