"""Adjacency-constrained Ward HAC on banded similarities in O(p(h + log p)).

The merge loop keeps the active clusters in a doubly linked chain of
contiguous intervals and the candidate fusions of adjacent pairs in a binary
min-heap with lazy invalidation: every cluster carries a creation stamp, each
heap entry records the stamps of its two clusters at push time, and stale
entries are skipped at pop time. Each merge pushes at most two new candidates,
so the heap never holds more than 3p entries.

A compiled extension (:mod:`bandclust._core`) implements the same loop for
speed; the pure-Python version here is the fallback and the reference. Both
read linkage values from the same pencil tables and agree bit-for-bit.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np

from .band import BandMatrix, shift_diagonal
from .errors import InputError
from .pencils import precompute

try:
    from . import _core
except ImportError:  # pragma: no cover - build-dependent
    _core = None

HAVE_COMPILED_CORE = _core is not None

__all__ = [
    "Dendrogram",
    "Partition",
    "FusionHeap",
    "cluster",
    "cluster_shifted",
    "cut",
    "write_merge_table",
    "read_merge_table",
    "format_merge_table",
    "HAVE_COMPILED_CORE",
]


@dataclass(frozen=True)
class Dendrogram:
    """Sequence of p-1 merges of adjacent contiguous clusters.

    ``left`` / ``right`` follow the signed-reference convention: negative
    values are singleton (leaf) indices, positive values refer to earlier
    merges (both 1-based). ``starts``/``splits``/``ends`` give each merge's
    interval extent: the merge joins [start, split] and [split+1, end].
    """

    p: int
    left: np.ndarray = field(repr=False)
    right: np.ndarray = field(repr=False)
    heights: np.ndarray = field(repr=False)
    starts: np.ndarray = field(repr=False)
    splits: np.ndarray = field(repr=False)
    ends: np.ndarray = field(repr=False)

    @property
    def n_merges(self) -> int:
        return self.p - 1

    def __post_init__(self):
        for name in ("left", "right", "starts", "splits", "ends"):
            a = np.ascontiguousarray(getattr(self, name), dtype=np.int64)
            a.flags.writeable = False
            object.__setattr__(self, name, a)
        hts = np.ascontiguousarray(self.heights, dtype=np.float64)
        hts.flags.writeable = False
        object.__setattr__(self, "heights", hts)
        if not (self.left.shape == self.right.shape == self.heights.shape
                == (self.p - 1,)):
            raise InputError("dendrogram arrays must all have length p - 1")


@dataclass(frozen=True)
class Partition:
    """A cut into K clusters; labels are 1..K along the 1..p ordering."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)


class FusionHeap:
    """Binary min-heap of candidate fusions with lazy invalidation.

    Entries are tuples ordered by (linkage, left-start); ``pop_min`` discards
    entries rejected by the ``validator`` until a live one surfaces. Push and
    pop counts plus the peak size are tracked for the 3p accounting bound.
    """

    def __init__(self, validator=None):
        self._heap = []
        self._validator = validator or (lambda entry: True)
        self.pushes = 0
        self.pops = 0
        self.max_size = 0

    def __len__(self) -> int:
        return len(self._heap)

    def push(self, entry) -> None:
        heapq.heappush(self._heap, entry)
        self.pushes += 1
        self.max_size = max(self.max_size, len(self._heap))

    def peek(self):
        """Smallest live entry without removing it (stale entries are dropped)."""
        while self._heap:
            if self._validator(self._heap[0]):
                return self._heap[0]
            heapq.heappop(self._heap)
            self.pops += 1
        raise InputError("peek on empty heap")

    def pop_min(self):
        """Remove and return the smallest live entry."""
        while self._heap:
            entry = heapq.heappop(self._heap)
            self.pops += 1
            if self._validator(entry):
                return entry
        raise InputError("pop on empty heap")


@dataclass(frozen=True)
class ClusterStats:
    """Instrumentation from one clustering run."""

    heap_max_size: int
    heap_pops: int
    pencil_entries: int
    backend: str


def _merge_loop_python(forward, backward, full, p, h):
    """Reference merge loop; see module docstring for the data structures."""
    nm = p - 1
    out_left = np.empty(nm, dtype=np.int64)
    out_right = np.empty(nm, dtype=np.int64)
    out_height = np.empty(nm, dtype=np.float64)
    out_start = np.empty(nm, dtype=np.int64)
    out_split = np.empty(nm, dtype=np.int64)
    out_end = np.empty(nm, dtype=np.int64)

    # chain state, indexed by 1-based cluster start position
    end = list(range(p + 2))          # end[s] = last position of cluster at s
    stamp = [0] * (p + 2)             # creation step (0 for leaves)
    node = [-s for s in range(p + 2)]  # signed dendrogram reference
    alive = [True] * (p + 2)
    nxt = [s + 1 for s in range(p + 2)]
    prv = [s - 1 for s in range(p + 2)]

    def delta(i, j, k):
        """Ward linkage of adjacent clusters [i..j] and [j+1..k] (inclusive)."""
        k1 = j - i + 1
        k2 = k - j
        hk1 = h if h < k1 else k1
        hk2 = h if h < k2 else k2
        hk12 = h if h < k1 + k2 else k1 + k2
        s1 = forward[hk1 - 1, j - 1] + backward[hk1 - 1, i - 1] - full[hk1 - 1]
        s2 = forward[hk2 - 1, k - 1] + backward[hk2 - 1, j] - full[hk2 - 1]
        s12 = forward[hk12 - 1, k - 1] + backward[hk12 - 1, i - 1] - full[hk12 - 1]
        return s1 / k1 + s2 / k2 - s12 / (k1 + k2)

    heap = FusionHeap()
    # bulk initialization, then heapify (counts as p - 1 pushes)
    init = [(delta(s, s, s + 1), s, 0, s + 1, 0) for s in range(1, p)]
    heapq.heapify(init)
    heap._heap = init
    heap.pushes = len(init)
    heap.max_size = len(init)

    for t in range(1, p):
        while True:
            d, ls, lst, rs, rst = heap.pop_min()
            if alive[ls] and alive[rs] and stamp[ls] == lst and stamp[rs] == rst:
                break
        out_left[t - 1] = node[ls]
        out_right[t - 1] = node[rs]
        out_height[t - 1] = d
        out_start[t - 1] = ls
        out_split[t - 1] = end[ls]
        out_end[t - 1] = end[rs]
        # merge rs into ls
        end[ls] = end[rs]
        alive[rs] = False
        stamp[ls] = t
        node[ls] = t
        nxt[ls] = nxt[rs]
        if nxt[rs] <= p:
            prv[nxt[rs]] = ls
        left_nb = prv[ls]
        if left_nb >= 1:
            heap.push((delta(left_nb, ls - 1, end[ls]), left_nb,
                       stamp[left_nb], ls, t))
        right_nb = nxt[ls]
        if right_nb <= p:
            heap.push((delta(ls, end[ls], end[right_nb]), ls, t,
                       right_nb, stamp[right_nb]))

    stats = (heap.max_size, heap.pops)
    return (out_left, out_right, out_height, out_start, out_split, out_end, stats)


def cluster(m: BandMatrix, backend: str = "auto", return_stats: bool = False):
    """Run adjacency-constrained Ward HAC; returns the Dendrogram.

    ``backend`` selects the merge-loop implementation: "auto" prefers the
    compiled extension when built, "python" and "compiled" force one side.
    With ``return_stats`` a (Dendrogram, ClusterStats) pair is returned.
    """
    if backend not in ("auto", "python", "compiled"):
        raise InputError(f"unknown backend {backend!r}")
    if backend == "compiled" and _core is None:
        raise InputError("compiled core is not available; rebuild the extension")
    use_compiled = backend == "compiled" or (backend == "auto" and _core is not None)

    table = precompute(m)
    if m.p == 1:
        empty = np.empty(0)
        d = Dendrogram(p=1, left=empty, right=empty, heights=empty,
                       starts=empty, splits=empty, ends=empty)
        stats = ClusterStats(0, 0, table.entry_count,
                             "compiled" if use_compiled else "python")
        return (d, stats) if return_stats else d

    if use_compiled:
        res = _core.merge_loop(table.forward, table.backward, table.full,
                               m.p, m.h)
        left, right, heights, starts, splits, ends, heap_max, heap_pops = res
        stats = ClusterStats(int(heap_max), int(heap_pops),
                             table.entry_count, "compiled")
    else:
        left, right, heights, starts, splits, ends, (heap_max, heap_pops) = \
            _merge_loop_python(table.forward, table.backward, table.full,
                               m.p, m.h)
        stats = ClusterStats(heap_max, heap_pops, table.entry_count, "python")

    d = Dendrogram(p=m.p, left=left, right=right, heights=heights,
                   starts=starts, splits=splits, ends=ends)
    return (d, stats) if return_stats else d


def cluster_shifted(m: BandMatrix, lam: float, backend: str = "auto"):
    """Cluster ``m + lam * I``; same hierarchy as ``m`` with heights + lam."""
    return cluster(shift_diagonal(m, lam), backend=backend)


def cut(d: Dendrogram, k: int) -> Partition:
    """Partition into k contiguous clusters by undoing the last k-1 merges."""
    if not 1 <= k <= d.p:
        raise InputError(f"k must be in [1, {d.p}], got {k}")
    # boundary b (between positions b and b+1) is removed by the merge with
    # split == b; applying merges 1..p-k leaves exactly k - 1 boundaries
    removed = np.zeros(d.p, dtype=bool)
    if d.p - k > 0:
        removed[d.splits[:d.p - k] - 1] = True
    labels = np.empty(d.p, dtype=np.int64)
    labels[0] = 1
    if d.p > 1:
        labels[1:] = 1 + np.cumsum(~removed[:d.p - 1])
    return Partition(labels=labels, k=k)


# ---------------------------------------------------------------------------
# Merge-table text format: one "left right height" line per merge,
# signed references, heights with 12 significant digits.
# ---------------------------------------------------------------------------

def format_merge_table(d: Dendrogram) -> str:
    lines = [f"{int(l)} {int(r)} {ht:.12g}"
             for l, r, ht in zip(d.left, d.right, d.heights)]
    return "\n".join(lines) + ("\n" if lines else "")


def write_merge_table(d: Dendrogram, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_merge_table(d))


def read_merge_table(path) -> Dendrogram:
    """Parse a merge table and rebuild interval extents from the references."""
    left, right, heights = [], [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 3:
                raise InputError(f"{path}:{lineno}: expected 'left right height'")
            try:
                left.append(int(parts[0]))
                right.append(int(parts[1]))
                heights.append(float(parts[2]))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: {exc}") from exc
    nm = len(left)
    p = nm + 1
    starts = np.empty(nm, dtype=np.int64)
    splits = np.empty(nm, dtype=np.int64)
    ends = np.empty(nm, dtype=np.int64)

    def extent(ref, upto):
        if ref < 0:
            return (-ref, -ref)
        if not 1 <= ref <= upto:
            raise InputError(f"{path}: merge reference {ref} out of order")
        return (starts[ref - 1], ends[ref - 1])

    for t in range(nm):
        ls, le = extent(left[t], t)
        rs, re = extent(right[t], t)
        if le + 1 != rs:
            raise InputError(f"{path}: merge {t + 1} joins non-adjacent intervals")
        starts[t], splits[t], ends[t] = ls, le, re
    if nm and (starts[-1] != 1 or ends[-1] != p):
        raise InputError(f"{path}: final merge does not span the full range")
    return Dendrogram(p=p, left=np.array(left, dtype=np.int64),
                      right=np.array(right, dtype=np.int64),
                      heights=np.array(heights), starts=starts,
                      splits=splits, ends=ends)
