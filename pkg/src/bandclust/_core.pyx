# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled merge loop for adjacency-constrained Ward HAC.

Mirrors the pure-Python loop in :mod:`bandclust.engine` operation for
operation (same linkage expression, same lazy-invalidation heap ordered by
(linkage, left-start)), so both backends produce bit-identical dendrograms.
"""

from libc.stdlib cimport free, malloc

import numpy as np


def forward_table(const double[:, ::1] bands):
    """Forward pencil table from diagonal-major band storage.

    Single fused pass over the recurrences T(r, l) = T(r, l-1) + s_{r-l+1,r}
    and P(r, l) = P(r-1, l) + s_rr + 2 T(r, l), with the same extended-precision
    accumulation order as the pure-numpy path so both emit bit-identical tables.
    """
    cdef Py_ssize_t p = bands.shape[0]
    cdef Py_ssize_t h = bands.shape[1]
    out_arr = np.empty((h, p), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef long double* acc = <long double*> malloc(h * sizeof(long double))
    if acc == NULL:
        raise MemoryError()
    cdef long double t, rowterm
    cdef Py_ssize_t r, l
    with nogil:
        for l in range(h):
            acc[l] = 0.0
        for r in range(p):
            t = 0.0
            for l in range(h):
                if l >= 1 and r >= l:
                    t = t + <long double> bands[r - l, l]
                rowterm = <long double> bands[r, 0] + 2.0 * t
                acc[l] = acc[l] + rowterm
                out[l, r] = <double> acc[l]
    free(acc)
    return out_arr


def backward_table(const double[:, ::1] bands):
    """Backward pencil table, i.e. the forward table of the index-reversed
    matrix flipped back into original row order.

    Reversing index i to p+1-i maps band entry s'_{r-l+1,r} to s_{p-r, p-r+l},
    so the pass reads whole rows of the original storage back to front;
    accumulation order matches the numpy fallback, so tables are bit-identical.
    """
    cdef Py_ssize_t p = bands.shape[0]
    cdef Py_ssize_t h = bands.shape[1]
    out_arr = np.empty((h, p), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef long double* acc = <long double*> malloc(h * sizeof(long double))
    if acc == NULL:
        raise MemoryError()
    cdef long double t, rowterm
    cdef Py_ssize_t r, l, src
    with nogil:
        for l in range(h):
            acc[l] = 0.0
        for r in range(p):
            src = p - 1 - r
            t = 0.0
            for l in range(h):
                if l >= 1 and r >= l:
                    t = t + <long double> bands[src, l]
                rowterm = <long double> bands[src, 0] + 2.0 * t
                acc[l] = acc[l] + rowterm
                out[l, src] = <double> acc[l]
    free(acc)
    return out_arr


cdef struct Entry:
    # int32 fields keep the entry at 24 bytes so the heap stays cache-resident
    # longer; starts and stamps are bounded by p + 1, far below 2**31
    double key
    int left
    int left_stamp
    int right
    int right_stamp


cdef inline bint _less(Entry a, Entry b) nogil:
    if a.key != b.key:
        return a.key < b.key
    if a.left != b.left:
        return a.left < b.left
    if a.left_stamp != b.left_stamp:
        return a.left_stamp < b.left_stamp
    if a.right != b.right:
        return a.right < b.right
    return a.right_stamp < b.right_stamp


cdef inline void _sift_down(Entry* heap, Py_ssize_t startpos, Py_ssize_t pos) nogil:
    # bubble heap[pos] toward the root, as in CPython's heapq
    cdef Entry item = heap[pos]
    cdef Py_ssize_t parentpos
    while pos > startpos:
        parentpos = (pos - 1) >> 1
        if _less(item, heap[parentpos]):
            heap[pos] = heap[parentpos]
            pos = parentpos
        else:
            break
    heap[pos] = item


cdef inline void _sift_up(Entry* heap, Py_ssize_t pos, Py_ssize_t n) nogil:
    cdef Py_ssize_t startpos = pos
    cdef Entry item = heap[pos]
    cdef Py_ssize_t childpos = 2 * pos + 1
    while childpos < n:
        if childpos + 1 < n and _less(heap[childpos + 1], heap[childpos]):
            childpos += 1
        heap[pos] = heap[childpos]
        pos = childpos
        childpos = 2 * pos + 1
    heap[pos] = item
    _sift_down(heap, startpos, pos)


def merge_loop(const double[:, ::1] forward, const double[:, ::1] backward,
               const double[::1] full, Py_ssize_t p, Py_ssize_t h):
    """Run the merge loop on precomputed pencil tables.

    Returns (left, right, heights, starts, splits, ends, heap_max, heap_pops).
    """
    cdef Py_ssize_t nm = p - 1
    left_arr = np.empty(nm, dtype=np.int64)
    right_arr = np.empty(nm, dtype=np.int64)
    height_arr = np.empty(nm, dtype=np.float64)
    start_arr = np.empty(nm, dtype=np.int64)
    split_arr = np.empty(nm, dtype=np.int64)
    end_arr = np.empty(nm, dtype=np.int64)
    cdef long[::1] out_left = left_arr
    cdef long[::1] out_right = right_arr
    cdef double[::1] out_height = height_arr
    cdef long[::1] out_start = start_arr
    cdef long[::1] out_split = split_arr
    cdef long[::1] out_end = end_arr

    cdef Py_ssize_t cap = 3 * p + 4
    cdef Entry* heap = <Entry*> malloc(cap * sizeof(Entry))
    cdef long* end_of = <long*> malloc((p + 2) * sizeof(long))
    cdef long* stamp = <long*> malloc((p + 2) * sizeof(long))
    cdef long* node = <long*> malloc((p + 2) * sizeof(long))
    cdef char* alive = <char*> malloc(p + 2)
    cdef long* nxt = <long*> malloc((p + 2) * sizeof(long))
    cdef long* prv = <long*> malloc((p + 2) * sizeof(long))
    if heap == NULL or end_of == NULL or stamp == NULL or node == NULL \
            or alive == NULL or nxt == NULL or prv == NULL:
        free(heap); free(end_of); free(stamp); free(node)
        free(alive); free(nxt); free(prv)
        raise MemoryError()

    cdef Py_ssize_t hn = 0, heap_max = 0, heap_pops = 0
    cdef Py_ssize_t s, t, i
    cdef long ls, rs, lst, rst, left_nb, right_nb
    cdef double d
    cdef Entry e

    with nogil:
        for s in range(p + 2):
            end_of[s] = s
            stamp[s] = 0
            node[s] = -s
            alive[s] = 1
            nxt[s] = s + 1
            prv[s] = s - 1

        # initial candidates: all adjacent singleton pairs, heapified bottom-up
        for s in range(1, p):
            heap[s - 1].key = _delta(forward, backward, full, h, s, s, s + 1)
            heap[s - 1].left = s
            heap[s - 1].left_stamp = 0
            heap[s - 1].right = s + 1
            heap[s - 1].right_stamp = 0
        hn = nm
        for i in range(hn // 2 - 1, -1, -1):
            _sift_up(heap, i, hn)
        heap_max = hn

        for t in range(1, p):
            while True:
                e = heap[0]
                hn -= 1
                heap[0] = heap[hn]
                if hn > 0:
                    _sift_up(heap, 0, hn)
                heap_pops += 1
                ls = e.left
                rs = e.right
                if alive[ls] and alive[rs] and stamp[ls] == e.left_stamp \
                        and stamp[rs] == e.right_stamp:
                    break
            d = e.key
            out_left[t - 1] = node[ls]
            out_right[t - 1] = node[rs]
            out_height[t - 1] = d
            out_start[t - 1] = ls
            out_split[t - 1] = end_of[ls]
            out_end[t - 1] = end_of[rs]
            end_of[ls] = end_of[rs]
            alive[rs] = 0
            stamp[ls] = t
            node[ls] = t
            nxt[ls] = nxt[rs]
            if nxt[rs] <= p:
                prv[nxt[rs]] = ls
            left_nb = prv[ls]
            if left_nb >= 1:
                heap[hn].key = _delta(forward, backward, full, h,
                                      left_nb, ls - 1, end_of[ls])
                heap[hn].left = left_nb
                heap[hn].left_stamp = stamp[left_nb]
                heap[hn].right = ls
                heap[hn].right_stamp = t
                _sift_down(heap, 0, hn)
                hn += 1
            right_nb = nxt[ls]
            if right_nb <= p:
                heap[hn].key = _delta(forward, backward, full, h,
                                      ls, end_of[ls], end_of[right_nb])
                heap[hn].left = ls
                heap[hn].left_stamp = t
                heap[hn].right = right_nb
                heap[hn].right_stamp = stamp[right_nb]
                _sift_down(heap, 0, hn)
                hn += 1
            if hn > heap_max:
                heap_max = hn

    free(heap); free(end_of); free(stamp); free(node)
    free(alive); free(nxt); free(prv)
    return (left_arr, right_arr, height_arr, start_arr, split_arr, end_arr,
            heap_max, heap_pops)


cdef inline double _delta(const double[:, ::1] forward, const double[:, ::1] backward,
                          const double[::1] full, Py_ssize_t h,
                          long i, long j, long k) nogil:
    """Ward linkage of adjacent clusters [i..j] and [j+1..k] (inclusive, 1-based)."""
    cdef long k1 = j - i + 1
    cdef long k2 = k - j
    cdef long hk1 = h if h < k1 else k1
    cdef long hk2 = h if h < k2 else k2
    cdef long hk12 = h if h < k1 + k2 else k1 + k2
    cdef double s1 = forward[hk1 - 1, j - 1] + backward[hk1 - 1, i - 1] - full[hk1 - 1]
    cdef double s2 = forward[hk2 - 1, k - 1] + backward[hk2 - 1, j] - full[hk2 - 1]
    cdef double s12 = forward[hk12 - 1, k - 1] + backward[hk12 - 1, i - 1] - full[hk12 - 1]
    return s1 / k1 + s2 / k2 - s12 / (k1 + k2)
