# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: subset enumeration and connectivity of sampled edge sets."""

from libc.stdlib cimport malloc, free


cdef inline int _find(int* parent, int x) noexcept nogil:
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


def subset_histogram(int vertex_count, const int[:] ea, const int[:] eb,
                     const long long[:] stride, long long[:] out,
                     int mode, int tu, int tv):
    """Tally qualifying subsets of edge slots into ``out``.

    Subset ``mask`` lands in bin ``sum(stride[i] for alive slot i)``.
    ``mode`` 0 keeps spanning connected subsets, 1 keeps subsets with exactly
    two components separating ``tu`` from ``tv``.
    """
    cdef int k = ea.shape[0]
    cdef unsigned long long total = 1ULL << k
    cdef unsigned long long mask
    cdef int i, ra, rb, comps
    cdef long long idx
    cdef int* parent = <int*> malloc(vertex_count * sizeof(int))
    if parent == NULL:
        raise MemoryError()
    try:
        with nogil:
            for mask in range(total):
                for i in range(vertex_count):
                    parent[i] = i
                comps = vertex_count
                idx = 0
                for i in range(k):
                    if (mask >> i) & 1:
                        idx += stride[i]
                        ra = _find(parent, ea[i])
                        rb = _find(parent, eb[i])
                        if ra != rb:
                            parent[ra] = rb
                            comps -= 1
                if mode == 0:
                    if comps == 1:
                        out[idx] += 1
                elif comps == 2 and _find(parent, tu) != _find(parent, tv):
                    out[idx] += 1
    finally:
        free(parent)


def count_connected(int vertex_count, const int[:] ea, const int[:] eb,
                    const unsigned char[:, :] alive):
    """Number of rows of ``alive`` whose surviving slots connect all vertices."""
    cdef Py_ssize_t trials = alive.shape[0]
    cdef int k = ea.shape[0]
    cdef Py_ssize_t t
    cdef int i, ra, rb, comps
    cdef long long hits = 0
    cdef int* parent = <int*> malloc(vertex_count * sizeof(int))
    if parent == NULL:
        raise MemoryError()
    try:
        with nogil:
            for t in range(trials):
                for i in range(vertex_count):
                    parent[i] = i
                comps = vertex_count
                for i in range(k):
                    if alive[t, i]:
                        ra = _find(parent, ea[i])
                        rb = _find(parent, eb[i])
                        if ra != rb:
                            parent[ra] = rb
                            comps -= 1
                            if comps == 1:
                                break
                if comps == 1:
                    hits += 1
    finally:
        free(parent)
    return hits
