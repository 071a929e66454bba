# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: nearest-centroid assignment, mini-batch k-means
updates, and absorption walks.

The numpy fallback in qpass._kernels_py implements the same contracts
with identical arithmetic ordering, so results match bitwise.
"""

import numpy as np

cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc

cnp.import_array()

BACKEND = "c"

cdef uint64_t SPLITMIX_GAMMA = 0x9E3779B97F4A7C15u


cdef inline uint64_t _mix(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9u
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EBu
    return z ^ (z >> 31)


cdef void _nearest(const double* points, Py_ssize_t n, Py_ssize_t d,
                   const double* ct, Py_ssize_t c,
                   double* work, int64_t* labels, double* dists) nogil:
    """Nearest centroid per point. ct is the (d, c) transposed centroid
    array; work is a length-c scratch buffer. The distance for centroid j
    accumulates feature squares in order, so results match a naive loop."""
    cdef Py_ssize_t i, j, k
    cdef double diff, d0, d1, d2, p0, p1, p2, best
    cdef int64_t best_j
    for i in range(n):
        if d == 3:
            p0 = points[i * 3]
            p1 = points[i * 3 + 1]
            p2 = points[i * 3 + 2]
            for j in range(c):
                d0 = p0 - ct[j]
                d1 = p1 - ct[c + j]
                d2 = p2 - ct[2 * c + j]
                work[j] = d0 * d0 + d1 * d1 + d2 * d2
        else:
            for j in range(c):
                diff = points[i * d] - ct[j]
                work[j] = diff * diff
            for k in range(1, d):
                for j in range(c):
                    diff = points[i * d + k] - ct[k * c + j]
                    work[j] = work[j] + diff * diff
        best = work[0]
        best_j = 0
        for j in range(1, c):
            if work[j] < best:
                best = work[j]
                best_j = j
        labels[i] = best_j
        dists[i] = best


def assign_nearest(double[:, ::1] points, double[:, ::1] centroids):
    """Index of the nearest centroid (squared Euclidean, ties to the
    lowest index) and the squared distance, per point."""
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t d = points.shape[1]
    cdef Py_ssize_t c = centroids.shape[0]
    if centroids.shape[1] != d:
        raise ValueError("points and centroids must share the feature dimension")
    if c == 0:
        raise ValueError("no centroids")

    labels_arr = np.empty(n, dtype=np.int64)
    dists_arr = np.empty(n, dtype=np.float64)
    ct_arr = np.ascontiguousarray(np.asarray(centroids).T)
    cdef int64_t[::1] labels = labels_arr
    cdef double[::1] dists = dists_arr
    cdef double[:, ::1] ct = ct_arr

    cdef double* work
    with nogil:
        work = <double*>malloc(c * sizeof(double))
        if work == NULL:
            with gil:
                raise MemoryError()
        _nearest(&points[0, 0], n, d, &ct[0, 0], c, work, &labels[0], &dists[0])
        free(work)
    return labels_arr, dists_arr


def minibatch_update(double[:, ::1] batch, double[:, ::1] centers,
                     double[::1] counts):
    """One mini-batch k-means step: assign the batch to the nearest
    centers, then move each hit center toward its batch mean with a
    1/count learning rate (counts updated in place). Returns the largest
    center movement (Euclidean)."""
    cdef Py_ssize_t nb = batch.shape[0]
    cdef Py_ssize_t d = batch.shape[1]
    cdef Py_ssize_t c = centers.shape[0]
    labels_arr = np.empty(nb, dtype=np.int64)
    dists_arr = np.empty(nb, dtype=np.float64)
    ct_arr = np.ascontiguousarray(np.asarray(centers).T)
    sums_arr = np.zeros((c, d), dtype=np.float64)
    m_arr = np.zeros(c, dtype=np.float64)
    cdef int64_t[::1] labels = labels_arr
    cdef double[::1] dists = dists_arr
    cdef double[:, ::1] ct = ct_arr
    cdef double[:, ::1] sums = sums_arr
    cdef double[::1] m = m_arr

    cdef Py_ssize_t i, j, k
    cdef int64_t lab
    cdef double delta, move2, max_move2
    cdef double* work
    with nogil:
        work = <double*>malloc(c * sizeof(double))
        if work == NULL:
            with gil:
                raise MemoryError()
        _nearest(&batch[0, 0], nb, d, &ct[0, 0], c, work, &labels[0], &dists[0])
        free(work)

        for i in range(nb):
            lab = labels[i]
            m[lab] += 1.0
            for k in range(d):
                sums[lab, k] += batch[i, k]

        max_move2 = 0.0
        for j in range(c):
            if m[j] > 0.0:
                counts[j] += m[j]
                move2 = 0.0
                for k in range(d):
                    delta = (sums[j, k] - m[j] * centers[j, k]) / counts[j]
                    centers[j, k] += delta
                    move2 = move2 + delta * delta
                if move2 > max_move2:
                    max_move2 = move2
    return np.sqrt(max_move2)


def absorption_walks(double[:, ::1] cum, Py_ssize_t n_transient,
                     double[::1] b_term, int64_t[::1] last_col,
                     Py_ssize_t start, Py_ssize_t n_walks,
                     uint64_t seed, Py_ssize_t cap):
    """Random walks on a row-stochastic chain until absorption.

    cum holds per-row cumulative transition probabilities; states with
    index >= n_transient are terminals paying b_term[state - n_transient].
    last_col[s] is the last column with positive mass in row s (-1 for a
    dangling row, which absorbs immediately with payoff 0). Per-walk
    splitmix64 streams make the result independent of walk ordering.
    """
    cdef Py_ssize_t n_states = cum.shape[0]
    payoffs_arr = np.zeros(n_walks, dtype=np.float64)
    capped_arr = np.zeros(n_walks, dtype=np.uint8)
    cdef double[::1] payoffs = payoffs_arr
    cdef cnp.uint8_t[::1] capped = capped_arr

    cdef Py_ssize_t w, step, state, j, nxt
    cdef uint64_t rng
    cdef double u
    with nogil:
        for w in range(n_walks):
            rng = _mix(seed ^ (SPLITMIX_GAMMA * (<uint64_t>w + 1u)))
            state = start
            for step in range(cap):
                if last_col[state] < 0:
                    payoffs[w] = 0.0
                    break
                rng = rng + SPLITMIX_GAMMA
                u = <double>(_mix(rng) >> 11) * (1.0 / 9007199254740992.0)
                nxt = -1
                for j in range(n_states):
                    if u < cum[state, j]:
                        nxt = j
                        break
                if nxt < 0:
                    nxt = last_col[state]
                if nxt >= n_transient:
                    payoffs[w] = b_term[nxt - n_transient]
                    break
                state = nxt
            else:
                capped[w] = 1
    return payoffs_arr, capped_arr.view(np.bool_)
