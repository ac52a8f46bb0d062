# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: path-pair utility sums and the bounded simplex."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, INFINITY

cnp.import_array()

DEF OPTIMAL = 0
DEF UNBOUNDED = 2
DEF ITER_LIMIT = 3
DEF NUMERICAL = 4
DEF TIE_TOL = 1e-12


def pair_sums(cnp.int64_t[:, ::1] D, cnp.int64_t[:, ::1] A, cnp.int64_t[::1] indptr,
              cnp.int64_t[::1] indices, double[::1] data, Py_ssize_t n_att_edges):
    cdef Py_ssize_t n_d = D.shape[0], n_a = A.shape[0]
    cdef Py_ssize_t wd = D.shape[1], wa = A.shape[1]
    out_arr = np.zeros((n_d, n_a))
    cdef double[:, ::1] out = out_arr
    cdef double[::1] cov = np.zeros(max(n_att_edges, 1))
    cdef Py_ssize_t i, j, k, t, d
    cdef double s
    for i in range(n_d):
        for t in range(wd):
            d = D[i, t]
            for k in range(indptr[d], indptr[d + 1]):
                cov[indices[k]] += data[k]
        for j in range(n_a):
            s = 0.0
            for t in range(wa):
                s += cov[A[j, t]]
            out[i, j] = s
        for t in range(wd):
            d = D[i, t]
            for k in range(indptr[d], indptr[d + 1]):
                cov[indices[k]] = 0.0
    return out_arr


cdef void _pivot(double[:, ::1] T, Py_ssize_t r, Py_ssize_t j) nogil:
    cdef Py_ssize_t rows = T.shape[0], cols = T.shape[1]
    cdef Py_ssize_t i, k
    cdef double p = T[r, j], f
    for k in range(cols):
        T[r, k] /= p
    for i in range(rows):
        if i == r:
            continue
        f = T[i, j]
        if f != 0.0:
            for k in range(cols):
                T[i, k] -= f * T[r, k]
            T[i, j] = 0.0
    T[r, j] = 1.0


def simplex_iterate(double[:, ::1] T, cnp.int64_t[::1] basis, double[::1] upper,
                    cnp.uint8_t[::1] flipped, cnp.uint8_t[::1] can_enter,
                    Py_ssize_t max_iter, double tol_piv, double tol_opt, Py_ssize_t bland_after):
    cdef Py_ssize_t m = T.shape[0] - 1
    cdef Py_ssize_t n = T.shape[1] - 1
    cdef Py_ssize_t degenerate = 0, it = 0
    cdef Py_ssize_t i, j, r, k, b, best_var
    cdef double dj, dmin, a, ratio, best, bi, u
    cdef bint r_upper, to_upper
    while it < max_iter:
        j = -1
        dmin = -tol_opt
        for k in range(n):
            if can_enter[k] and T[m, k] < -tol_opt:
                if degenerate >= bland_after:
                    j = k
                    break
                if T[m, k] < dmin:
                    dmin = T[m, k]
                    j = k
        if j < 0:
            return OPTIMAL, it
        best = upper[j]
        r = -1
        r_upper = False
        best_var = -1
        for i in range(m):
            a = T[i, j]
            bi = T[i, n]
            if a > tol_piv:
                ratio = (bi if bi > 0.0 else 0.0) / a
                to_upper = False
            elif a < -tol_piv and upper[basis[i]] < INFINITY:
                ratio = upper[basis[i]] - bi
                if ratio < 0.0:
                    ratio = 0.0
                ratio = ratio / (-a)
                to_upper = True
            else:
                continue
            if ratio < best - TIE_TOL or (r >= 0 and fabs(ratio - best) <= TIE_TOL and basis[i] < best_var):
                best = ratio
                r = i
                r_upper = to_upper
                best_var = basis[i]
        if best == INFINITY:
            return UNBOUNDED, it
        it += 1
        if best <= TIE_TOL:
            degenerate += 1
        else:
            degenerate = 0
        if r < 0:
            u = upper[j]
            for i in range(m + 1):
                T[i, n] -= T[i, j] * u
                T[i, j] = -T[i, j]
            flipped[j] ^= 1
            continue
        if r_upper:
            b = basis[r]
            for k in range(n + 1):
                T[r, k] = -T[r, k]
            T[r, b] = 1.0
            T[r, n] += upper[b]
            flipped[b] ^= 1
        if fabs(T[r, j]) < 1e-12:
            return NUMERICAL, it
        _pivot(T, r, j)
        basis[r] = j
    return ITER_LIMIT, it
