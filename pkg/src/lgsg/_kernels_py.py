"""Pure Python / NumPy implementations of the inner loops.

These mirror ``_kernels.pyx`` exactly (same pivot rules, same tie-breaks) and
are used when the compiled extension is unavailable.
"""
import numpy as np

OPTIMAL = 0
UNBOUNDED = 2
ITER_LIMIT = 3
NUMERICAL = 4

TIE_TOL = 1e-12


def pair_sums(D, A, indptr, indices, data, n_att_edges):
    """out[i, j] = sum of data[k] over defender edges d in D[i] and CSR entries k of d landing in A[j]."""
    n_d, n_a = D.shape[0], A.shape[0]
    if n_d == 0 or n_a == 0:
        return np.zeros((n_d, n_a))
    cov = np.zeros((n_d, n_att_edges))
    for i in range(n_d):
        for d in D[i]:
            lo, hi = indptr[d], indptr[d + 1]
            if hi > lo:
                np.add.at(cov[i], indices[lo:hi], data[lo:hi])
    if A.shape[1] == 0:
        return np.zeros((n_d, n_a))
    return cov[:, A].sum(axis=2)


def _complement_column(T, j, u):
    T[:, -1] -= T[:, j] * u
    T[:, j] = -T[:, j]


def _pivot(T, r, j):
    T[r, :] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    nz = np.nonzero(col)[0]
    if nz.size:
        T[nz, :] -= np.outer(col[nz], T[r, :])
    T[:, j] = 0.0
    T[r, j] = 1.0


def simplex_iterate(T, basis, upper, flipped, can_enter, max_iter, tol_piv, tol_opt, bland_after):
    """Bounded-variable primal simplex on a dense tableau, in place.

    ``T`` has m constraint rows plus a final reduced-cost row; its last column
    is the right-hand side.  Nonbasic variables sit at zero; a variable at its
    upper bound is complemented (``flipped``).  Returns (status, iterations).
    """
    m = T.shape[0] - 1
    n = T.shape[1] - 1
    degenerate = 0
    it = 0
    obj = T[m]
    while it < max_iter:
        d = obj[:n]
        cand = np.nonzero((d < -tol_opt) & can_enter)[0]
        if cand.size == 0:
            return OPTIMAL, it
        if degenerate >= bland_after:
            j = int(cand[0])
        else:
            j = int(cand[np.argmin(d[cand])])  # argmin returns first, i.e. lowest index on ties
        col = T[:m, j]
        beta = T[:m, n]
        best = upper[j]
        r = -1
        r_upper = False
        best_var = -1
        for i in range(m):
            a = col[i]
            if a > tol_piv:
                ratio = max(beta[i], 0.0) / a
                to_upper = False
            elif a < -tol_piv and upper[basis[i]] < np.inf:
                ratio = max(upper[basis[i]] - beta[i], 0.0) / (-a)
                to_upper = True
            else:
                continue
            if ratio < best - TIE_TOL or (r >= 0 and abs(ratio - best) <= TIE_TOL and basis[i] < best_var):
                best = ratio
                r = i
                r_upper = to_upper
                best_var = basis[i]
        if best == np.inf:
            return UNBOUNDED, it
        it += 1
        degenerate = degenerate + 1 if best <= TIE_TOL else 0
        if r < 0:
            _complement_column(T, j, upper[j])
            flipped[j] ^= 1
            continue
        if r_upper:
            b = basis[r]
            T[r, :] = -T[r, :]
            T[r, b] = 1.0
            T[r, n] += upper[b]
            flipped[b] ^= 1
        if abs(T[r, j]) < 1e-12:
            return NUMERICAL, it
        _pivot(T, r, j)
        basis[r] = j
    return ITER_LIMIT, it
