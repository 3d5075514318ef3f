# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pure``.

Must stay bit-identical to the pure backend: sequential accumulation,
one rounding per elementwise operation, no fused multiply-adds (the
extension is compiled with -ffp-contract=off).
"""

from libc.math cimport fabs

import numpy as np

cimport numpy as cnp

cnp.import_array()


def response_product_sum(cnp.ndarray[cnp.float64_t, ndim=1] f,
                         cnp.ndarray[cnp.float64_t, ndim=1] g,
                         cnp.ndarray[cnp.float64_t, ndim=1] w):
    """Return sum_i f[i]*g[i]*w[i], accumulated sequentially."""
    cdef Py_ssize_t i, n = f.shape[0]
    cdef double acc = 0.0
    for i in range(n):
        acc += f[i] * g[i] * w[i]
    return acc


def outcome_cell_sums(cnp.ndarray[cnp.float64_t, ndim=1] weights,
                      cnp.ndarray[cnp.uint8_t, ndim=1] codes):
    """Per-outcome weight totals; codes in {0,1,2,3}."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(4, dtype=np.float64)
    cdef Py_ssize_t i, n = weights.shape[0]
    for i in range(n):
        out[codes[i]] += weights[i]
    return out


def mc_outcome_counts(cnp.ndarray[cnp.float64_t, ndim=1] cum,
                      cnp.ndarray[cnp.uint8_t, ndim=1] codes,
                      cnp.ndarray[cnp.float64_t, ndim=1] uniforms):
    """Tally sampled outcomes by inverse-CDF lookup (first cum > u)."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.zeros(4, dtype=np.int64)
    cdef Py_ssize_t k, lo, hi, mid, n = cum.shape[0]
    cdef double u
    for k in range(uniforms.shape[0]):
        u = uniforms[k]
        lo = 0
        hi = n
        while lo < hi:
            mid = (lo + hi) // 2
            if cum[mid] > u:
                hi = mid
            else:
                lo = mid + 1
        if lo >= n:
            lo = n - 1
        out[codes[lo]] += 1
    return out


def tableau_pivot(cnp.ndarray[cnp.float64_t, ndim=2] T, Py_ssize_t pr,
                  Py_ssize_t pc):
    """One dense simplex pivot on (pr, pc), in place."""
    cdef Py_ssize_t i, j, m = T.shape[0], n = T.shape[1]
    cdef double piv = T[pr, pc]
    cdef double factor
    for j in range(n):
        T[pr, j] = T[pr, j] / piv
    for i in range(m):
        if i == pr:
            continue
        factor = T[i, pc]
        for j in range(n):
            T[i, j] = T[i, j] - factor * T[pr, j]
    for i in range(m):
        T[i, pc] = 0.0
    T[pr, pc] = 1.0


def chsh_strategy_max(Py_ssize_t n):
    """Exhaustive CHSH maximum over deterministic strategies on n points."""
    cdef Py_ssize_t m = 1 << n
    cdef cnp.ndarray[cnp.float64_t, ndim=2] signs = np.where(
        (np.arange(m)[:, None] >> np.arange(n)[None, :]) & 1, -1.0, 1.0)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t ia, ia2, ib, ib2, lam
    cdef double best = 0.0, s
    for ib in range(m):
        for ib2 in range(m):
            for lam in range(n):
                u[lam] = signs[ib, lam] + signs[ib2, lam]
                v[lam] = signs[ib, lam] - signs[ib2, lam]
            for ia in range(m):
                for ia2 in range(m):
                    for lam in range(n):
                        s = fabs(signs[ia, lam] * u[lam] + signs[ia2, lam] * v[lam])
                        if s > best:
                            best = s
    return best
