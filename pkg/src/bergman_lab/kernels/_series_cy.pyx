# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of ``_series_py.series_sum``.

Same recurrence, same certified early-exit test, same floating-point
operation order per node, so results agree with the NumPy fallback to
the last bit.  See ``_series_py`` for the contract.
"""

import numpy as np


def series_sum(double[::1] a, double[::1] c1, double[::1] c2,
               double[::1] rs, double[::1] brs, double g1_coef,
               double[::1] q, double[::1] t, double tol):
    cdef Py_ssize_t k_last = a.shape[0] - 1
    cdef Py_ssize_t n_nodes = q.shape[0]
    out_arr = np.empty(n_nodes)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double qi, ti, qk, g_prev, g_cur, g_next, acc, rho
    cdef bint check = tol > 0.0

    with nogil:
        for i in range(n_nodes):
            qi = q[i]
            ti = t[i]
            qk = 1.0
            g_prev = 1.0
            acc = (a[0] * qk) * g_prev
            if k_last == 0:
                out[i] = acc
                continue
            if check:
                rho = qi * rs[0]
                if rho < 1.0 and (brs[0] * qk) * qi <= tol * (1.0 - rho):
                    out[i] = acc
                    continue
            g_cur = g1_coef * ti
            qk = qk * qi
            acc = acc + (a[1] * qk) * g_cur
            if check:
                rho = qi * rs[1]
                if rho < 1.0 and (brs[1] * qk) * qi <= tol * (1.0 - rho):
                    out[i] = acc
                    continue
            for k in range(2, k_last + 1):
                g_next = (c1[k] * ti) * g_cur - c2[k] * g_prev
                g_prev = g_cur
                g_cur = g_next
                qk = qk * qi
                acc = acc + (a[k] * qk) * g_cur
                if check:
                    rho = qi * rs[k]
                    if rho < 1.0 and (brs[k] * qk) * qi <= tol * (1.0 - rho):
                        break
            out[i] = acc
    return out_arr
