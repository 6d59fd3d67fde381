"""NumPy implementation of the zonal-series inner loop.

Computes, for each node ``(q_i, t_i)``,

    out_i = sum_{k=0}^{K} a[k] * q_i^k * G_k(t_i),

where ``G_k`` follows the generic three-term recurrence of
:mod:`bergman_lab.kernels.zonal`.  A node stops accumulating as soon as
the certified geometric remainder drops below ``tol``:

    remainder after term k  <=  brs[k] * q^{k+1} / (1 - q * rs[k]),

with ``rs[k]`` a suffix max of majorant-coefficient ratios and
``brs[k] = bound[k] * rs[k]``.  The compiled twin in ``_series_cy.pyx``
performs the same per-node operations in the same order, so the two
backends agree to the last bit on each node: a finished node's value is
written out at its exit step, even though its lane is only dropped from
the working arrays at the next compaction.
"""

from __future__ import annotations

import numpy as np

_COMPACT_EVERY = 128


def series_sum(a, c1, c2, rs, brs, g1_coef, q, t, tol):
    a = np.ascontiguousarray(a, dtype=float)
    q = np.ascontiguousarray(q, dtype=float)
    t = np.ascontiguousarray(t, dtype=float)
    n_nodes = q.size
    k_last = a.size - 1
    out = np.empty(n_nodes)

    idx = np.arange(n_nodes)
    alive = np.ones(n_nodes, dtype=bool)
    qk = np.ones(n_nodes)
    g_prev = np.ones(n_nodes)
    acc = (a[0] * qk) * g_prev
    check = tol > 0.0

    def settle(k):
        # write out nodes whose certified remainder fell below tol at term k
        rho = q * rs[k]
        done = alive & (rho < 1.0) & ((brs[k] * qk) * q <= tol * (1.0 - rho))
        if done.any():
            out[idx[done]] = acc[done]
            alive[done] = False
        return alive.any()

    if k_last == 0 or (check and not settle(0)):
        out[idx[alive]] = acc[alive]
        return out

    g_cur = g1_coef * t
    qk = qk * q
    acc = acc + (a[1] * qk) * g_cur
    if check and not settle(1):
        return out

    since_compact = 0
    for k in range(2, k_last + 1):
        g_next = (c1[k] * t) * g_cur - c2[k] * g_prev
        g_prev = g_cur
        g_cur = g_next
        qk = qk * q
        acc = acc + (a[k] * qk) * g_cur
        if check:
            if not settle(k):
                return out
            since_compact += 1
            if since_compact >= _COMPACT_EVERY:
                idx = idx[alive]
                qk, acc = qk[alive], acc[alive]
                g_prev, g_cur = g_prev[alive], g_cur[alive]
                q, t = q[alive], t[alive]
                alive = np.ones(idx.size, dtype=bool)
                since_compact = 0
    out[idx[alive]] = acc[alive]
    return out
