"""Zonal harmonics on the unit sphere via three-term recurrences.

``Z_k`` denotes the zonal harmonic of degree ``k`` normalized against
the *normalized* surface measure, so that ``Z_k(1) = d_k``, the
dimension of the degree-``k`` spherical harmonic space, and

    sphere-average of Z_j(<a, y>) Z_k(<b, y>) over y
        = delta_{jk} Z_k(<a, b>) / 1   (reproducing property).

For ``n >= 3`` the zonal harmonic is a rescaled Gegenbauer polynomial
with parameter ``(n - 2) / 2``; for ``n = 2`` it degenerates to
``2 cos(k theta)``.  Both cases run on the same generic recurrence

    G_0 = 1,  G_1 = g1_coef * t,
    G_k = (c1[k] * t) * G_{k-1} - c2[k] * G_{k-2},

with ``Z_k = zfac[k] * G_k``; the tables below carry the coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..errors import DomainError

__all__ = ["ZonalTable", "zonal_table", "zonal", "zonal_sequence"]


@dataclass(frozen=True)
class ZonalTable:
    """Recurrence data for zonal harmonics in dimension ``n``.

    ``d[k] = Z_k(1)`` is the spherical-harmonic space dimension;
    ``g_one[k] = G_k(1)`` majorizes ``|G_k(t)|`` on ``[-1, 1]``.
    """

    n: int
    k_max: int
    g1_coef: float
    c1: np.ndarray
    c2: np.ndarray
    zfac: np.ndarray
    g_one: np.ndarray
    d: np.ndarray


@lru_cache(maxsize=32)
def zonal_table(n, k_max):
    if n < 2:
        raise DomainError("zonal harmonics need n >= 2")
    if k_max < 0:
        raise DomainError("k_max must be >= 0")
    k = np.arange(k_max + 1, dtype=float)
    c1 = np.zeros(k_max + 1)
    c2 = np.zeros(k_max + 1)
    if n == 2:
        # Chebyshev branch: G_k = T_k, Z_0 = 1, Z_k = 2 T_k
        g1_coef = 1.0
        c1[2:] = 2.0
        c2[2:] = 1.0
        g_one = np.ones(k_max + 1)
        zfac = np.full(k_max + 1, 2.0)
        zfac[0] = 1.0
    else:
        lam = 0.5 * (n - 2)
        g1_coef = 2.0 * lam
        kk = k[2:]
        c1[2:] = 2.0 * (kk + lam - 1.0) / kk
        c2[2:] = (kk + 2.0 * lam - 2.0) / kk
        g_one = np.ones(k_max + 1)
        if k_max >= 1:
            # C_k(1) = C_{k-1}(1) * (k - 1 + 2 lam) / k
            for i in range(1, k_max + 1):
                g_one[i] = g_one[i - 1] * (i - 1.0 + 2.0 * lam) / i
        zfac = (2.0 * k + n - 2.0) / (n - 2.0)
    d = zfac * g_one
    return ZonalTable(int(n), int(k_max), g1_coef, c1, c2, zfac, g_one, d)


def _check_t(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0 + 1e-10):
        raise DomainError("zonal argument must lie in [-1, 1]")
    return np.clip(t, -1.0, 1.0)


def zonal(k, t, table):
    """Evaluate ``Z_k(t)`` for scalar or array ``t`` in ``[-1, 1]``."""
    if k < 0 or k > table.k_max:
        raise DomainError(f"degree {k} outside table range 0..{table.k_max}")
    t = _check_t(t)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    g_prev = np.ones_like(t)
    if k == 0:
        out = table.zfac[0] * g_prev
        return float(out[0]) if scalar else out
    g_cur = table.g1_coef * t
    for i in range(2, k + 1):
        g_next = (table.c1[i] * t) * g_cur - table.c2[i] * g_prev
        g_prev, g_cur = g_cur, g_next
    out = table.zfac[k] * g_cur
    return float(out[0]) if scalar else out


def zonal_sequence(t, table, k_max=None):
    """All values ``Z_0(t), ..., Z_{k_max}(t)`` at a scalar ``t``."""
    if k_max is None:
        k_max = table.k_max
    if k_max > table.k_max:
        raise DomainError("k_max exceeds table range")
    t = float(_check_t(t))
    out = np.empty(k_max + 1)
    g_prev = 1.0
    out[0] = table.zfac[0]
    if k_max == 0:
        return out
    g_cur = table.g1_coef * t
    out[1] = table.zfac[1] * g_cur
    for i in range(2, k_max + 1):
        g_next = (table.c1[i] * t) * g_cur - table.c2[i] * g_prev
        g_prev, g_cur = g_cur, g_next
        out[i] = table.zfac[i] * g_cur
    return out
