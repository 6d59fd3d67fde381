"""Classification of truncated-integral growth.

A quantity like a weighted norm or a level-set functional is computed
on a nested family of truncated domains; the resulting partial values
``I_1 <= I_2 <= ...`` are classified as

* ``FINITE`` when the last increments decay geometrically (or the whole
  mass is numerically zero),
* ``DIVERGENT`` when the increments refuse to decay while the log-log
  slope stays positive and stable (this catches both power-law and
  logarithmic divergence: the latter has near-constant increments), or
* ``INCONCLUSIVE`` when neither signature is clean.  Inconclusive is a
  legal terminal state, reported as such.

``cut_param`` is the boundary-resolution coordinate: ``-log(1 - R)``
for ball truncations ``|x| <= R``, ``log(1/s_min)`` or ``log(s_max)``
for half-space windows.  Dyadic truncations make it uniformly spaced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["DivergenceProfile", "classify_truncations", "S2Bracket", "bisect_s2"]

FINITE = "FINITE"
DIVERGENT = "DIVERGENT"
INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class DivergenceProfile:
    """Truncated values of a monotone quantity plus their classification."""

    cut_param: np.ndarray
    values: np.ndarray
    fitted_exponent: float
    classification: str

    @property
    def increments(self):
        return np.diff(self.values)

    @property
    def truncation_grid(self):
        return self.cut_param

    def is_finite(self):
        return self.classification == FINITE

    def is_divergent(self):
        return self.classification == DIVERGENT


def classify_truncations(cut_param, values, zero_tol=1e-300, rel_tol=1e-9,
                         finite_ratio=0.45, divergent_ratio=0.9):
    """Build a :class:`DivergenceProfile` from truncated values.

    Needs at least five truncation levels so three consecutive
    increment ratios exist (four increments).  ``values`` must be nondecreasing up to
    rounding (they are partial integrals of a nonnegative integrand).
    """
    cut = np.asarray(cut_param, dtype=float)
    vals = np.asarray(values, dtype=float)
    if cut.shape != vals.shape or cut.ndim != 1:
        raise DomainError("cut_param and values must be equal-length vectors")
    if cut.size < 5:
        raise DomainError("need at least 5 truncation levels to classify")
    if np.any(np.diff(cut) <= 0):
        raise DomainError("cut_param must be strictly increasing")
    if np.any(vals < -rel_tol * max(1.0, float(np.abs(vals).max()))):
        raise DomainError("truncated values must be nonnegative")

    inc = np.maximum(np.diff(vals), 0.0)
    last = float(vals[-1])

    # log-log slope over the last three points (exponent of divergence)
    tail_v = np.maximum(vals[-3:], zero_tol)
    slope_fit = np.polyfit(cut[-3:], np.log(tail_v), 1)[0]

    if last <= zero_tol or np.all(inc[-3:] <= rel_tol * max(last, zero_tol)):
        return DivergenceProfile(cut, vals, float(slope_fit), FINITE)

    floor = rel_tol * last
    denom = np.maximum(inc[-4:-1], floor)
    ratios = inc[-3:] / denom
    # increments of dyadic truncations decay per unit of cut_param; put
    # the ratios on that common scale so uneven grids classify alike
    steps = np.diff(cut[-4:])
    ratios = ratios ** (np.log(2.0) / steps)

    if np.all(ratios <= finite_ratio):
        return DivergenceProfile(cut, vals, float(slope_fit), FINITE)

    local = np.diff(np.log(np.maximum(vals[-4:], zero_tol))) / steps
    stable = local.min() > 0 and local.max() <= 2.0 * max(local.min(), 1e-12)
    if np.all(ratios >= divergent_ratio) and stable:
        return DivergenceProfile(cut, vals, float(slope_fit), DIVERGENT)
    return DivergenceProfile(cut, vals, float(slope_fit), INCONCLUSIVE)


@dataclass(frozen=True)
class S2Bracket:
    """Bisection bracket for the critical level ``s_2``.

    ``lower`` is the largest level classified divergent (0 when none
    was), ``upper`` the smallest classified finite.  ``resolved`` is
    False when an inconclusive classification stopped the bisection.
    """

    lower: float
    upper: float
    resolved: bool
    evaluations: tuple

    @property
    def width(self):
        return self.upper - self.lower


def bisect_s2(classify, eps_lo, eps_hi, target_width, max_iter=12):
    """Bisect ``classify(eps) -> classification`` down to ``target_width``.

    ``eps_hi`` should sit above the weighted sup so the level set is
    empty and the functional trivially finite; ``eps_lo`` below any
    plausible critical level.  All-finite responses drive the lower end
    to 0 (membership signature).
    """
    if not (0 < eps_lo < eps_hi):
        raise DomainError("need 0 < eps_lo < eps_hi")
    if target_width <= 0:
        raise DomainError("need target_width > 0")
    evals = []

    def run(eps):
        c = classify(eps)
        evals.append((float(eps), c))
        return c

    hi_class = run(eps_hi)
    if hi_class == DIVERGENT:
        # nothing finite in range; report the unresolved full bracket
        return S2Bracket(eps_hi, float("inf"), False, tuple(evals))
    lo_class = run(eps_lo)
    lower, upper = (eps_lo, eps_hi) if lo_class == DIVERGENT else (0.0, eps_lo)
    if lo_class == INCONCLUSIVE:
        return S2Bracket(0.0, eps_hi, False, tuple(evals))
    if hi_class == INCONCLUSIVE:
        return S2Bracket(lower, float(eps_hi), False, tuple(evals))

    for _ in range(max_iter):
        if upper - lower <= target_width:
            break
        mid = 0.5 * (lower + upper) if lower > 0 else 0.5 * upper
        c = run(mid)
        if c == DIVERGENT:
            lower = mid
        elif c == FINITE:
            upper = mid
        else:
            return S2Bracket(lower, upper, False, tuple(evals))
    return S2Bracket(lower, upper, True, tuple(evals))
