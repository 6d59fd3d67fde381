"""Backend selection for the series inner loop.

The compiled extension is preferred when importable; the NumPy fallback
is always available.  ``BERGMAN_LAB_BACKEND`` forces the choice:
``compiled`` (error if missing), ``python``, or ``auto`` (default).
"""

from __future__ import annotations

import os

from . import _series_py

try:
    from . import _series_cy
except ImportError:  # extension not built on this install
    _series_cy = None

HAVE_COMPILED = _series_cy is not None

_BACKENDS = {}
_BACKENDS["python"] = _series_py
if HAVE_COMPILED:
    _BACKENDS["compiled"] = _series_cy

_forced = os.environ.get("BERGMAN_LAB_BACKEND", "auto").strip().lower()
if _forced not in ("auto", "python", "compiled"):
    raise RuntimeError(
        f"BERGMAN_LAB_BACKEND={_forced!r} not one of auto, python, compiled"
    )
if _forced == "compiled" and not HAVE_COMPILED:
    raise RuntimeError(
        "BERGMAN_LAB_BACKEND=compiled but the extension is not built"
    )

_active = _forced if _forced != "auto" else ("compiled" if HAVE_COMPILED else "python")


def backend_name():
    return _active


def set_backend(name):
    """Switch backends at runtime (used by tests and benchmarks)."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"backend {name!r} unavailable; have {sorted(_BACKENDS)}")
    _active = name


def get_backend(name=None):
    return _BACKENDS[name or _active]


def series_sum(a, c1, c2, rs, brs, g1_coef, q, t, tol):
    return _BACKENDS[_active].series_sum(a, c1, c2, rs, brs, g1_coef, q, t, tol)
