"""Constraint-update kernels with a compiled fast path.

The coordinate-ascent inner loop is many small per-class O(d^2) operations,
which is exactly where Python call overhead dominates. A Cython extension
(``maxlens.kernels._fast``) implements the hot updates; ``reference.py`` is
the NumPy twin with identical semantics. The compiled backend is selected at
import when available; set MAXLENS_KERNELS=python to force the fallback.

Both backends share the status codes below and the update contract:
``linear_update`` / ``quadratic_update`` mutate the stacked per-class
parameter arrays in place and return ``(lam, vtilde, status)`` where ``lam``
is the applied multiplier change and ``vtilde`` the pre-update expectation.
"""

from __future__ import annotations

import os

from . import reference

STATUS_OK = 0
STATUS_SATISFIED = 1  # already within root tolerance, no-op
STATUS_STALLED = 2  # no variance left in the direction, no-op
STATUS_CLAMPED = 3  # root outside the feasible interval, clamped update

# Multiplier magnitude cap. Zero-variance targets push the root to infinity;
# clamping at 1e12 collapses the direction to ~1e-12 variance, matching the
# eigenvalue floor used when duals are refreshed.
LAMBDA_CAP = 1e12

_compiled = None
if os.environ.get("MAXLENS_KERNELS", "").lower() not in ("python", "reference"):
    try:
        from . import _fast as _compiled  # type: ignore[attr-defined]
    except ImportError:
        _compiled = None

_active = _compiled if _compiled is not None else reference
BACKEND = "compiled" if _compiled is not None else "python"

linear_update = _active.linear_update
quadratic_update = _active.quadratic_update
sweep = _active.sweep
expectations = _active.expectations


def available_backends() -> dict[str, object]:
    out = {"python": reference}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def select(name: str) -> str:
    """Rebind the active backend (for benchmarks and parity tests).

    Not safe to call while a fit is running.
    """
    global _active, BACKEND, linear_update, quadratic_update, sweep, expectations
    backends = available_backends()
    if name not in backends:
        raise ValueError(f"backend {name!r} not available; have {sorted(backends)}")
    _active = backends[name]
    BACKEND = name
    linear_update = _active.linear_update
    quadratic_update = _active.quadratic_update
    sweep = _active.sweep
    expectations = _active.expectations
    return BACKEND
