"""Kernel backend selection.

The hot loop of the package is adaptive integration of the coupled
four-dimensional field over Poincare periods.  A compiled Cython core is
used when available; a pure-Python twin with identical coefficients and
step control serves as fallback and reference.  Set ``ASYMOSC_KERNEL`` to
``python`` or ``cython`` to force a backend (default ``auto``).
"""

import os

_requested = os.environ.get("ASYMOSC_KERNEL", "auto").lower()

if _requested not in ("auto", "cython", "python"):
    raise RuntimeError(f"unknown ASYMOSC_KERNEL value: {_requested!r}")

if _requested in ("auto", "cython"):
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise
        from . import pure as _impl

        BACKEND = "python"
else:
    from . import pure as _impl

    BACKEND = "python"

integrate_system = _impl.integrate_system

STATUS_OK = 0
STATUS_STEP_UNDERFLOW = 1


def backend_name() -> str:
    """Name of the active kernel backend ("cython" or "python")."""
    return BACKEND


def get_backend(name: str):
    """Return a specific backend module ("python" or "cython"), for benchmarks."""
    if name == "python":
        from . import pure

        return pure
    if name == "cython":
        from . import _core

        return _core
    raise ValueError(f"unknown backend {name!r}")
