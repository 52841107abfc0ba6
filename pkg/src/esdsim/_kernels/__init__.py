"""Numerical kernel backend selection.

The compiled Cython core (``esdsim._kernels._core``) is preferred when it
imported cleanly; otherwise the numpy fallback (``py_backend``) is used.
Set ``ESDSIM_BACKEND=python`` or ``ESDSIM_BACKEND=compiled`` before import to
force a choice (the latter raises if the extension is missing).

Both backends expose the same three functions with identical contracts:
``jacobi_eigh``, ``apply_kraus``, ``rk4_propagate``.
"""

import os

from . import py_backend

_requested = os.environ.get("ESDSIM_BACKEND", "auto").strip().lower()
if _requested not in ("auto", "compiled", "python"):
    raise RuntimeError(
        "ESDSIM_BACKEND must be one of auto|compiled|python, got %r" % _requested
    )

if _requested == "python":
    _impl = py_backend
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "compiled"
    except ImportError:
        if _requested == "compiled":
            raise
        _impl = py_backend
        BACKEND = "python"

jacobi_eigh = _impl.jacobi_eigh
apply_kraus = _impl.apply_kraus
rk4_propagate = _impl.rk4_propagate


def get_backend():
    """Name of the active kernel backend: 'compiled' or 'python'."""
    return BACKEND
