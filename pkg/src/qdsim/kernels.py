"""Kernel backend selection.

The compiled extension is used when it was built; otherwise the numpy
implementation.  Setting ``QDSIM_PURE_PYTHON=1`` forces the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

try:
    if os.environ.get("QDSIM_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("compiled kernel disabled by QDSIM_PURE_PYTHON")
    from . import _kernels_c as _impl
    BACKEND = "cython"
except ImportError:
    _impl = _kernels_py
    BACKEND = "python"

count_errors = _impl.count_errors


def backends() -> dict:
    """All importable backends by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels_c
        out["cython"] = _kernels_c
    except ImportError:
        pass
    return out
