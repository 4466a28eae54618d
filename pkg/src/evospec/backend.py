"""Kernel backend selection: compiled extension when available, numpy otherwise.

Set EVOSPEC_BACKEND=python (or =cython) to force a choice; forcing cython
raises if the extension was not built.
"""

import os

import numpy as np

from . import _kernels_py

__all__ = ["backend_name", "multitaper_grid"]

_requested = os.environ.get("EVOSPEC_BACKEND", "").strip().lower()

if _requested == "python":
    _impl = _kernels_py
    backend_name = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        backend_name = "cython"
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "EVOSPEC_BACKEND=cython but the evospec._kernels extension is not built"
            ) from None
        _impl = _kernels_py
        backend_name = "python"


def multitaper_grid(x, centers, tapers, freqs) -> np.ndarray:
    """Dispatch to the selected kernel, coercing inputs to contiguous float64."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    centers = np.ascontiguousarray(centers, dtype=np.int64)
    tapers = np.ascontiguousarray(tapers, dtype=np.float64)
    freqs = np.ascontiguousarray(freqs, dtype=np.float64)
    return _impl.multitaper_grid(x, centers, tapers, freqs)
