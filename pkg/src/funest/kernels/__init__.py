"""Kernel backend selection.

The compiled Cython extension is preferred when present; otherwise the
pure-Python implementation is used. Set ``FUNEST_KERNELS=python`` or
``FUNEST_KERNELS=compiled`` to force a backend (the latter raises if
the extension is missing).
"""

import os

from . import _fallback

_forced = os.environ.get("FUNEST_KERNELS")

if _forced == "python":
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        if _forced == "compiled":
            raise ImportError(
                "FUNEST_KERNELS=compiled but the extension is not built; "
                "reinstall with a C compiler available"
            )
        _impl = _fallback
        BACKEND = "python"

riccati_path = _impl.riccati_path
sensitivity_path = _impl.sensitivity_path
mean_paths = _impl.mean_paths

__all__ = ["BACKEND", "riccati_path", "sensitivity_path", "mean_paths"]
