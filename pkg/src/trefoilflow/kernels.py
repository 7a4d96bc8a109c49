"""Kernel dispatch: the compiled ``_core`` extension when importable, else ``_purepy``.

Set ``TREFOILFLOW_PURE=1`` to force the pure-Python path.
"""
import os

from . import _purepy

BACKEND = "python"
if os.environ.get("TREFOILFLOW_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _core as _impl

        BACKEND = "compiled"
    except ImportError:  # extension not built
        _impl = _purepy
else:
    _impl = _purepy

dopri5_lorenz = _impl.dopri5_lorenz
segment_crossings = _impl.segment_crossings


def available_backends():
    """Map backend name to module for every backend importable here."""
    out = {"python": _purepy}
    try:
        from . import _core

        out["compiled"] = _core
    except ImportError:
        pass
    return out
