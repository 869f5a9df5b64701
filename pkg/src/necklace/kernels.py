"""Kernel selection: compiled extension when importable, pure Python otherwise.

Set ``NECKLACE_PURE=1`` to force the fallback.
"""
import os

from . import _fallback

BACKEND = "python"
if os.environ.get("NECKLACE_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _fallback
else:
    _impl = _fallback

integrate_segments = _impl.integrate_segments
leapfrog = _impl.leapfrog

__all__ = ["BACKEND", "integrate_segments", "leapfrog", "_fallback"]
