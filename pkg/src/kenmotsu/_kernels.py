"""Backend selection for the jet kernels.

The compiled extension is used when it was built; set ``KENMOTSU_PURE_PYTHON=1``
to force the numpy fallback.
"""
import os

from kenmotsu import _jetkernel_py

if os.environ.get("KENMOTSU_PURE_PYTHON", "") not in ("", "0"):
    _impl = _jetkernel_py
    BACKEND = "python"
else:
    try:
        from kenmotsu import _jetkernel as _impl
        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _jetkernel_py
        BACKEND = "python"

mul = _impl.mul
compose = _impl.compose

__all__ = ["BACKEND", "mul", "compose"]
