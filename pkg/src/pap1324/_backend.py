"""Kernel selection: compiled extension when importable, else pure Python.

Set ``PAP1324_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _pykernel

if os.environ.get("PAP1324_PURE_PYTHON"):
    kernel = _pykernel
else:
    try:
        from . import _ckernel as kernel
    except ImportError:  # extension not built
        kernel = _pykernel

BACKEND = kernel.NAME
