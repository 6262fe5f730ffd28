"""Pick the kernel implementation at import time.

The compiled extension is preferred; setting ``ADAPTIM_PURE_PYTHON=1``
forces the pure-Python fallback.
"""
import os

if os.environ.get("ADAPTIM_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as kernels
else:
    try:
        from . import _kernels as kernels
    except ImportError:  # extension not built
        from . import _pykernels as kernels

BACKEND = kernels.NAME
