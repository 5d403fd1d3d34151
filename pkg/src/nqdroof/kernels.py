"""Backend selection for the hot kernels.

The compiled Cython extension is preferred; the NumPy implementation is a
drop-in replacement selected at import time.  ``NQDROOF_PURE_PYTHON=1``
forces the fallback (useful for the backend benchmark and parity tests).
"""

import os

if os.environ.get("NQDROOF_PURE_PYTHON"):
    from . import _kernels_py as _backend
    BACKEND = "python"
else:
    try:
        from . import _kernels as _backend
        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _backend
        BACKEND = "python"

cauchy_sum = _backend.cauchy_sum
segment_log_sum = _backend.segment_log_sum
nearest_node = _backend.nearest_node


def backend_name() -> str:
    return BACKEND
