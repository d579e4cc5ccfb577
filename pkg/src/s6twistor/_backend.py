"""Select the kernel implementation.

The compiled module is used when it was built; setting ``S6TWISTOR_PURE_PYTHON=1``
forces the numpy fallback (useful for benchmarking and for checking that both
paths agree).
"""
import os

from . import _kernels_py

kernels = _kernels_py
BACKEND = "python"

if not os.environ.get("S6TWISTOR_PURE_PYTHON"):
    try:
        from . import _ckernels
    except ImportError:  # extension not built
        pass
    else:
        kernels = _ckernels
        BACKEND = "cython"

signed_table_mul = kernels.signed_table_mul
sparse_bilinear = kernels.sparse_bilinear
