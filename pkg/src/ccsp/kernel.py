"""Selects the merge kernel at import time.

The compiled extension is used when it was built; set ``CCSP_PURE_PYTHON=1``
to force the pure-Python implementation.
"""

import os

from . import _pykernel

IMPLEMENTATION = "python"

if os.environ.get("CCSP_PURE_PYTHON", "0") not in ("1", "true", "yes"):
    try:
        from . import _ckernel as _impl

        IMPLEMENTATION = "cython"
    except ImportError:
        _impl = _pykernel
else:
    _impl = _pykernel

interleavings = _impl.interleavings
sync_projection = _impl.sync_projection

__all__ = ["IMPLEMENTATION", "interleavings", "sync_projection"]
