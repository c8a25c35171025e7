"""Select the compiled kernels when available, otherwise the numpy fallback.

Set ``HIDDENSUMS_PURE=1`` to force the fallback (used by the benchmark and by
the backend equivalence tests).
"""

import os

from . import _fallback

fallback = _fallback

if os.environ.get("HIDDENSUMS_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"

try:
    from . import _kernels as compiled
except ImportError:
    compiled = None

rref_inplace = _impl.rref_inplace
count_full_rank = _impl.count_full_rank
