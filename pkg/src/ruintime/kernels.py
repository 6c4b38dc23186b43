"""Select the Monte Carlo kernel backend at import time.

Prefers the compiled extension; falls back to the pure-Python reference
implementation when the extension is missing or RUINTIME_PURE is set.
"""

import os

from . import _walk_kernel_py

if os.environ.get("RUINTIME_PURE"):
    _impl = _walk_kernel_py
else:
    try:
        from . import _walk_kernel as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _walk_kernel_py

BACKEND = _impl.BACKEND
walk_chunk = _impl.walk_chunk
coupled_chunk = _impl.coupled_chunk
rng_selftest = _impl.rng_selftest


def backend_name():
    return BACKEND
