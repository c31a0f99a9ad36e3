"""Select the compiled core or the numpy fallback.

Set ``HEATBA_PURE_PYTHON=1`` to force the fallback even when the extension is
built.
"""
import os

from . import _pycore

if os.environ.get("HEATBA_PURE_PYTHON") == "1":
    _impl = _pycore
    COMPILED = False
else:
    try:
        from . import _core as _impl
        COMPILED = True
    except ImportError:
        _impl = _pycore
        COMPILED = False

NAME = "cython" if COMPILED else "numpy"

interval_oscillation = _impl.interval_oscillation
besov_rows = _impl.besov_rows
pl_convolve = _impl.pl_convolve


def threads():
    """Worker count for batched FFTs, capped by ``HEATBA_THREADS``."""
    cap = os.environ.get("HEATBA_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = max(1, min(n, int(cap)))
        except ValueError:
            pass
    return n
