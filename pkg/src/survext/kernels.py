"""Backend selection for the hot loops.

The compiled extension is used when it imports; otherwise the NumPy fallback.
Set ``SURVEXT_BACKEND=python`` to force the fallback.
"""

import os

from survext import _pykernels

_forced = os.environ.get("SURVEXT_BACKEND", "").strip().lower()

_impl = _pykernels
BACKEND = "python"
if _forced != "python":
    try:
        from survext import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        if _forced == "cython":
            raise

cross_sum = _impl.cross_sum
self_sum = _impl.self_sum
dsed_estimate = _impl.dsed_estimate
dsed_estimate_batch = _impl.dsed_estimate_batch
ratio_matrix = _impl.ratio_matrix
statistic_batch = _impl.statistic_batch


def backends():
    """Importable kernel modules keyed by name; used by tests and the benchmark."""
    out = {"python": _pykernels}
    try:
        from survext import _ckernels
        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
