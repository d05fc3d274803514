"""Kernel backend selection.

The compiled extension is used when it imports; otherwise, or when the
environment variable ``LIPMOD_BACKEND=python`` is set, the numpy fallback
is used. ``BACKEND`` names the active implementation.
"""
import os

from . import _pykernels

if os.environ.get("LIPMOD_BACKEND", "").strip().lower() in {"python", "py", "pure"}:
    _impl = _pykernels
else:
    try:
        from . import _ckernels as _impl
    except ImportError:
        _impl = _pykernels

BACKEND = "cython" if _impl is not _pykernels else "python"

pairwise_distances = _impl.pairwise_distances
hildreth_sweeps = _impl.hildreth_sweeps
