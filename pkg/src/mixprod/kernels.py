"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it was built; otherwise, or
when ``MIXPROD_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the numpy versions in ``_pykernels`` are used.  ``BACKEND`` names the choice.
"""
import os

from . import _pykernels

if os.environ.get("MIXPROD_PURE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

hadamard_extension = _impl.hadamard_extension
superset_sums = _impl.superset_sums
support_histogram = _impl.support_histogram

__all__ = ["BACKEND", "hadamard_extension", "superset_sums", "support_histogram"]
