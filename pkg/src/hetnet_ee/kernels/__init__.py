"""Numeric kernel backend selection.

The compiled Cython extension is preferred when it imported cleanly; the
pure-numpy fallback is used otherwise.  Set ``HETNET_EE_BACKEND`` to
``python`` or ``cython`` to force a backend (forcing ``cython`` raises if
the extension is unavailable).
"""

import os

from . import _numpy

_requested = os.environ.get("HETNET_EE_BACKEND", "").lower()

if _requested == "python":
    _impl = _numpy
    BACKEND = "python"
else:
    try:
        from . import _core as _impl

        BACKEND = "cython"
    except ImportError:
        if _requested == "cython":
            raise ImportError(
                "HETNET_EE_BACKEND=cython but the compiled extension is not "
                "available; reinstall the package or unset the variable"
            )
        _impl = _numpy
        BACKEND = "python"

sinr_matrix = _impl.sinr_matrix
rate_matrix = _impl.rate_matrix
surrogate_value = _impl.surrogate_value
surrogate_value_grad = _impl.surrogate_value_grad


def backend():
    """Name of the active kernel backend: 'cython' or 'python'."""
    return BACKEND


def available_backends():
    """Mapping of backend name -> implementation module, for benchmarks."""
    impls = {"python": _numpy}
    try:
        from . import _core

        impls["cython"] = _core
    except ImportError:
        pass
    return impls
