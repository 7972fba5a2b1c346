"""Collision-step kernel selection: the Cython extension when it built,
otherwise the numpy fallback.  Set COLLISIM_PURE_PYTHON=1 to force the
fallback."""

import os

from . import _pure

if os.environ.get("COLLISIM_PURE_PYTHON"):
    _impl = _pure
    BACKEND = "pure-python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pure
        BACKEND = "pure-python"


def apply_step(u, rho, weights, dim_s, dim_e):
    return _impl.apply_step(u, rho, weights, dim_s, dim_e)
