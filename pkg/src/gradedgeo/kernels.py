"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise the pure-Python
module is used. Set ``GRADEDGEO_PURE=1`` to force the fallback.
"""

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if not os.environ.get("GRADEDGEO_PURE"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _kernels_py

mono_mul = _impl.mono_mul
mul_terms = _impl.mul_terms
ldiff_terms = _impl.ldiff_terms
poly_mul = _impl.poly_mul


def backends():
    """Map backend name to module for every backend importable here."""
    out = {"python": _kernels_py}
    try:
        from . import _ckernels

        out["cython"] = _ckernels
    except ImportError:
        pass
    return out
