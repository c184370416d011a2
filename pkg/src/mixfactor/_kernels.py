"""Select the rotation kernel backend at import.

The compiled extension is used when it was built; set
``MIXFACTOR_PURE_PYTHON=1`` to force the numpy fallback.
"""
import os

from . import _rotate_py

BACKENDS = {"python": _rotate_py}

try:
    from . import _rotate_core
except ImportError:
    _rotate_core = None
else:
    BACKENDS["cython"] = _rotate_core

if _rotate_core is not None and not os.environ.get("MIXFACTOR_PURE_PYTHON"):
    BACKEND = "cython"
else:
    BACKEND = "python"


def get_backend(name=None):
    name = BACKEND if name is None else name
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"rotation backend {name!r} is not available; have {sorted(BACKENDS)}"
        ) from None
