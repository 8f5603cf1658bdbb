"""Kernel selection: compiled extension when available, numpy fallback otherwise.

Set PWEIKONAL_PURE=1 to force the fallback (used by the benchmark and by the
equivalence tests).
"""

import os

from . import _kernels_py

BACKEND = "python"
uj_expand = _kernels_py.uj_expand
walk_expand = _kernels_py.walk_expand

if os.environ.get("PWEIKONAL_PURE", "") != "1":
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None
    if _compiled is not None:
        BACKEND = "compiled"
        uj_expand = _compiled.uj_expand
        walk_expand = _compiled.walk_expand


def get_backend(name: str):
    """Return the (uj_expand, walk_expand) pair of a named backend."""
    if name == "python":
        return _kernels_py.uj_expand, _kernels_py.walk_expand
    if name == "compiled":
        from . import _kernels as mod

        return mod.uj_expand, mod.walk_expand
    raise ValueError(f"unknown backend {name!r}")
