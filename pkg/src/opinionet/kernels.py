"""Kernel backend selection.

The compiled extension (`opinionet._kernels`, built from Cython) is
preferred when importable; otherwise the vectorized numpy kernels take
over. Set OPINIONET_BACKEND=python or =compiled to force one; forcing
the compiled backend when it is absent is an import error rather than a
silent downgrade.
"""

from __future__ import annotations

import os

from . import _kernels_py

try:
    from . import _kernels as _compiled
except ImportError:
    _compiled = None

_forced = os.environ.get("OPINIONET_BACKEND")
if _forced == "python":
    _impl = _kernels_py
elif _forced == "compiled":
    if _compiled is None:
        raise ImportError(
            "OPINIONET_BACKEND=compiled but the extension is not built; "
            "run `python setup.py build_ext --inplace`"
        )
    _impl = _compiled
elif _forced:
    raise ImportError(f"unknown OPINIONET_BACKEND {_forced!r}")
else:
    _impl = _compiled if _compiled is not None else _kernels_py


def backend_name():
    """Name of the backend in use: 'compiled' or 'python'."""
    return _impl.BACKEND


def available_backends():
    """Mapping of backend name -> kernel module, for tests and benchmarks."""
    out = {"python": _kernels_py}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out


def get_backend(name=None):
    if name is None:
        return _impl
    try:
        return available_backends()[name]
    except KeyError:
        raise ImportError(f"backend {name!r} not available") from None


jacobi_solve = _impl.jacobi_solve
pagerank_iterate = _impl.pagerank_iterate
admm_iterate = _impl.admm_iterate
