"""Kernel backend selection.

The compiled module is used when it was built and ``KLEINTORELLI_PURE``
is unset; otherwise the numpy fallback takes over.  Both expose
``mark_cube``, ``collect_cube``, ``mark_pairs`` and ``stabilizes`` with
identical semantics.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS: dict[str, ModuleType] = {"python": _pykernels}
if _ckernels is not None:
    BACKENDS["cython"] = _ckernels

if _ckernels is not None and not os.environ.get("KLEINTORELLI_PURE"):
    BACKEND = "cython"
else:
    BACKEND = "python"


def get(name: str | None = None) -> ModuleType:
    name = name or BACKEND
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available (have {sorted(BACKENDS)})") from None
