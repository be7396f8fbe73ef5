"""Kernel selection: the compiled extension when importable, else pure Python.

Set ``PSIDSSP_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _ssp_py

_forced_pure = os.environ.get("PSIDSSP_PURE_PYTHON", "").strip() not in ("", "0")

try:
    if _forced_pure:
        raise ImportError("pure-Python kernel requested")
    from . import _ssp as _compiled
except ImportError:
    _compiled = None

BACKEND = "python" if _compiled is None else "cython"


def kernel(name: str | None = None):
    """Return the kernel module for ``name`` ("cython", "python", or None for the default)."""
    name = name or BACKEND
    if name == "python":
        return _ssp_py
    if name == "cython":
        if _compiled is None:
            raise RuntimeError("compiled kernel is not available; build the extension first")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def available() -> list[str]:
    return ["python"] if _compiled is None else ["cython", "python"]
