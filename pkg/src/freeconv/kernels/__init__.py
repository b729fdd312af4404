"""Kernel backend selection.

The compiled extension (Cython) is used when it importable; otherwise the
NumPy reference implementation serves every call.  Set FREECONV_PURE_PYTHON=1
to force the reference backend.  Both expose the same two entry points and
are held to bit-level parity by the test suite (within solver tolerance).
"""

import os

from . import reference
from .reference import solve_rect_inverse, solve_subordination  # noqa: F401

_impl = reference
if not os.environ.get("FREECONV_PURE_PYTHON"):
    try:
        from . import _fast as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = reference

omega1_solve = _impl.omega1_solve
rect_h_solve = _impl.rect_h_solve


def backend_name():
    return getattr(_impl, "BACKEND", "python")
