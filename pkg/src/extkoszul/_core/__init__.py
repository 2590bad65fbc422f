"""Elimination kernels, compiled when available.

The compiled module is used unless it failed to build or the environment
variable ``EXTKOSZUL_PURE_PYTHON`` is set to a non-empty value.
"""

import os

from . import fallback

if os.environ.get("EXTKOSZUL_PURE_PYTHON"):
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = _compiled.BACKEND if _compiled is not None else fallback.BACKEND


def diagonalize_int(rows, ncols):
    if _compiled is not None:
        try:
            return _compiled.diagonalize_int(rows, ncols)
        except OverflowError:
            pass
    return fallback.diagonalize_int(rows, ncols)


def rank_mod_p(rows, ncols, p):
    if _compiled is not None and p < 2**31:
        return _compiled.rank_mod_p(rows, ncols, p)
    return fallback.rank_mod_p(rows, ncols, p)


def rref_mod_p(rows, ncols, p):
    if _compiled is not None and p < 2**31:
        return _compiled.rref_mod_p(rows, ncols, p)
    return fallback.rref_mod_p(rows, ncols, p)
