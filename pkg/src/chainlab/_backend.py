"""Kernel backend selection.

The compiled ``_ckernels`` module is used when it imports and the ambient
vertex count fits in 64 bits; otherwise the pure-Python twin runs.  Setting
``CHAINLAB_PURE_PYTHON=1`` forces the fallback for the whole process.
"""

import os

from chainlab import _pykernels

WORD_BITS = 64

ckernels = None
if not os.environ.get("CHAINLAB_PURE_PYTHON"):
    try:
        from chainlab import _ckernels as ckernels
    except ImportError:  # extension not built
        ckernels = None

BACKEND = "cython" if ckernels is not None else "python"


def kernels(N):
    """Kernel module to use for a complex on ``N`` ambient vertices."""
    if ckernels is not None and N <= WORD_BITS:
        return ckernels
    return _pykernels


def available():
    """Names of the importable backends, compiled first."""
    return ["cython", "python"] if ckernels is not None else ["python"]


def by_name(name):
    if name == "cython":
        if ckernels is None:
            raise ImportError("compiled kernels are not built")
        return ckernels
    if name == "python":
        return _pykernels
    raise ValueError(f"unknown backend {name!r}")
