"""Kernel backend selection.

The hot inner loops (grid interpolation, point-set distances) exist twice:
a numba-jitted version and a pure-numpy version with identical arithmetic.
Selection happens once at import time via the ``ARCFLOW_BACKEND``
environment variable:

    ARCFLOW_BACKEND=numba   force the jitted kernels (error if numba missing)
    ARCFLOW_BACKEND=numpy   force the pure-numpy fallback
    unset / auto            numba when importable, numpy otherwise

``benchmarks/bench_kernels.py`` compares the two.
"""

import os

BACKEND_ENV_VAR = "ARCFLOW_BACKEND"


def _load(choice):
    if choice == "numba":
        from arcflow import _kernels_numba
        return _kernels_numba
    from arcflow import _kernels_numpy
    return _kernels_numpy


def _pick():
    choice = os.environ.get(BACKEND_ENV_VAR, "auto").strip().lower()
    if choice in ("", "auto"):
        try:
            return "numba", _load("numba")
        except ImportError:
            return "numpy", _load("numpy")
    if choice in ("numba", "numpy"):
        return choice, _load(choice)
    raise ValueError(
        f"{BACKEND_ENV_VAR} must be 'numba', 'numpy' or 'auto', got {choice!r}")


BACKEND_NAME, kernels = _pick()
