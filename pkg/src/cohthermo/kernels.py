"""Rotor kernel backend, chosen once at import.

The compiled extension ``_kernels`` is used when it was built; otherwise,
or when ``COHTHERMO_PURE_PYTHON`` is set to a non-empty value, the numpy
implementation in ``_kernels_py`` is used.  Both expose the same functions.
"""
import importlib
import os

__all__ = ["BACKEND", "floquet_step", "mixture_populations", "load_backend", "available_backends"]


def load_backend(name: str):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "cython":
        return importlib.import_module("cohthermo._kernels")
    if name == "python":
        return importlib.import_module("cohthermo._kernels_py")
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends() -> list:
    out = []
    for name in ("cython", "python"):
        try:
            load_backend(name)
        except ImportError:
            continue
        out.append(name)
    return out


if os.environ.get("COHTHERMO_PURE_PYTHON"):
    _impl = load_backend("python")
    BACKEND = "python"
else:
    try:
        _impl = load_backend("cython")
        BACKEND = "cython"
    except ImportError:
        _impl = load_backend("python")
        BACKEND = "python"

floquet_step = _impl.floquet_step
mixture_populations = _impl.mixture_populations
