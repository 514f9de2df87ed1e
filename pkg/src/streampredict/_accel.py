"""Backend selection for the numeric kernels.

Numba is used when importable unless ``STREAMPREDICT_DISABLE_NUMBA`` is set
to a truthy value. The choice can also be flipped at runtime with
:func:`set_backend`, which is what the benchmark and the cross-backend tests do.
"""
import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAS_NUMBA = numba is not None

_FALSY = {"", "0", "false", "no", "off"}


def _env_disabled():
    return os.environ.get("STREAMPREDICT_DISABLE_NUMBA", "").strip().lower() not in _FALSY


_backend = "numba" if HAS_NUMBA and not _env_disabled() else "numpy"


def njit(*args, **kwargs):
    """``numba.njit`` with caching on, or an identity decorator without numba."""
    if not HAS_NUMBA:
        if args and callable(args[0]):
            return args[0]
        return lambda f: f
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)


def get_backend():
    return _backend


def set_backend(name):
    """Select ``"numba"`` or ``"numpy"`` kernels; returns the previous backend."""
    global _backend
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba is not installed")
    previous, _backend = _backend, name
    return previous


def use_numba():
    return _backend == "numba"
