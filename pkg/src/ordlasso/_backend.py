"""Kernel backend selection.

The compiled extension is preferred; the pure-Python module is used when it
cannot be imported. ``use_backend`` switches explicitly (tests, benchmarks).
"""

import contextlib

from ordlasso import _pykernels

try:
    from ordlasso import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_AVAILABLE = {"python": _pykernels}
if _ckernels is not None:
    _AVAILABLE["cython"] = _ckernels

_active = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return sorted(_AVAILABLE)


def backend_name():
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def kernels():
    return _active


def set_backend(name):
    global _active
    try:
        _active = _AVAILABLE[name]
    except KeyError:
        raise ValueError(
            f"backend {name!r} not available; choose from {available_backends()}"
        ) from None


@contextlib.contextmanager
def use_backend(name):
    """Temporarily route all kernel calls through the named backend."""
    previous = backend_name()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(previous)
