"""Backend selection for the hot automaton kernels.

The compiled module is used when importable; setting FIBAUTO_PURE_PYTHON=1
(or calling ``set_backend("python")``) forces the pure-Python fallback.
"""
from contextlib import contextmanager
import os

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

_BACKENDS = {"python": _pykernels}
if _ckernels is not None:
    _BACKENDS["cython"] = _ckernels

if _ckernels is not None and not os.environ.get("FIBAUTO_PURE_PYTHON"):
    _impl = _ckernels
else:
    _impl = _pykernels


def available_backends():
    return sorted(_BACKENDS)


def backend_name():
    return "cython" if _impl is _ckernels and _ckernels is not None else "python"


def set_backend(name):
    global _impl
    try:
        _impl = _BACKENDS[name]
    except KeyError:
        raise ValueError(f"backend {name!r} not available; have {available_backends()}") from None


@contextmanager
def using_backend(name):
    old = backend_name()
    set_backend(name)
    try:
        yield
    finally:
        set_backend(old)


def product(*args):
    return _impl.product(*args)


def determinize(*args):
    return _impl.determinize(*args)


def minimize(*args):
    return _impl.minimize(*args)


def coreachable(trans, acc):
    return _impl.coreachable(trans, acc)
