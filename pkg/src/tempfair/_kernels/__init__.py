"""Counting kernels behind the SD predicates and the oracle's pruning.

The compiled extension is used when it was built; otherwise the pure-Python
module with identical signatures is loaded. ``use_backend`` switches explicitly
(tests and the benchmark compare both).
"""

from array import array

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

SD_EF = _pykernels.SD_EF
SD_EF1 = _pykernels.SD_EF1
SD_PROP1 = _pykernels.SD_PROP1
SUFFICIENCY = _pykernels.SUFFICIENCY
NECESSITY = _pykernels.NECESSITY

_active = _ckernels if _ckernels is not None else _pykernels


def available_backends():
    return ("cython", "python") if _ckernels is not None else ("python",)


def backend():
    return "cython" if _active is _ckernels and _ckernels is not None else "python"


def use_backend(name):
    """Select ``"cython"`` or ``"python"``; returns the previously active name."""
    global _active
    previous = backend()
    if name == "python":
        _active = _pykernels
    elif name == "cython":
        if _ckernels is None:
            raise RuntimeError("the compiled kernels are not built")
        _active = _ckernels
    else:
        raise ValueError(f"unknown backend {name!r}")
    return previous


def ints(values):
    return array("i", values)


def sd_scan(owner, boundary, n, i, mode):
    return _active.sd_scan(owner, boundary, n, i, mode)


def prune_blocks(assign, idx, idx_off, lower, agents, agents_off, n):
    return _active.prune_blocks(assign, idx, idx_off, lower, agents, agents_off, n)
