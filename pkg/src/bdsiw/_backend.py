"""Kernel backend selection.

The compiled extension is used when importable. Setting the environment
variable ``BDSIW_BACKEND=python`` forces the numpy fallback.
"""

import os

from . import _pykernels

MAX_DSIW = _pykernels.MAX_DSIW
MIN_DSW = _pykernels.MIN_DSW


def _load(name):
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels

        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def _select():
    requested = os.environ.get("BDSIW_BACKEND", "").strip().lower()
    if requested:
        return requested, _load(requested)
    try:
        return "cython", _load("cython")
    except ImportError:
        return "python", _pykernels


BACKEND, kernels = _select()


def get_kernels(name=None):
    """Kernel module for ``name`` (``"cython"`` or ``"python"``), default the active one."""
    return kernels if name is None else _load(name)
