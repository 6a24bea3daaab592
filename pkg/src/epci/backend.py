"""Kernel backend selection.

Two interchangeable kernels exist: the compiled Cython module
``epci._ckernel`` and the pure-Python ``epci._pykernel``.  The compiled one
is used when importable; set ``EPCI_BACKEND=python`` or ``EPCI_BACKEND=c``
to force a choice (forcing ``c`` fails loudly if the extension is missing).

All kernel functions are pure and stateless, so swapping backends mid-run
(as the parity tests and benchmarks do via :func:`override`) is safe.
"""

from __future__ import annotations

import contextlib
import os

from . import _pykernel

try:
    from . import _ckernel
except ImportError:
    _ckernel = None


def _initial():
    forced = os.environ.get("EPCI_BACKEND", "").strip().lower()
    if forced in ("python", "py", "pure"):
        return _pykernel
    if forced in ("c", "compiled", "cython"):
        if _ckernel is None:
            raise RuntimeError(
                "EPCI_BACKEND requested the compiled kernel but "
                "epci._ckernel is not importable"
            )
        return _ckernel
    if forced:
        raise RuntimeError(f"unknown EPCI_BACKEND value: {forced!r}")
    return _ckernel if _ckernel is not None else _pykernel


_active = _initial()


def active():
    """The kernel module currently in use."""
    return _active


def name() -> str:
    """Short name of the active kernel: 'c' or 'python'."""
    return _active.kernel_name()


def available() -> tuple[str, ...]:
    return ("c", "python") if _ckernel is not None else ("python",)


def _module_for(label: str):
    label = label.strip().lower()
    if label in ("python", "py", "pure"):
        return _pykernel
    if label in ("c", "compiled", "cython"):
        if _ckernel is None:
            raise RuntimeError("compiled kernel is not available")
        return _ckernel
    raise ValueError(f"unknown backend {label!r}")


def use(label: str) -> None:
    """Switch the active kernel ('c' or 'python')."""
    global _active
    _active = _module_for(label)


@contextlib.contextmanager
def override(label: str):
    """Temporarily switch kernels (used by tests and benchmarks)."""
    global _active
    previous = _active
    _active = _module_for(label)
    try:
        yield _active
    finally:
        _active = previous
