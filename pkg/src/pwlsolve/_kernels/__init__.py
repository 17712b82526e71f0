"""Kernel backend selection.

The compiled extension is preferred when it imported cleanly; setting
``PWLSOLVE_PURE=1`` in the environment forces the pure-Python fallback.
``use_backend`` switches at runtime (used by the backend benchmark and the
equivalence tests); solver code always calls through the module-level
wrappers so the switch takes effect immediately.
"""

import os

from . import fallback

try:
    from . import _native
except ImportError:
    _native = None

_impl = fallback if (os.environ.get("PWLSOLVE_PURE") or _native is None) else _native


def available_backends():
    return ("python",) if _native is None else ("native", "python")


def active_backend() -> str:
    return _impl.NAME


def use_backend(name: str) -> None:
    global _impl
    if name == "python":
        _impl = fallback
    elif name == "native":
        if _native is None:
            raise RuntimeError("compiled kernels are not available in this build")
        _impl = _native
    else:
        raise ValueError(f"unknown backend {name!r}; expected 'native' or 'python'")


def csr_matvec(indptr, indices, data, x):
    return _impl.csr_matvec(indptr, indices, data, x)


def csr_lower_solve(indptr, indices, data, diag, rhs):
    return _impl.csr_lower_solve(indptr, indices, data, diag, rhs)


def dense_lower_solve(lower, diag, rhs):
    return _impl.dense_lower_solve(lower, diag, rhs)
