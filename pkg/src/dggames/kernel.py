"""Backend selection for the situation kernel.

The compiled Cython kernel is used when it has been built; otherwise the
pure-Python twin is used. Set ``DGGAMES_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os

from dggames import _kernel_py

if os.environ.get("DGGAMES_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernel_py
else:
    try:
        from dggames import _ckernel as _impl  # type: ignore[attr-defined]
    except ImportError:  # extension not built
        _impl = _kernel_py

Kernel = _impl.Kernel
BACKEND: str = _impl.BACKEND
PyKernel = _kernel_py.Kernel


def available_backends() -> dict[str, type]:
    backends = {"python": _kernel_py.Kernel}
    try:
        from dggames import _ckernel  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        backends["cython"] = _ckernel.Kernel
    return backends
