"""Hot numeric kernels: compiled core plus NumPy implementation.

Two interchangeable implementations of the network forward/backward passes
live here: ``pure`` (NumPy, BLAS-backed) and ``_fast`` (Cython).  Measured on
the shapes this package uses (see ``benchmarks/bench_kernels.py``), NumPy
wins on mini-batches while the compiled loops win 2-3x on single-sample
calls, so the default ``auto`` mode dispatches per call: compiled for
single-row inputs (action selection), NumPy for batches (training).

Set ``GREENHOUSE_RL_KERNELS`` to force one implementation for everything:
``compiled`` (raises if the extension is missing), ``python``, or ``auto``
(default).  ``BACKEND`` reports the active mode.
"""

from __future__ import annotations

import importlib
import os

from . import pure

_requested = os.environ.get("GREENHOUSE_RL_KERNELS", "auto").strip().lower()

_fast = None
if _requested in ("auto", "", "compiled", "c"):
    try:
        _fast = importlib.import_module("._fast", __name__)
    except ImportError:
        if _requested in ("compiled", "c"):
            raise

if _requested in ("auto", ""):
    BACKEND = "hybrid" if _fast is not None else "python"
elif _requested in ("compiled", "c"):
    BACKEND = "compiled"
elif _requested in ("python", "py", "pure"):
    BACKEND = "python"
else:
    raise ValueError(
        f"GREENHOUSE_RL_KERNELS={_requested!r} not recognized "
        "(expected 'auto', 'compiled', or 'python')"
    )

if BACKEND == "compiled":
    mlp_forward = _fast.mlp_forward
    mlp_backward = _fast.mlp_backward
elif BACKEND == "python":
    mlp_forward = pure.mlp_forward
    mlp_backward = pure.mlp_backward
else:

    def mlp_forward(x, w1, b1, w2, b2):
        impl = _fast if x.shape[0] == 1 else pure
        return impl.mlp_forward(x, w1, b1, w2, b2)

    def mlp_backward(x, h, dy, w2):
        impl = _fast if x.shape[0] == 1 else pure
        return impl.mlp_backward(x, h, dy, w2)


__all__ = ["BACKEND", "mlp_forward", "mlp_backward", "pure"]
