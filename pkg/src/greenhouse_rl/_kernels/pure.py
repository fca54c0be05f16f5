"""NumPy reference implementation of the hot numeric kernels.

Semantics are the contract for the compiled backend: same shapes, float64,
same return conventions.  Inputs are C-contiguous float64 arrays.
"""

from __future__ import annotations

import numpy as np


def mlp_forward(
    x: np.ndarray,
    w1: np.ndarray,
    b1: np.ndarray,
    w2: np.ndarray,
    b2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Batch affine-tanh-affine evaluation.

    x: (n, d_in); w1: (d_in, d_hidden); b1: (d_hidden,);
    w2: (d_hidden, d_out); b2: (d_out,).
    Returns (y, h) with y: (n, d_out) and the tanh activations h: (n, d_hidden).
    """
    h = np.tanh(x @ w1 + b1)
    y = h @ w2 + b2
    return y, h


def mlp_backward(
    x: np.ndarray,
    h: np.ndarray,
    dy: np.ndarray,
    w2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Exact parameter gradients given dL/dy.

    h must be the activations returned by :func:`mlp_forward` for x.
    Returns (dw1, db1, dw2, db2).
    """
    dw2 = h.T @ dy
    db2 = dy.sum(axis=0)
    dh = (dy @ w2.T) * (1.0 - h * h)
    dw1 = x.T @ dh
    db1 = dh.sum(axis=0)
    return dw1, db1, dw2, db2
