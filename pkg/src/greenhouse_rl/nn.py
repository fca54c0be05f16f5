"""Small fully-connected network shared by the growth surrogate and Q-nets.

One hidden tanh layer, exact analytic gradients, plain SGD.  The batch
forward/backward passes route through :mod:`greenhouse_rl._kernels` so they
run on the compiled backend when it is available.  Weights serialize to a
JSON document (shapes + row-major arrays) for reproducible artifacts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import _kernels

WEIGHTS_FORMAT = "greenhouse-rl-weights/1"


@dataclass
class MLPWeights:
    w1: np.ndarray  # (d_in, d_hidden)
    b1: np.ndarray  # (d_hidden,)
    w2: np.ndarray  # (d_hidden, d_out)
    b2: np.ndarray  # (d_out,)

    @property
    def d_in(self) -> int:
        return self.w1.shape[0]

    @property
    def d_hidden(self) -> int:
        return self.w1.shape[1]

    @property
    def d_out(self) -> int:
        return self.w2.shape[1]

    def copy(self) -> "MLPWeights":
        return MLPWeights(
            self.w1.copy(), self.b1.copy(), self.w2.copy(), self.b2.copy()
        )

    def arrays(self) -> list[tuple[str, np.ndarray]]:
        return [("w1", self.w1), ("b1", self.b1), ("w2", self.w2), ("b2", self.b2)]


Grads = tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]


def init_mlp(d_in: int, d_hidden: int, d_out: int, rng: np.random.Generator) -> MLPWeights:
    """Glorot-style uniform init; output layer starts at zero."""
    limit1 = np.sqrt(6.0 / (d_in + d_hidden))
    w1 = rng.uniform(-limit1, limit1, size=(d_in, d_hidden))
    b1 = np.zeros(d_hidden)
    w2 = np.zeros((d_hidden, d_out))
    b2 = np.zeros(d_out)
    return MLPWeights(w1, b1, w2, b2)


def zeros_mlp(d_in: int, d_hidden: int, d_out: int) -> MLPWeights:
    return MLPWeights(
        np.zeros((d_in, d_hidden)),
        np.zeros(d_hidden),
        np.zeros((d_hidden, d_out)),
        np.zeros(d_out),
    )


def _as_batch(x: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    return x


def forward(w: MLPWeights, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Batch evaluation: returns (y, hidden activations)."""
    x = _as_batch(x)
    if x.shape[1] != w.d_in:
        raise ValueError(f"input dimension {x.shape[1]} != expected {w.d_in}")
    return _kernels.mlp_forward(x, w.w1, w.b1, w.w2, w.b2)


def forward_one(w: MLPWeights, x: np.ndarray) -> np.ndarray:
    """Single-sample evaluation: returns a (d_out,) vector."""
    y, _ = forward(w, x)
    return y[0]


def backward(w: MLPWeights, x: np.ndarray, h: np.ndarray, dy: np.ndarray) -> Grads:
    """Exact gradients of a scalar loss given dL/dy for the batch."""
    x = _as_batch(x)
    dy = np.ascontiguousarray(dy, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    return _kernels.mlp_backward(x, h, dy, w.w2)


def loss_mse(pred: np.ndarray, target: np.ndarray) -> float:
    """Mean over all components of squared differences."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch: {pred.shape} vs {target.shape}")
    diff = pred - target
    return float(np.mean(diff * diff))


def mse_grads(w: MLPWeights, x: np.ndarray, target: np.ndarray) -> tuple[float, Grads]:
    """Loss and exact parameter gradients of mean batch MSE."""
    x = _as_batch(x)
    target = _as_batch(target)
    if x.shape[0] == 0:
        raise ValueError("batch must be non-empty")
    y, h = forward(w, x)
    loss = loss_mse(y, target)
    dy = (2.0 / y.size) * (y - target)
    return loss, backward(w, x, h, dy)


def sgd_step(w: MLPWeights, grads: Grads, lr: float) -> None:
    dw1, db1, dw2, db2 = grads
    w.w1 -= lr * dw1
    w.b1 -= lr * db1
    w.w2 -= lr * dw2
    w.b2 -= lr * db2


def finite_difference_grads(
    loss_fn: Callable[[MLPWeights], float], w: MLPWeights, eps: float = 1e-5
) -> Grads:
    """Central-difference gradient of loss_fn at w, parameter by parameter.

    Independent of the analytic backward pass; used to verify it.
    """
    out = []
    for _, arr in w.arrays():
        g = np.zeros_like(arr)
        flat = arr.ravel()
        gflat = g.ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + eps
            up = loss_fn(w)
            flat[i] = orig - eps
            down = loss_fn(w)
            flat[i] = orig
            gflat[i] = (up - down) / (2.0 * eps)
        out.append(g)
    return tuple(out)  # type: ignore[return-value]


def max_relative_grad_error(analytic: Grads, numeric: Grads) -> float:
    """max |a - n| / max(1e-8, |a|, |n|) over every parameter."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(1e-8, np.maximum(np.abs(a), np.abs(n)))
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


# --- JSON persistence -------------------------------------------------------


def mlp_to_doc(w: MLPWeights) -> dict:
    return {
        "layers": [
            {"name": name, "shape": list(arr.shape), "data": arr.ravel().tolist()}
            for name, arr in w.arrays()
        ]
    }


def mlp_from_doc(doc: dict) -> MLPWeights:
    arrays = {}
    for layer in doc["layers"]:
        arr = np.asarray(layer["data"], dtype=np.float64).reshape(layer["shape"])
        arrays[layer["name"]] = arr
    return MLPWeights(arrays["w1"], arrays["b1"], arrays["w2"], arrays["b2"])


def save_weights_doc(path: str | Path, doc: dict) -> None:
    """Canonical JSON serialization (newline-terminated, 2-space indent)."""
    body = json.dumps(doc, indent=2, allow_nan=False)
    Path(path).write_text(body + "\n", encoding="utf-8")


def load_weights_doc(path: str | Path, expected_kind: str | None = None) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if doc.get("format") != WEIGHTS_FORMAT:
        raise ValueError(f"{path}: unknown weights format {doc.get('format')!r}")
    if expected_kind is not None and doc.get("kind") != expected_kind:
        raise ValueError(f"{path}: expected kind {expected_kind!r}, got {doc.get('kind')!r}")
    return doc
