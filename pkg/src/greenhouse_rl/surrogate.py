"""Learned growth surrogate: windowed regression onto morphology deltas.

One model per growing period.  The input is a window of the last ``l``
climate readings (flattened oldest to newest, each reading ordered as
temperature, humidity, light, CO2) concatenated with the current morphology
(stem, leaf count, leaf area, flower volume); the target is the next-step
morphology delta.  Records pair each climate reading with the pre-step
morphology (see :class:`greenhouse_rl.crop.EpisodeTrace`), so the last window
entry is exactly the climate that produced the target delta.

Training is seeded mini-batch SGD on mean squared error over normalized
features and targets; the weights at the best validation loss are returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import nn
from .crop import EpisodeTrace, GrowingPeriod, Morphology
from .seeding import substream

MORPH_FIELDS = ("stem_length_cm", "leaf_count", "leaf_area_cm2", "flower_volume_cm3")

# Per-field scale floors: one measurement unit per morphology field
# (0.01 cm stem, 1 leaf, one leaf's area in cm^2, 0.01 cm^3 flower).
# Errors below these resolutions are not physically meaningful, so both
# target normalization and RMSE normalization never divide by less.
DEFAULT_SCALE_FLOORS = (0.01, 1.0, 1.0, 0.01)


@dataclass(frozen=True)
class WindowSample:
    env_window: np.ndarray  # (l, 4), oldest to newest
    morph_now: np.ndarray  # (4,)
    target: np.ndarray  # (4,) next-step morphology delta

    def features(self) -> np.ndarray:
        return np.concatenate([self.env_window.ravel(), self.morph_now])


@dataclass(frozen=True)
class TrainConfig:
    window_len: int = 4
    hidden: int = 32
    learning_rate: float = 0.05
    momentum: float = 0.9
    lr_decay: float = 1.0  # per-epoch multiplicative decay
    batch_size: int = 64
    epochs: int = 200
    seed: int = 0
    val_fraction: float = 0.2
    target_scale_floors: tuple[float, float, float, float] = DEFAULT_SCALE_FLOORS

    def __post_init__(self) -> None:
        if self.window_len < 1:
            raise ValueError("window_len must be >= 1")
        if not 0 < self.val_fraction < 1:
            raise ValueError("val_fraction must be in (0, 1)")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must be in [0, 1)")
        if not 0 < self.lr_decay <= 1:
            raise ValueError("lr_decay must be in (0, 1]")


@dataclass
class Normalization:
    """Frozen per-feature affine maps: z = (x - mean) / scale."""

    input_mean: np.ndarray
    input_scale: np.ndarray
    target_mean: np.ndarray
    target_scale: np.ndarray

    def __post_init__(self) -> None:
        if np.any(self.input_scale <= 0) or np.any(self.target_scale <= 0):
            raise ValueError("normalization scales must be > 0")


@dataclass
class GrowthModel:
    mlp: nn.MLPWeights
    norm: Normalization
    window_len: int

    @property
    def n_features(self) -> int:
        return 4 * self.window_len + 4


def build_windows(
    traces: Iterable[EpisodeTrace], window_len: int
) -> dict[GrowingPeriod, list[WindowSample]]:
    """Slice episode traces into per-period training samples.

    A sample at record i uses readings i-l+1..i and targets the morphology
    delta from record i to i+1.  Windows never span episodes, and any window
    whose records are not all in one growing period is skipped.  Episodes
    shorter than l+1 records contribute nothing.
    """
    if window_len < 1:
        raise ValueError("window_len must be >= 1")
    out: dict[GrowingPeriod, list[WindowSample]] = {p: [] for p in GrowingPeriod}
    for trace in traces:
        n = len(trace)
        env = np.array([s.as_tuple() for s in trace.env_states], dtype=np.float64)
        morph = np.array([m.as_tuple() for m in trace.morphologies], dtype=np.float64)
        for i in range(window_len - 1, n - 1):
            period = trace.periods[i]
            lo = i - window_len + 1
            if any(trace.periods[j] is not period for j in range(lo, i)):
                continue
            out[period].append(
                WindowSample(
                    env_window=env[lo : i + 1].copy(),
                    morph_now=morph[i].copy(),
                    target=morph[i + 1] - morph[i],
                )
            )
    return out


def stack_samples(samples: Sequence[WindowSample]) -> tuple[np.ndarray, np.ndarray]:
    x = np.stack([s.features() for s in samples])
    y = np.stack([s.target for s in samples])
    return x, y


def fit_normalization(
    x: np.ndarray, y: np.ndarray, target_floors: Sequence[float]
) -> Normalization:
    """Feature statistics from the training split only."""
    in_mean = x.mean(axis=0)
    in_scale = np.maximum(x.std(axis=0), 1e-8)
    t_mean = y.mean(axis=0)
    t_scale = np.maximum(y.std(axis=0), np.asarray(target_floors, dtype=np.float64))
    return Normalization(in_mean, in_scale, t_mean, t_scale)


def split_indices(n: int, cfg: TrainConfig) -> tuple[np.ndarray, np.ndarray]:
    """Seeded (validation, training) index split used by :func:`train`."""
    if n < 2:
        raise ValueError("need at least 2 samples to hold out validation data")
    perm = substream(cfg.seed, "surrogate/split").permutation(n)
    n_val = min(max(1, round(n * cfg.val_fraction)), n - 1)
    return perm[:n_val], perm[n_val:]


def forward(model: GrowthModel, features: np.ndarray) -> np.ndarray:
    """Predicted morphology delta(s) for raw feature vector(s).

    Normalizes inputs, evaluates the network, and de-normalizes the output.
    Accepts a single (4l+4,) vector or an (n, 4l+4) batch.
    """
    features = np.asarray(features, dtype=np.float64)
    single = features.ndim == 1
    batch = features[None, :] if single else features
    if batch.shape[1] != model.n_features:
        raise ValueError(
            f"feature dimension {batch.shape[1]} != expected {model.n_features}"
        )
    z = (batch - model.norm.input_mean) / model.norm.input_scale
    y, _ = nn.forward(model.mlp, z)
    pred = y * model.norm.target_scale + model.norm.target_mean
    return pred[0] if single else pred


loss_mse = nn.loss_mse


def train(
    samples: Sequence[WindowSample], cfg: TrainConfig
) -> tuple[GrowthModel, dict]:
    """Seeded mini-batch SGD; returns the best-validation-loss model.

    Deterministic: the loss history is a pure function of (samples, cfg).
    Losses are reported in normalized-target space.
    """
    if len(samples) == 0:
        raise ValueError("empty dataset after windowing")
    x_all, y_all = stack_samples(samples)

    rng_shuffle = substream(cfg.seed, "surrogate/shuffle")
    rng_init = substream(cfg.seed, "surrogate/init")
    val_idx, train_idx = split_indices(len(samples), cfg)

    norm = fit_normalization(x_all[train_idx], y_all[train_idx], cfg.target_scale_floors)
    xn = (x_all - norm.input_mean) / norm.input_scale
    yn = (y_all - norm.target_mean) / norm.target_scale
    x_tr, y_tr = xn[train_idx], yn[train_idx]
    x_va, y_va = xn[val_idx], yn[val_idx]

    mlp = nn.init_mlp(x_all.shape[1], cfg.hidden, 4, rng_init)
    best = mlp.copy()
    best_val = math.inf
    best_epoch = -1
    history: dict = {"train": [], "val": []}

    n_tr = len(train_idx)
    velocity = [np.zeros_like(arr) for _, arr in mlp.arrays()]
    lr = cfg.learning_rate
    for epoch in range(cfg.epochs):
        order = rng_shuffle.permutation(n_tr)
        for start in range(0, n_tr, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            _, grads = nn.mse_grads(mlp, x_tr[batch], y_tr[batch])
            for v, g, (_, arr) in zip(velocity, grads, mlp.arrays()):
                v *= cfg.momentum
                v += g
                arr -= lr * v
        lr *= cfg.lr_decay
        train_loss = nn.loss_mse(nn.forward(mlp, x_tr)[0], y_tr)
        val_loss = nn.loss_mse(nn.forward(mlp, x_va)[0], y_va)
        history["train"].append(train_loss)
        history["val"].append(val_loss)
        if val_loss < best_val:
            best_val = val_loss
            best = mlp.copy()
            best_epoch = epoch
    history["best_epoch"] = best_epoch
    history["best_val"] = best_val
    history["val_indices"] = [int(i) for i in val_idx]

    model = GrowthModel(mlp=best, norm=norm, window_len=cfg.window_len)
    return model, history


def predict_growth(
    models: dict[GrowingPeriod, GrowthModel],
    period: GrowingPeriod,
    env_window: np.ndarray,
    morph_now: Morphology,
) -> Morphology:
    """Surrogate next-step morphology: current values plus predicted delta.

    Fields are clamped at zero and leaf count is rounded (half away from
    zero) back to an integer.
    """
    if period not in models:
        raise ValueError(f"missing surrogate model for period {period.name}")
    model = models[period]
    window = np.asarray(env_window, dtype=np.float64)
    if window.shape != (model.window_len, 4):
        raise ValueError(
            f"env_window shape {window.shape} != expected ({model.window_len}, 4)"
        )
    features = np.concatenate([window.ravel(), np.asarray(morph_now.as_tuple())])
    delta = forward(model, features)
    stem = max(0.0, morph_now.stem_length_cm + delta[0])
    leaf = max(0, int(math.floor(morph_now.leaf_count + delta[1] + 0.5)))
    area = max(0.0, morph_now.leaf_area_cm2 + delta[2])
    flower = max(0.0, morph_now.flower_volume_cm3 + delta[3])
    return Morphology(stem, leaf, area, flower)


def normalized_rmse(
    model: GrowthModel,
    samples: Sequence[WindowSample],
    floors: Sequence[float] = DEFAULT_SCALE_FLOORS,
) -> np.ndarray:
    """Per-field RMSE of predicted deltas over the scale of the true deltas.

    The scale is max(std of true deltas, per-field floor); the floors keep
    the metric meaningful for integer-quantized and constant fields.
    """
    if len(samples) == 0:
        raise ValueError("no samples to evaluate")
    x, y = stack_samples(samples)
    pred = forward(model, x)
    rmse = np.sqrt(np.mean((pred - y) ** 2, axis=0))
    scale = np.maximum(y.std(axis=0), np.asarray(floors, dtype=np.float64))
    return rmse / scale


# --- persistence -------------------------------------------------------------


def growth_model_to_doc(model: GrowthModel, period: GrowingPeriod, cfg: TrainConfig) -> dict:
    return {
        "format": nn.WEIGHTS_FORMAT,
        "kind": "growth-surrogate",
        "period": period.name,
        "window_len": model.window_len,
        "seed": cfg.seed,
        "config": {
            "window_len": cfg.window_len,
            "hidden": cfg.hidden,
            "learning_rate": cfg.learning_rate,
            "momentum": cfg.momentum,
            "lr_decay": cfg.lr_decay,
            "batch_size": cfg.batch_size,
            "epochs": cfg.epochs,
            "val_fraction": cfg.val_fraction,
            "target_scale_floors": list(cfg.target_scale_floors),
        },
        "normalization": {
            "input_mean": model.norm.input_mean.tolist(),
            "input_scale": model.norm.input_scale.tolist(),
            "target_mean": model.norm.target_mean.tolist(),
            "target_scale": model.norm.target_scale.tolist(),
        },
        **nn.mlp_to_doc(model.mlp),
    }


def growth_model_from_doc(doc: dict) -> tuple[GrowingPeriod, GrowthModel]:
    period = GrowingPeriod[doc["period"]]
    norm = Normalization(
        np.asarray(doc["normalization"]["input_mean"], dtype=np.float64),
        np.asarray(doc["normalization"]["input_scale"], dtype=np.float64),
        np.asarray(doc["normalization"]["target_mean"], dtype=np.float64),
        np.asarray(doc["normalization"]["target_scale"], dtype=np.float64),
    )
    model = GrowthModel(
        mlp=nn.mlp_from_doc(doc), norm=norm, window_len=int(doc["window_len"])
    )
    return period, model
