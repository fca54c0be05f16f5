"""Growing-period and sex decision pipeline.

Stem-length thresholds settle germination vs seedling directly; past the
second threshold a pluggable binary classifier separates mature from
blooming, and only then is a second classifier consulted for sex.  The
classifiers are logistic models over a fixed morphological feature vector
(stem length, leaf count, leaf area, flower volume, time in run), so an
image-based model can replace them later without touching the gate logic.

Label conventions: stage classifier 1 = blooming, 0 = mature; sex
classifier 1 = female, 0 = male.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import nn
from .crop import GrowingPeriod, Morphology, Sex
from .seeding import substream

N_FEATURES = 5

# Scores are clamped into the open interval so downstream ratios stay finite.
_SCORE_EPS = 1e-15


@dataclass(frozen=True)
class GateThresholds:
    delta1_cm: float
    delta2_cm: float

    def __post_init__(self) -> None:
        if not 0 < self.delta1_cm < self.delta2_cm:
            raise ValueError("requires 0 < delta1 < delta2")


@dataclass(frozen=True)
class BinaryClassifier:
    """Logistic model: score = sigmoid(weights . features + bias)."""

    weights: np.ndarray  # (5,)
    bias: float

    def __post_init__(self) -> None:
        if np.asarray(self.weights).shape != (N_FEATURES,):
            raise ValueError(f"weights must have shape ({N_FEATURES},)")
        if not (np.all(np.isfinite(self.weights)) and math.isfinite(self.bias)):
            raise ValueError("classifier parameters must be finite")


@dataclass(frozen=True)
class StageDecision:
    period: GrowingPeriod
    sex: Sex

    def __post_init__(self) -> None:
        early = self.period in (GrowingPeriod.GERMINATION, GrowingPeriod.SEEDLING)
        if early and self.sex is not Sex.UNKNOWN:
            raise ValueError("sex must be unknown before the mature period")


def feature_vector(morph: Morphology, time_in_run_s: float) -> np.ndarray:
    """Fixed feature order: stem, leaf count, leaf area, flower volume, time."""
    return np.array([*morph.as_tuple(), time_in_run_s], dtype=np.float64)


def _sigmoid(z: float) -> float:
    if z >= 0:
        s = 1.0 / (1.0 + math.exp(-min(z, 700.0)))
    else:
        e = math.exp(max(z, -700.0))
        s = e / (1.0 + e)
    return min(max(s, _SCORE_EPS), 1.0 - _SCORE_EPS)


def classify(clf: BinaryClassifier, features: np.ndarray) -> tuple[int, float]:
    """(label, score) with label 1 iff score > 0.5; a score of exactly 0.5
    resolves to label 0."""
    features = np.asarray(features, dtype=np.float64)
    if features.shape != (N_FEATURES,):
        raise ValueError(f"feature vector must have shape ({N_FEATURES},)")
    score = _sigmoid(float(np.dot(clf.weights, features)) + clf.bias)
    return (1 if score > 0.5 else 0, score)


def gate_decide(
    features: np.ndarray,
    thresholds: GateThresholds,
    stage_clf: BinaryClassifier,
    sex_clf: BinaryClassifier,
) -> StageDecision:
    """Full pipeline: thresholds first, classifiers only past delta2.

    Sex is evaluated only when the stage classifier has placed the plant in
    the mature or blooming period; otherwise it stays unknown.
    """
    stem = float(np.asarray(features)[0])
    if stem < thresholds.delta1_cm:
        return StageDecision(GrowingPeriod.GERMINATION, Sex.UNKNOWN)
    if stem < thresholds.delta2_cm:
        return StageDecision(GrowingPeriod.SEEDLING, Sex.UNKNOWN)
    stage_label, _ = classify(stage_clf, features)
    period = GrowingPeriod.BLOOMING if stage_label == 1 else GrowingPeriod.MATURE
    sex_label, _ = classify(sex_clf, features)
    sex = Sex.FEMALE if sex_label == 1 else Sex.MALE
    return StageDecision(period, sex)


def train_classifier(
    features: np.ndarray,
    labels: np.ndarray,
    lr: float = 0.5,
    epochs: int = 500,
    seed: int = 0,
) -> BinaryClassifier:
    """Logistic regression by full-batch gradient descent on cross-entropy.

    Features are standardized internally for conditioning and the affine map
    is folded back into the returned (weights, bias), so the classifier
    operates on raw features.  Deterministic given the seed.
    """
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != N_FEATURES:
        raise ValueError(f"features must be (n, {N_FEATURES})")
    if set(np.unique(y)) != {0.0, 1.0}:
        raise ValueError("training data must contain both labels 0 and 1")

    mean = x.mean(axis=0)
    scale = np.maximum(x.std(axis=0), 1e-8)
    z = (x - mean) / scale

    rng = substream(seed, "gate/init")
    w = rng.normal(0.0, 0.01, size=N_FEATURES)
    b = 0.0
    n = len(y)
    for _ in range(epochs):
        logits = z @ w + b
        scores = 1.0 / (1.0 + np.exp(-np.clip(logits, -500, 500)))
        dz = (scores - y) / n
        w -= lr * (z.T @ dz)
        b -= lr * float(dz.sum())

    w_raw = w / scale
    b_raw = b - float(np.dot(w, mean / scale))
    return BinaryClassifier(weights=w_raw, bias=b_raw)


def accuracy(clf: BinaryClassifier, features: np.ndarray, labels: np.ndarray) -> float:
    features = np.asarray(features, dtype=np.float64)
    labels = np.asarray(labels)
    preds = [classify(clf, f)[0] for f in features]
    return float(np.mean(np.asarray(preds) == labels))


# --- persistence -------------------------------------------------------------


def classifier_to_doc(clf: BinaryClassifier, name: str, seed: int) -> dict:
    return {
        "format": nn.WEIGHTS_FORMAT,
        "kind": "logistic-classifier",
        "name": name,
        "seed": seed,
        "layers": [
            {"name": "weights", "shape": [N_FEATURES], "data": clf.weights.tolist()},
            {"name": "bias", "shape": [], "data": [clf.bias]},
        ],
    }


def classifier_from_doc(doc: dict) -> BinaryClassifier:
    arrays = {layer["name"]: layer["data"] for layer in doc["layers"]}
    return BinaryClassifier(
        weights=np.asarray(arrays["weights"], dtype=np.float64),
        bias=float(arrays["bias"][0]),
    )
