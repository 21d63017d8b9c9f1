"""Linear pair classifier and prediction plumbing.

The trainable model is a primal linear SVM: L2-regularized hinge loss
minimized by seeded mini-batch subgradient descent with a warmup/linear-decay
learning-rate schedule. Scores are sigmoid-calibrated margins so internal
predictions mix with external probability files in the same ensembles.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .corpus import ParagraphPair
from .errors import DataError, FormatError, UsageError
from .features import SparseFeatureVector

MODEL_FORMAT_VERSION = 1

DECISION_THRESHOLD = 0.5


class EnsembleMode(str, Enum):
    MAJORITY = "majority"
    SOFTMAX_MEAN = "softmax_mean"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class TrainConfig:
    """Optimizer settings; defaults are tuned for the linear model.

    (epochs=5, batch_size=4, warmup_ratio=0.1 are also the documented
    defaults recorded for external-model metadata.)
    """

    peak_lr: float = 0.1
    epochs: int = 5
    batch_size: int = 4
    warmup_ratio: float = 0.1
    seed: int = 5000
    l2: float = 1e-4

    def __post_init__(self) -> None:
        if self.peak_lr <= 0:
            raise UsageError(f"peak_lr must be positive, got {self.peak_lr}")
        if self.epochs < 1 or self.batch_size < 1:
            raise UsageError("epochs and batch_size must be positive integers")
        if not 0.0 <= self.warmup_ratio <= 1.0:
            raise UsageError(f"warmup_ratio must be in [0, 1], got {self.warmup_ratio}")
        if self.l2 <= 0:
            raise UsageError(f"l2 must be positive, got {self.l2}")


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float
    l2: float

    @property
    def dimension(self) -> int:
        return int(self.weights.shape[0])


@dataclass(frozen=True)
class PredictionRecord:
    """Per-pair output of any classifier, internal or external."""

    doc_id: int
    pair_index: int
    score: float
    label: int
    source: str

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise UsageError(f"score must be in [0, 1], got {self.score}")
        if self.label != (1 if self.score >= DECISION_THRESHOLD else 0):
            raise UsageError(f"label {self.label} inconsistent with score {self.score}")


def _sigmoid(margin: float) -> float:
    if margin >= 0:
        return 1.0 / (1.0 + math.exp(-margin))
    e = math.exp(margin)
    return e / (1.0 + e)


def warmup_schedule(step: int, total_steps: int, cfg: TrainConfig) -> float:
    """Learning rate at `step`: linear ramp to peak, then linear decay to 0.

    warmup_steps = round(warmup_ratio * total_steps). The ramp uses
    (step + 1) / warmup_steps so step 0 never gets a zero rate, and both
    formulas give the peak at the warmup/decay boundary.
    """
    if total_steps <= 0:
        raise UsageError("total_steps must be positive")
    if not 0 <= step < total_steps:
        raise UsageError(f"step {step} outside [0, {total_steps})")
    warmup_steps = round(cfg.warmup_ratio * total_steps)
    if step < warmup_steps:
        return cfg.peak_lr * (step + 1) / warmup_steps
    return cfg.peak_lr * (total_steps - step) / (total_steps - warmup_steps)


def _check_features(features: Sequence[SparseFeatureVector]) -> int:
    dimension = features[0].dimension
    for i, vec in enumerate(features):
        if vec.dimension != dimension:
            raise UsageError(f"feature {i} has dimension {vec.dimension}, expected {dimension}")
        if not np.all(np.isfinite(vec.values)):
            raise DataError(f"feature {i} contains non-finite values")
    return dimension


def hinge_objective(model: LinearModel, features: Sequence[SparseFeatureVector], labels: Sequence[int]) -> float:
    """Full-batch regularized objective: 0.5*l2*||w||^2 + mean hinge loss."""
    total = 0.0
    for vec, label in zip(features, labels):
        margin = float(model.weights[vec.indices] @ vec.values) + model.bias
        y = 1.0 if label == 1 else -1.0
        total += max(0.0, 1.0 - y * margin)
    penalty = 0.5 * model.l2 * float(model.weights @ model.weights)
    return penalty + total / len(labels)


def train_linear_svm(
    features: Sequence[SparseFeatureVector],
    labels: Sequence[int],
    cfg: TrainConfig,
    on_epoch_end: Callable[[int, LinearModel], None] | None = None,
) -> LinearModel:
    """Fit the linear SVM by mini-batch subgradient descent.

    Epoch shuffles come from one generator seeded with cfg.seed and batches
    are visited in order, so training is bit-reproducible for a given
    (data, config). Single-threaded by design. `on_epoch_end` receives the
    epoch index and a snapshot of the model at each epoch boundary.
    """
    if len(features) != len(labels):
        raise UsageError(f"{len(features)} feature vectors vs {len(labels)} labels")
    if not features:
        raise UsageError("cannot train on an empty dataset")
    classes = set(labels)
    if classes != {0, 1}:
        raise UsageError(f"training needs both classes, got labels {sorted(classes)}")
    dimension = _check_features(features)

    y = np.where(np.asarray(labels) == 1, 1.0, -1.0)
    w = np.zeros(dimension)
    b = 0.0
    n = len(features)
    steps_per_epoch = (n + cfg.batch_size - 1) // cfg.batch_size
    total_steps = cfg.epochs * steps_per_epoch
    rng = np.random.default_rng(cfg.seed)

    step = 0
    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            lr = warmup_schedule(step, total_steps, cfg)
            # Subgradient of 0.5*l2*||w||^2 + mean_batch hinge.
            w *= 1.0 - lr * cfg.l2
            scale = lr / len(batch)
            for i in batch:
                vec = features[i]
                margin = y[i] * (float(w[vec.indices] @ vec.values) + b)
                if margin < 1.0:
                    w[vec.indices] += scale * y[i] * vec.values
                    b += scale * y[i]
            step += 1
        if on_epoch_end is not None:
            on_epoch_end(epoch, LinearModel(weights=w.copy(), bias=b, l2=cfg.l2))
    return LinearModel(weights=w, bias=b, l2=cfg.l2)


def predict(
    model: LinearModel,
    features: SparseFeatureVector,
    *,
    doc_id: int = 0,
    pair_index: int = 0,
    source: str = "tfidf-svc",
) -> PredictionRecord:
    """Score one feature vector; label 1 iff sigmoid(margin) >= 0.5."""
    if features.dimension != model.dimension:
        raise UsageError(
            f"feature dimension {features.dimension} does not match model {model.dimension}"
        )
    margin = float(model.weights[features.indices] @ features.values) + model.bias
    score = _sigmoid(margin)
    return PredictionRecord(
        doc_id=doc_id,
        pair_index=pair_index,
        score=score,
        label=1 if score >= DECISION_THRESHOLD else 0,
        source=source,
    )


def random_baseline(pairs: Sequence[ParagraphPair], seed: int) -> list[PredictionRecord]:
    """Uniform coin-flip labels per pair from a seeded generator; score = label."""
    rng = random.Random(seed)
    records = []
    for pair in pairs:
        label = rng.randrange(2)
        records.append(
            PredictionRecord(
                doc_id=pair.doc_id,
                pair_index=pair.pair_index,
                score=float(label),
                label=label,
                source="random",
            )
        )
    return records


def load_external_predictions(path: str | Path) -> list[PredictionRecord]:
    """Read line-delimited JSON prediction records.

    Each line needs integer doc_id and pair_index, a score in [0, 1], and a
    source string; labels are recomputed from the threshold regardless of
    what the file claims. Duplicate (doc_id, pair_index, source) triples are
    rejected. Output is sorted by (doc_id, pair_index, source).
    """
    records = []
    seen: set[tuple[int, int, str]] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                raw = json.loads(line)
            except json.JSONDecodeError as exc:
                raise FormatError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
            try:
                doc_id = raw["doc_id"]
                pair_index = raw["pair_index"]
                score = raw["score"]
                source = raw["source"]
            except KeyError as exc:
                raise FormatError(f"{path}:{lineno}: missing field {exc}") from exc
            if isinstance(doc_id, bool) or not isinstance(doc_id, int):
                raise FormatError(f"{path}:{lineno}: doc_id must be an integer")
            if isinstance(pair_index, bool) or not isinstance(pair_index, int):
                raise FormatError(f"{path}:{lineno}: pair_index must be an integer")
            if not isinstance(score, (int, float)) or isinstance(score, bool):
                raise FormatError(f"{path}:{lineno}: score must be a number")
            if not isinstance(source, str):
                raise FormatError(f"{path}:{lineno}: source must be a string")
            if not 0.0 <= score <= 1.0:
                raise FormatError(f"{path}:{lineno}: score {score} outside [0, 1]")
            key = (doc_id, pair_index, source)
            if key in seen:
                raise FormatError(f"{path}:{lineno}: duplicate record for {key}")
            seen.add(key)
            score = float(score)
            records.append(
                PredictionRecord(
                    doc_id=doc_id,
                    pair_index=pair_index,
                    score=score,
                    label=1 if score >= DECISION_THRESHOLD else 0,
                    source=source,
                )
            )
    records.sort(key=lambda r: (r.doc_id, r.pair_index, r.source))
    return records


def save_predictions(records: Sequence[PredictionRecord], path: str | Path) -> None:
    """Write records in the line-delimited JSON exchange format."""
    with open(path, "w", encoding="utf-8") as handle:
        for r in records:
            handle.write(
                json.dumps(
                    {"doc_id": r.doc_id, "pair_index": r.pair_index, "score": r.score, "source": r.source}
                )
                + "\n"
            )


def ensemble(
    predictions_by_model: Sequence[Sequence[PredictionRecord]],
    mode: EnsembleMode,
) -> list[PredictionRecord]:
    """Combine per-model prediction lists over one shared (doc, pair) set.

    majority: label by vote (odd model count required), score = mean label.
    softmax_mean: score = mean score, label by threshold.
    """
    if not predictions_by_model:
        raise UsageError("ensemble needs at least one prediction list")
    if mode is EnsembleMode.MAJORITY and len(predictions_by_model) % 2 == 0:
        raise UsageError(f"majority vote needs an odd model count, got {len(predictions_by_model)}")

    keyed: list[dict[tuple[int, int], PredictionRecord]] = []
    for m, records in enumerate(predictions_by_model):
        table: dict[tuple[int, int], PredictionRecord] = {}
        for r in records:
            key = (r.doc_id, r.pair_index)
            if key in table:
                raise UsageError(f"model {m} has multiple records for pair {key}")
            table[key] = r
        keyed.append(table)
    reference = set(keyed[0])
    for m, table in enumerate(keyed[1:], start=1):
        if set(table) != reference:
            missing = sorted(reference - set(table))[:5]
            extra = sorted(set(table) - reference)[:5]
            raise UsageError(
                f"model {m} coverage mismatch (missing {missing}, unexpected {extra})"
            )

    combined = []
    source = f"ensemble-{mode.value}"
    for key in sorted(reference):
        members = [table[key] for table in keyed]
        if mode is EnsembleMode.MAJORITY:
            votes = sum(r.label for r in members)
            label = 1 if votes * 2 > len(members) else 0
            score = votes / len(members)
        else:
            score = sum(r.score for r in members) / len(members)
            label = 1 if score >= DECISION_THRESHOLD else 0
        combined.append(
            PredictionRecord(doc_id=key[0], pair_index=key[1], score=score, label=label, source=source)
        )
    return combined


def save_model(model: LinearModel, path: str | Path) -> None:
    """Serialize nonzero weights to versioned JSON."""
    nonzero = np.nonzero(model.weights)[0]
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "dimension": model.dimension,
        "bias": model.bias,
        "lambda": model.l2,
        "weights": [[int(i), float(model.weights[i])] for i in nonzero],
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_model(path: str | Path) -> LinearModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file {path} is not valid JSON: {exc}") from exc
    if payload.get("version") != MODEL_FORMAT_VERSION:
        raise FormatError(f"unsupported model version {payload.get('version')!r}")
    try:
        weights = np.zeros(int(payload["dimension"]))
        for index, value in payload["weights"]:
            weights[int(index)] = float(value)
        model = LinearModel(weights=weights, bias=float(payload["bias"]), l2=float(payload["lambda"]))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise FormatError(f"model file {path} is malformed: {exc}") from exc
    if not np.all(np.isfinite(weights)) or not math.isfinite(model.bias):
        raise FormatError(f"model file {path} contains non-finite parameters")
    return model
