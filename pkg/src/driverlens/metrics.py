"""Evaluation metrics on predicted vs true class codes.

Classification metrics come from per-class confusion counts; the remaining
quantities treat the integer class codes as real values (the report flags
them as label-code regression metrics). Variances use the population
convention throughout, matching the scaler.

Goodness-of-fit conventions:
  r2 = 1 - SSR/SST (the standard form; SSR/SST alone cannot go negative)
  ev = 1 - Var(residual)/Var(y)
  d2 = fraction of null deviance explained with squared-error deviance,
       which makes it identical to r2 by construction.
Fields that divide by Var(y) are returned as NaN when y is constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DataError
from .preprocess import SplitIndices
from .rng import derive_seed

TABLE_COLUMNS = ("Model Name", "Accuracy", "F1 Score", "EV", "MSE", "RMSE", "R²", "D² Score")


@dataclass(frozen=True)
class ConfusionCounts:
    """Per-class TP/FP/FN/TN tallies over T observations."""

    tp: np.ndarray
    fp: np.ndarray
    fn: np.ndarray
    tn: np.ndarray
    total: int


@dataclass
class MetricsRecord:
    """One table row: a model's averaged scores in one phase."""

    model: str
    phase: str  # "before" or "after"
    accuracy: float
    f1_weighted: float
    ev: float
    mse: float
    rmse: float
    r2: float
    d2: float

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "phase": self.phase,
            "accuracy": self.accuracy,
            "f1_weighted": self.f1_weighted,
            "ev": self.ev,
            "mse": self.mse,
            "rmse": self.rmse,
            "r2": self.r2,
            "d2": self.d2,
        }

    def markdown_row(self, digits: int = 3) -> str:
        def fmt(x: float) -> str:
            return "undefined" if math.isnan(x) else f"{x:.{digits}f}"

        cells = [self.model, fmt(self.accuracy), fmt(self.f1_weighted), fmt(self.ev),
                 fmt(self.mse), fmt(self.rmse), fmt(self.r2), fmt(self.d2)]
        return "| " + " | ".join(cells) + " |"


def _check_codes(y_true, y_pred) -> tuple[np.ndarray, np.ndarray]:
    y_true = np.asarray(y_true, dtype=np.int64)
    y_pred = np.asarray(y_pred, dtype=np.int64)
    if y_true.size == 0:
        raise DataError("empty inputs")
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise DataError("y_true and y_pred must be 1-d and of equal length")
    if y_true.min() < 0 or y_pred.min() < 0:
        raise DataError("class codes must be non-negative")
    return y_true, y_pred


def confusion_counts(y_true, y_pred, n_classes: int | None = None) -> ConfusionCounts:
    y_true, y_pred = _check_codes(y_true, y_pred)
    C = n_classes or int(max(y_true.max(), y_pred.max())) + 1
    tp = np.zeros(C, dtype=np.int64)
    fp = np.zeros(C, dtype=np.int64)
    fn = np.zeros(C, dtype=np.int64)
    total = y_true.size
    for c in range(C):
        tp[c] = int(np.sum((y_pred == c) & (y_true == c)))
        fp[c] = int(np.sum((y_pred == c) & (y_true != c)))
        fn[c] = int(np.sum((y_pred != c) & (y_true == c)))
    tn = total - tp - fp - fn
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn, total=total)


def classification_metrics(
    y_true, y_pred, average: str = "weighted"
) -> tuple[float, float, float, float]:
    """(accuracy, precision, recall, f1), aggregated over classes.

    Per class: precision = TP/(TP+FP), recall = TP/(TP+FN), both 0 when the
    denominator is 0; F1 is their harmonic mean (0 when both are 0).
    "weighted" averages by true-class support, "macro" averages uniformly.
    """
    if average not in ("weighted", "macro"):
        raise DataError(f"unknown averaging mode {average!r}")
    counts = confusion_counts(y_true, y_pred)
    tp, fp, fn = counts.tp.astype(float), counts.fp.astype(float), counts.fn.astype(float)
    support = tp + fn
    with np.errstate(invalid="ignore", divide="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(support > 0, tp / support, 0.0)
        pr = precision + recall
        f1 = np.where(pr > 0, 2.0 * precision * recall / np.where(pr > 0, pr, 1.0), 0.0)
    accuracy = float(tp.sum() / counts.total)
    if average == "weighted":
        weights = support / counts.total
    else:
        weights = np.full(tp.size, 1.0 / tp.size)
    return (
        accuracy,
        float(np.sum(weights * precision)),
        float(np.sum(weights * recall)),
        float(np.sum(weights * f1)),
    )


def regression_style_metrics(y_true, y_pred) -> tuple[float, float, float, float, float]:
    """(mse, rmse, r2, ev, d2) treating class codes as real values.

    r2/ev/d2 are NaN when y_true is constant (their denominator vanishes);
    mse and rmse are always returned.
    """
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    if y_true.shape != y_pred.shape or y_true.ndim != 1 or y_true.size < 2:
        raise DataError("need two 1-d vectors of equal length >= 2")
    residual = y_true - y_pred
    mse = float(np.mean(residual**2))
    rmse = math.sqrt(mse)
    sst = float(np.sum((y_true - y_true.mean()) ** 2))
    if sst == 0.0:
        return mse, rmse, float("nan"), float("nan"), float("nan")
    r2 = 1.0 - float(np.sum(residual**2)) / sst
    ev = 1.0 - float(np.var(residual)) / float(np.var(y_true))
    d2 = r2  # squared-error deviance: explained deviance coincides with r2
    return mse, rmse, r2, ev, d2


def evaluate(
    spec,
    splits: list[SplitIndices],
    data: Dataset,
    per_split_transform=None,
    phase: str = "before",
) -> MetricsRecord:
    """Train/test a model spec on every split and average the metrics.

    The model is retrained on each split's train rows (seeded per split) and
    scored on its test rows; every field is the arithmetic mean over splits,
    accumulated in ascending split order. per_split_transform, when given,
    maps (X_train, y_train, X_test, split_index) -> transformed triple and is
    the hook for leak-safe per-split preprocessing.
    """
    from .models import ModelSpec, train  # local import: models is a heavier module

    if not isinstance(spec, ModelSpec):
        raise DataError("evaluate expects a ModelSpec")
    if not splits:
        raise DataError("no splits supplied")
    per_split = np.empty((len(splits), 7), dtype=float)
    for i, split in enumerate(splits):
        X_tr, y_tr = data.X[split.train], data.y[split.train]
        X_te, y_te = data.X[split.test], data.y[split.test]
        if per_split_transform is not None:
            X_tr, y_tr, X_te = per_split_transform(X_tr, y_tr, X_te, i)
        split_spec = spec.with_seed(derive_seed(spec.seed, "eval-split", i))
        model = train(split_spec, X_tr, y_tr)
        y_hat = model.predict(X_te)
        accuracy, _, _, f1_w = classification_metrics(y_te, y_hat)
        mse, rmse, r2, ev, d2 = regression_style_metrics(
            y_te.astype(float), y_hat.astype(float)
        )
        per_split[i] = (accuracy, f1_w, ev, mse, rmse, r2, d2)
    means = per_split.mean(axis=0)  # numpy pairwise summation, fixed order
    return MetricsRecord(
        model=spec.algorithm,
        phase=phase,
        accuracy=float(means[0]),
        f1_weighted=float(means[1]),
        ev=float(means[2]),
        mse=float(means[3]),
        rmse=float(means[4]),
        r2=float(means[5]),
        d2=float(means[6]),
    )


def markdown_table(records: list[MetricsRecord], digits: int = 3) -> str:
    """Markdown table with the fixed column order used by the reports."""
    header = "| " + " | ".join(TABLE_COLUMNS) + " |"
    rule = "|" + "|".join(["---"] * len(TABLE_COLUMNS)) + "|"
    rows = [r.markdown_row(digits) for r in records]
    return "\n".join([header, rule, *rows])
