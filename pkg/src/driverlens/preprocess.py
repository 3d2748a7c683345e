"""Class balancing, standard scaling, and repeated stratified splits.

All three operations are pure functions of (input, seed): pass an integer
seed or a freshly seeded Generator to reproduce results exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .errors import DataError
from .rng import as_generator


def _round_half_up(x: float) -> int:
    # pinned rounding rule: banker's rounding would make sizes platform-lucky
    return int(math.floor(x + 0.5))


@dataclass(frozen=True)
class ScalerParams:
    """Per-feature mean and population standard deviation."""

    mean: np.ndarray
    std: np.ndarray
    feature_names: tuple[str, ...] | None = None

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float)
        std = np.asarray(self.std, dtype=float)
        if mean.shape != std.shape or mean.ndim != 1:
            raise DataError("scaler mean/std must be 1-d and of equal length")
        if np.any(std < 0):
            raise DataError("scaler std must be non-negative")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "std", std)

    @property
    def n_features(self) -> int:
        return self.mean.shape[0]

    def to_json(self) -> str:
        names = self.feature_names or tuple(f"f{j}" for j in range(self.n_features))
        doc = {
            name: {"mean": float(m), "std": float(s)}
            for name, m, s in zip(names, self.mean, self.std)
        }
        return json.dumps(doc, indent=2)


@dataclass(frozen=True)
class SplitIndices:
    """One train/test partition by row index."""

    train: np.ndarray
    test: np.ndarray

    def __post_init__(self):
        train = np.asarray(self.train, dtype=np.int64)
        test = np.asarray(self.test, dtype=np.int64)
        if train.size == 0 or test.size == 0:
            raise DataError("a split must have non-empty train and test sides")
        if np.intersect1d(train, test).size:
            raise DataError("train and test indices overlap")
        train.setflags(write=False)
        test.setflags(write=False)
        object.__setattr__(self, "train", train)
        object.__setattr__(self, "test", test)


def random_oversample(data: Dataset, rng: int | np.random.Generator) -> Dataset:
    """Duplicate minority-class rows until every class matches the majority.

    Original rows keep their order; duplicates (drawn uniformly with
    replacement from same-class rows) are appended after them.
    """
    if data.n_rows == 0:
        raise DataError("cannot oversample an empty dataset")
    gen = as_generator(rng)
    counts = data.class_counts()
    target = int(counts.max())
    extra_X: list[np.ndarray] = []
    extra_y: list[np.ndarray] = []
    for c in range(data.n_classes):
        deficit = target - int(counts[c])
        if deficit <= 0 or counts[c] == 0:
            continue
        pool = np.flatnonzero(data.y == c)
        picks = pool[gen.integers(0, pool.size, size=deficit)]
        extra_X.append(data.X[picks])
        extra_y.append(np.full(deficit, c, dtype=np.int64))
    if not extra_X:
        return data
    X = np.vstack([data.X, *extra_X])
    y = np.concatenate([data.y, *extra_y])
    return Dataset(X=X, y=y, schema=data.schema, classes=data.classes)


def fit_scaler(X: np.ndarray, feature_names=None) -> ScalerParams:
    """Per-column mean and population std; constant columns get std 0 exactly."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] < 1:
        raise DataError("fit_scaler needs a non-empty 2-d matrix")
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = np.all(X == X[0], axis=0)
    # exact-equality mask avoids 1e-17 stds blowing up constant columns
    mean = np.where(constant, X[0], mean)
    std = np.where(constant, 0.0, std)
    names = tuple(feature_names) if feature_names is not None else None
    return ScalerParams(mean=mean, std=std, feature_names=names)


def apply_scaler(X: np.ndarray, params: ScalerParams) -> np.ndarray:
    """(x - mean) / std per column; zero-variance columns map to all zeros."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != params.n_features:
        raise DataError(
            f"scaler fitted for {params.n_features} features, got matrix with "
            f"{X.shape[1] if X.ndim == 2 else '?'} columns"
        )
    safe = np.where(params.std == 0.0, 1.0, params.std)
    out = (X - params.mean) / safe
    out[:, params.std == 0.0] = 0.0
    return out


def _apportion_test_counts(counts: np.ndarray, test_frac: float) -> np.ndarray:
    """Largest-remainder split of the total test size across classes."""
    n = int(counts.sum())
    total = _round_half_up(n * test_frac)
    total = min(max(total, 1), n - 1)
    quotas = counts * test_frac
    base = np.floor(quotas).astype(np.int64)
    shortfall = total - int(base.sum())
    if shortfall > 0:
        remainders = quotas - base
        order = np.lexsort((np.arange(counts.size), -remainders))
        for c in order[:shortfall]:
            base[c] += 1
    elif shortfall < 0:
        # test_frac near 1 can overshoot once after the total is clamped
        order = np.lexsort((np.arange(counts.size), -(quotas - base)))
        for c in order[::-1]:
            if shortfall == 0:
                break
            if base[c] > 0:
                base[c] -= 1
                shortfall += 1
    return base


def stratified_shuffle_splits(
    data: Dataset,
    repeats: int = 20,
    test_frac: float = 0.12,
    rng: int | np.random.Generator = 0,
) -> list[SplitIndices]:
    """Independent stratified train/test partitions.

    Each class contributes round(count_c * test_frac) test rows, adjusted by
    largest remainder so the total test size equals round(n * test_frac).
    Every repeat draws from its own sub-stream, so splits are identical
    whether generated serially or in parallel.
    """
    if not 0.0 < test_frac < 1.0:
        raise DataError(f"test_frac must be in (0, 1), got {test_frac}")
    if repeats < 1:
        raise DataError("repeats must be >= 1")
    counts = data.class_counts()
    for c, count in enumerate(counts):
        if count == 1:
            raise DataError(
                f"class {data.classes[c]!r} has a single row; cannot stratify"
            )
    test_counts = _apportion_test_counts(counts, test_frac)

    if isinstance(rng, np.random.Generator):
        streams = rng.spawn(repeats)
    else:
        streams = [
            np.random.default_rng(child)
            for child in np.random.SeedSequence(rng).spawn(repeats)
        ]

    class_rows = [np.flatnonzero(data.y == c) for c in range(data.n_classes)]
    splits: list[SplitIndices] = []
    for r in range(repeats):
        gen = streams[r]
        test_parts: list[np.ndarray] = []
        train_parts: list[np.ndarray] = []
        for c in range(data.n_classes):
            perm = gen.permutation(class_rows[c])
            t = int(test_counts[c])
            test_parts.append(perm[:t])
            train_parts.append(perm[t:])
        test = np.sort(np.concatenate(test_parts))
        train = np.sort(np.concatenate(train_parts))
        splits.append(SplitIndices(train=train, test=test))
    return splits
