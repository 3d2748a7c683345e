"""Local surrogate explanations for one prediction at a time.

The recipe: discretize numeric features into training quartile bins, draw
perturbed neighbors that keep or swap each feature's bin, weight neighbors by
an exponential kernel on their binary keep/swap vector, and fit a weighted
ridge surrogate whose coefficients are the per-feature explanation weights.
Sparsity comes from keeping only the k largest-magnitude coefficients.

Everything here is a pure function of its inputs and the seed; explanations
for many instances can run in parallel (each instance uses seed XOR index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import CATEGORICAL, NUMERIC, Dataset
from .errors import ConfigError, DataError
from .rng import as_generator, xor_seed


@dataclass(frozen=True)
class LimeConfig:
    """Knobs for the perturbation set and the ridge surrogate.

    kernel_width None means the scale-free default 0.75 * sqrt(d), resolved
    when the feature count is known.
    """

    n_samples: int = 5000
    kernel_width: float | None = None
    ridge_alpha: float = 1.0
    k_features: int = 10
    seed: int = 0

    def __post_init__(self):
        problems = []
        if self.n_samples < 2:
            problems.append(f"n_samples must be >= 2, got {self.n_samples}")
        if self.kernel_width is not None and not self.kernel_width >= 1e-12:
            problems.append(
                f"kernel_width must be >= 1e-12, got {self.kernel_width}"
            )
        if self.ridge_alpha < 0:
            problems.append(f"ridge_alpha must be >= 0, got {self.ridge_alpha}")
        if self.k_features < 1:
            problems.append(f"k_features must be >= 1, got {self.k_features}")
        if problems:
            raise ConfigError("; ".join(problems))

    def resolve_width(self, n_features: int) -> float:
        if self.kernel_width is not None:
            return self.kernel_width
        return 0.75 * float(np.sqrt(n_features))


@dataclass(frozen=True)
class Discretizer:
    """Quartile bins for numeric features; categorical codes pass through.

    boundaries holds (Q1, Q2, Q3) per feature (ignored for categorical);
    frequencies holds the training occupancy of each bin/category, used to
    sample swap values. lows/highs bound the outer numeric bins.
    """

    kinds: tuple[str, ...]
    boundaries: np.ndarray  # (d, 3)
    lows: np.ndarray
    highs: np.ndarray
    frequencies: tuple[np.ndarray, ...]

    @property
    def n_features(self) -> int:
        return len(self.kinds)

    def bin_column(self, j: int, x: np.ndarray) -> np.ndarray:
        if self.kinds[j] == CATEGORICAL:
            return x.astype(np.int64)
        b = self.boundaries[j]
        return ((x > b[0]).astype(np.int64) + (x > b[1]) + (x > b[2]))

    def bin_row(self, row: np.ndarray) -> np.ndarray:
        return np.array(
            [self.bin_column(j, np.asarray([v]))[0] for j, v in enumerate(row)],
            dtype=np.int64,
        )

    def numeric_edges(self, j: int) -> np.ndarray:
        b = self.boundaries[j]
        return np.array([self.lows[j], b[0], b[1], b[2], self.highs[j]])


def fit_discretizer(X_train: np.ndarray, kinds=None) -> Discretizer:
    """Quartile boundaries (linear-interpolation percentiles) per feature."""
    X_train = np.asarray(X_train, dtype=float)
    if X_train.ndim != 2 or X_train.shape[0] < 4:
        raise DataError("discretizer needs a 2-d matrix with at least 4 rows")
    d = X_train.shape[1]
    kinds = tuple(kinds) if kinds is not None else (NUMERIC,) * d
    if len(kinds) != d:
        raise DataError("kinds length must match the feature count")
    boundaries = np.zeros((d, 3))
    lows = np.zeros(d)
    highs = np.zeros(d)
    frequencies: list[np.ndarray] = []
    for j in range(d):
        x = X_train[:, j]
        if kinds[j] == CATEGORICAL:
            codes = x.astype(np.int64)
            frequencies.append(np.bincount(codes).astype(float))
            continue
        boundaries[j] = np.percentile(x, [25.0, 50.0, 75.0])
        lows[j], highs[j] = float(x.min()), float(x.max())
        bins = ((x > boundaries[j][0]).astype(np.int64)
                + (x > boundaries[j][1]) + (x > boundaries[j][2]))
        frequencies.append(np.bincount(bins, minlength=4).astype(float))
    return Discretizer(
        kinds=kinds,
        boundaries=boundaries,
        lows=lows,
        highs=highs,
        frequencies=tuple(frequencies),
    )


def perturb(
    instance: np.ndarray,
    disc: Discretizer,
    n_samples: int,
    rng: int | np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Neighborhood of an instance plus its binary keep/swap encoding.

    Row 0 of both outputs is the instance itself (all-ones encoding). Every
    other row keeps each feature's bin/category with probability 0.5 (entry 1)
    or swaps to a training-frequency-weighted alternative (entry 0). Numeric
    values are drawn uniformly inside the realized bin. A feature whose
    training mass sits entirely in the instance's bin has no alternative and
    is always kept.
    """
    instance = np.asarray(instance, dtype=float)
    d = disc.n_features
    if instance.shape != (d,):
        raise DataError(f"instance must have {d} features")
    gen = as_generator(rng)
    m = n_samples - 1
    instance_bins = disc.bin_row(instance)

    Z = np.ones((n_samples, d))
    X_pert = np.empty((n_samples, d))
    X_pert[0] = instance
    keep_draw = gen.random((m, d)) < 0.5
    for j in range(d):
        freqs = disc.frequencies[j]
        ibin = int(instance_bins[j])
        alt = freqs.copy()
        if ibin < alt.size:
            alt[ibin] = 0.0
        if alt.sum() == 0.0:
            kept = np.ones(m, dtype=bool)  # nothing to swap to
        else:
            kept = keep_draw[:, j]
        bins = np.full(m, ibin, dtype=np.int64)
        n_swap = int((~kept).sum())
        if n_swap:
            bins[~kept] = gen.choice(alt.size, size=n_swap, p=alt / alt.sum())
        Z[1:, j] = kept
        if disc.kinds[j] == CATEGORICAL:
            X_pert[1:, j] = bins.astype(float)
        else:
            edges = disc.numeric_edges(j)
            lo = edges[bins]
            hi = edges[bins + 1]
            X_pert[1:, j] = lo + gen.random(m) * (hi - lo)
    return X_pert, Z


def kernel_weights(Z: np.ndarray, kernel_width: float) -> np.ndarray:
    """exp(-D^2 / width^2) with D the distance to the all-ones anchor row."""
    if not kernel_width >= 1e-12:
        raise ConfigError(f"kernel_width must be >= 1e-12, got {kernel_width}")
    Z = np.asarray(Z, dtype=float)
    dist2 = ((1.0 - Z) ** 2).sum(axis=1)
    return np.exp(-dist2 / kernel_width**2)


@dataclass(frozen=True)
class Explanation:
    """Sparse signed feature weights for one explained prediction."""

    instance_index: int
    class_code: int
    intercept: float
    weights: np.ndarray  # dense, at most k_features nonzero
    fit_quality: float  # weighted R^2 of the dense surrogate

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def to_json_dict(self, feature_names=None) -> dict:
        names = (list(feature_names) if feature_names is not None
                 else [f"f{j}" for j in range(self.weights.size)])
        nonzero = np.flatnonzero(self.weights)
        order = nonzero[np.argsort(-np.abs(self.weights[nonzero]), kind="stable")]
        return {
            "instance_index": self.instance_index,
            "class_code": self.class_code,
            "intercept": self.intercept,
            "fit_quality": self.fit_quality,
            "weights": [[names[j], float(self.weights[j])] for j in order],
        }


def fit_surrogate(
    Z: np.ndarray,
    y_target: np.ndarray,
    weights: np.ndarray,
    config: LimeConfig,
    instance_index: int = -1,
    class_code: int = -1,
) -> Explanation:
    """Weighted ridge least squares on the binary representation.

    Solves (Z'WZ + alpha*I) beta = Z'Wy with the intercept left unpenalized
    (weighted centering), reports the dense fit's weighted R^2, then keeps
    only the k largest-magnitude coefficients.
    """
    Z = np.asarray(Z, dtype=float)
    y = np.asarray(y_target, dtype=float)
    w = np.asarray(weights, dtype=float)
    if not (Z.shape[0] == y.size == w.size):
        raise DataError("Z, y_target and weights must agree on the row count")
    sw = w.sum()
    if sw <= 0:
        raise DataError("kernel weights sum to zero; widen the kernel")
    z_mean = w @ Z / sw
    y_mean = float(w @ y / sw)
    Zc = Z - z_mean
    yc = y - y_mean
    d = Z.shape[1]
    A = Zc.T @ (Zc * w[:, None]) + config.ridge_alpha * np.eye(d)
    if config.ridge_alpha == 0.0 and np.linalg.matrix_rank(A) < d:
        raise DataError(
            "weighted normal equations are singular with ridge_alpha=0; "
            "set ridge_alpha > 0"
        )
    beta = np.linalg.solve(A, Zc.T @ (w * yc))
    intercept = y_mean - float(z_mean @ beta)

    fitted = Z @ beta + intercept
    sse = float(w @ (y - fitted) ** 2)
    sst = float(w @ yc**2)
    if sst == 0.0:
        quality = 1.0 if sse <= 1e-24 else 0.0
    else:
        quality = 1.0 - sse / sst

    if d > config.k_features:
        order = np.argsort(-np.abs(beta), kind="stable")
        sparse = np.zeros(d)
        keep = order[: config.k_features]
        sparse[keep] = beta[keep]
        beta = sparse
    return Explanation(
        instance_index=instance_index,
        class_code=class_code,
        intercept=intercept,
        weights=beta,
        fit_quality=quality,
    )


def explain_instance(
    model,
    data: Dataset,
    instance_index: int,
    config: LimeConfig,
    discretizer: Discretizer | None = None,
) -> Explanation:
    """Explain the model's predicted class for one dataset row.

    model is any object with predict / predict_proba over data's feature
    space. Passing a prefitted discretizer skips the quartile fit when
    explaining many rows of the same dataset.
    """
    if not 0 <= instance_index < data.n_rows:
        raise DataError(f"instance index {instance_index} out of range")
    if config.n_samples < data.n_features + 2:
        raise ConfigError(
            f"n_samples={config.n_samples} is too small for "
            f"{data.n_features} features (need at least d + 2)"
        )
    disc = discretizer if discretizer is not None else fit_discretizer(
        data.X, kinds=[c.kind for c in data.schema]
    )
    instance = data.X[instance_index]
    target_class = int(model.predict(instance.reshape(1, -1))[0])
    gen = np.random.default_rng(xor_seed(config.seed, instance_index))
    X_pert, Z = perturb(instance, disc, config.n_samples, gen)
    weights = kernel_weights(Z, config.resolve_width(data.n_features))
    y_target = model.predict_proba(X_pert)[:, target_class]
    return fit_surrogate(
        Z, y_target, weights, config,
        instance_index=instance_index, class_code=target_class,
    )
