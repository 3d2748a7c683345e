"""CART-style trees: the building block for the tree ensembles.

Split search conventions, shared by every consumer:
  - candidate thresholds sit at midpoints between consecutive sorted distinct
    values (falling back to the lower value if the midpoint rounds onto the
    upper one, so routing by x <= t always reproduces the training partition);
  - the best split maximizes the weighted purity score, ties broken by lowest
    feature index then lowest threshold;
  - an impure node splits whenever any candidate exists (Gini/SSE gain is
    never negative), so unlimited-depth trees memorize consistent data.
"""

from __future__ import annotations

import numpy as np

from .base import Classifier

_LEAF = -1


def _midpoint(lo: float, hi: float) -> float:
    t = (lo + hi) / 2.0
    return lo if t >= hi else t


def _best_split_classification(X, y, w, n_classes, feature_indices):
    """Max over (feature, threshold) of sum_c W_Lc^2/W_L + sum_c W_Rc^2/W_R.

    Returns (score, feature, threshold) or None when no feature has two
    distinct values. Maximizing this score minimizes the weighted average
    Gini impurity of the children.
    """
    n = y.size
    total_w = w.sum()
    best = None
    for j in feature_indices:
        x = X[:, j]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        cut = np.flatnonzero(xs[:-1] < xs[1:])
        if cut.size == 0:
            continue
        ws = w[order]
        class_w = np.zeros((n, n_classes))
        class_w[np.arange(n), y[order]] = ws
        class_prefix = np.cumsum(class_w, axis=0)
        w_prefix = np.cumsum(ws)
        WL = w_prefix[cut]
        WR = total_w - WL
        CL = class_prefix[cut]
        CR = class_prefix[-1] - CL
        score = (CL**2).sum(axis=1) / WL + (CR**2).sum(axis=1) / WR
        k = int(np.argmax(score))  # first max -> lowest threshold
        if best is None or score[k] > best[0]:
            p = cut[k]
            best = (float(score[k]), j, _midpoint(float(xs[p]), float(xs[p + 1])))
    return best


def _best_split_regression(X, y, w, feature_indices):
    """Max of (sum w*y)_L^2/W_L + (sum w*y)_R^2/W_R, i.e. min weighted SSE."""
    total_w = w.sum()
    wy = w * y
    total_wy = wy.sum()
    best = None
    for j in feature_indices:
        x = X[:, j]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        cut = np.flatnonzero(xs[:-1] < xs[1:])
        if cut.size == 0:
            continue
        w_prefix = np.cumsum(w[order])
        wy_prefix = np.cumsum(wy[order])
        WL = w_prefix[cut]
        WR = total_w - WL
        SL = wy_prefix[cut]
        SR = total_wy - SL
        score = SL**2 / WL + SR**2 / WR
        k = int(np.argmax(score))
        if best is None or score[k] > best[0]:
            p = cut[k]
            best = (float(score[k]), j, _midpoint(float(xs[p]), float(xs[p + 1])))
    return best


def _random_split_classification(X, y, w, n_classes, feature_indices, rng):
    """One uniform-random threshold per candidate feature, best Gini wins."""
    best = None
    for j in feature_indices:
        x = X[:, j]
        lo, hi = float(x.min()), float(x.max())
        if lo == hi:
            continue
        t = float(rng.uniform(lo, hi))
        left = x <= t
        if left.all() or not left.any():
            continue
        score = 0.0
        for mask in (left, ~left):
            wm = w[mask]
            side_w = wm.sum()
            class_w = np.bincount(y[mask], weights=wm, minlength=n_classes)
            score += (class_w**2).sum() / side_w
        if best is None or score > best[0]:
            best = (score, j, t)
    return best


class _Tree:
    """Flattened tree arrays grown by iterative preorder DFS."""

    def __init__(self, max_depth=None, min_samples_split=2, max_features=None,
                 splitter="best"):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.splitter = splitter
        self.feature: np.ndarray | None = None
        self.threshold: np.ndarray | None = None
        self.left: np.ndarray | None = None
        self.right: np.ndarray | None = None
        self.value: np.ndarray | None = None

    # subclasses define _leaf_value, _is_pure, _find_split

    def fit(self, X, y, sample_weight=None, rng=None, **kwargs):
        X = np.asarray(X, dtype=float)
        n, d = X.shape
        w = (np.full(n, 1.0 / n) if sample_weight is None
             else np.asarray(sample_weight, dtype=float))
        rng = rng if rng is not None else np.random.default_rng(0)
        self._setup(y, **kwargs)

        feature, threshold, left, right, values = [], [], [], [], []

        def new_node():
            feature.append(_LEAF)
            threshold.append(0.0)
            left.append(_LEAF)
            right.append(_LEAF)
            values.append(None)
            return len(feature) - 1

        stack = [(np.arange(n), 0, new_node())]
        while stack:
            idx, depth, node = stack.pop()
            values[node] = self._leaf_value(y[idx], w[idx])
            if (self._is_pure(y[idx])
                    or idx.size < self.min_samples_split
                    or (self.max_depth is not None and depth >= self.max_depth)):
                continue
            candidates = self._candidate_features(X.shape[1], rng)
            split = self._find_split(X[idx], y[idx], w[idx], candidates, rng)
            if split is None:
                continue
            _, j, t = split
            go_left = X[idx, j] <= t
            feature[node] = j
            threshold[node] = t
            left[node] = new_node()
            right[node] = new_node()
            # push right first so the left child is processed (and numbered) first
            stack.append((idx[~go_left], depth + 1, right[node]))
            stack.append((idx[go_left], depth + 1, left[node]))

        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(values, dtype=float)
        return self

    def _candidate_features(self, d, rng):
        if self.max_features is None or self.max_features >= d:
            return np.arange(d)
        picked = rng.choice(d, size=self.max_features, replace=False)
        return np.sort(picked)  # ascending keeps the lowest-feature tie-break

    def _leaf_ids(self, X) -> np.ndarray:
        current = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            internal = self.feature[current] >= 0
            if not internal.any():
                return current
            rows = np.flatnonzero(internal)
            nodes = current[rows]
            go_left = X[rows, self.feature[nodes]] <= self.threshold[nodes]
            current[rows] = np.where(go_left, self.left[nodes], self.right[nodes])

    def to_state(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    def load_state(self, state: dict):
        self.feature = np.asarray(state["feature"], dtype=np.int64)
        self.threshold = np.asarray(state["threshold"], dtype=float)
        self.left = np.asarray(state["left"], dtype=np.int64)
        self.right = np.asarray(state["right"], dtype=np.int64)
        self.value = np.asarray(state["value"], dtype=float)
        return self


class ClassificationTree(_Tree):
    """Gini-impurity tree; leaves hold weighted class distributions."""

    def _setup(self, y, n_classes=None):
        self.n_classes = int(n_classes) if n_classes else int(y.max()) + 1

    def _leaf_value(self, y, w):
        class_w = np.bincount(y, weights=w, minlength=self.n_classes)
        return class_w / class_w.sum()

    def _is_pure(self, y):
        return np.all(y == y[0])

    def _find_split(self, X, y, w, candidates, rng):
        if self.splitter == "random":
            return _random_split_classification(X, y, w, self.n_classes,
                                                candidates, rng)
        return _best_split_classification(X, y, w, self.n_classes, candidates)

    def predict_proba(self, X):
        return self.value[self._leaf_ids(np.asarray(X, dtype=float))]

    def predict(self, X):
        return np.argmax(self.predict_proba(X), axis=1).astype(np.int64)


class RegressionTree(_Tree):
    """Squared-error tree; leaves hold weighted target means."""

    def _setup(self, y):
        pass

    def _leaf_value(self, y, w):
        return float(np.sum(w * y) / np.sum(w))

    def _is_pure(self, y):
        return np.all(y == y[0])

    def _find_split(self, X, y, w, candidates, rng):
        return _best_split_regression(X, y, w, candidates)

    def predict(self, X):
        return self.value[self._leaf_ids(np.asarray(X, dtype=float))]


class DecisionTreeClassifier(Classifier):
    """Single unpruned CART tree."""

    algorithm = "DTC"
    DEFAULTS = {"max_depth": None, "min_samples_split": 2}

    def _fit(self, X, y, rng):
        self.tree_ = ClassificationTree(
            max_depth=self.params["max_depth"],
            min_samples_split=self.params["min_samples_split"],
        ).fit(X, y.astype(np.int64), rng=rng, n_classes=self.n_classes_)

    def _predict_proba(self, X):
        return self.tree_.predict_proba(X)

    def _state(self):
        return {"tree": self.tree_.to_state()}

    def _load_state(self, state):
        self.tree_ = ClassificationTree(
            max_depth=self.params["max_depth"],
            min_samples_split=self.params["min_samples_split"],
        ).load_state(state["tree"])
        self.tree_.n_classes = self.n_classes_
