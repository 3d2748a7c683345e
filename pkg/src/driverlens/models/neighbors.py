"""k-nearest-neighbors voting classifier."""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from .base import Classifier

_CHUNK = 256  # test rows per distance block, bounds memory at ~n_train*d*256


class KNearestNeighbors(Classifier):
    """Euclidean k-NN; probability = neighbor vote fraction.

    Distance ties resolve to the lower training-row index (stable sort),
    vote ties to the lower class code.
    """

    algorithm = "KNN"
    DEFAULTS = {"k": 5}

    def _fit(self, X, y, rng):
        k = self.params["k"]
        if not 1 <= k <= X.shape[0]:
            raise DataError(f"KNN: k={k} must be in 1..{X.shape[0]} (training rows)")
        self.X_ = X.copy()
        self.y_ = y.copy()

    def _predict_proba(self, X):
        k = self.params["k"]
        n = X.shape[0]
        proba = np.empty((n, self.n_classes_))
        for start in range(0, n, _CHUNK):
            block = X[start:start + _CHUNK]
            diff = block[:, None, :] - self.X_[None, :, :]
            dist2 = np.einsum("ijk,ijk->ij", diff, diff)
            nearest = np.argsort(dist2, axis=1, kind="stable")[:, :k]
            votes = self.y_[nearest]
            for i in range(block.shape[0]):
                counts = np.bincount(votes[i], minlength=self.n_classes_)
                proba[start + i] = counts / k
        return proba

    def _state(self):
        return {"X": self.X_.tolist(), "y": self.y_.tolist()}

    def _load_state(self, state):
        self.X_ = np.asarray(state["X"], dtype=float)
        self.y_ = np.asarray(state["y"], dtype=np.int64)
