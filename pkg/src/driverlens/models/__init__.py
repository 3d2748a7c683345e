"""Model zoo: eleven classifiers behind one train / predict contract.

Algorithms are addressed by their report row ids:

    LR   multinomial softmax regression (gradient descent)
    DTC  decision tree (CART, Gini)
    RFC  random forest            ETC  extremely randomized trees
    GBC  gradient boosting        ABC  adaptive boosting (multiclass stumps)
    KNN  k nearest neighbors      GNB  Gaussian naive Bayes
    MNB  multinomial naive Bayes (shifted)
    LDA  linear discriminant      QDA  quadratic discriminant
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from ..errors import ConfigError, DataError
from .base import Classifier
from .bayes import GaussianNaiveBayes, MultinomialNaiveBayes
from .ensemble import (
    AdaBoostClassifier,
    ExtraTreesClassifier,
    GradientBoostingClassifier,
    RandomForestClassifier,
)
from .linear import (
    LinearDiscriminantAnalysis,
    LogisticRegression,
    QuadraticDiscriminantAnalysis,
)
from .neighbors import KNearestNeighbors
from .tree import ClassificationTree, DecisionTreeClassifier, RegressionTree

REGISTRY: dict[str, type[Classifier]] = {
    cls.algorithm: cls
    for cls in (
        LogisticRegression,
        DecisionTreeClassifier,
        RandomForestClassifier,
        ExtraTreesClassifier,
        GradientBoostingClassifier,
        AdaBoostClassifier,
        KNearestNeighbors,
        GaussianNaiveBayes,
        MultinomialNaiveBayes,
        LinearDiscriminantAnalysis,
        QuadraticDiscriminantAnalysis,
    )
}

ALGORITHMS = tuple(REGISTRY)  # canonical report order


@dataclass(frozen=True)
class ModelSpec:
    """Algorithm id, hyperparameter overrides, and a seed."""

    algorithm: str
    hyperparameters: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.algorithm not in REGISTRY:
            raise ConfigError(
                f"unknown algorithm {self.algorithm!r}; "
                f"choose from {', '.join(ALGORITHMS)}"
            )
        defaults = REGISTRY[self.algorithm].DEFAULTS
        unknown = sorted(set(self.hyperparameters) - set(defaults))
        if unknown:
            raise ConfigError(
                f"{self.algorithm}: unknown hyperparameter(s) {', '.join(unknown)}; "
                f"valid keys: {', '.join(sorted(defaults))}"
            )
        object.__setattr__(self, "hyperparameters", dict(self.hyperparameters))

    def with_seed(self, seed: int) -> "ModelSpec":
        return ModelSpec(self.algorithm, dict(self.hyperparameters), int(seed))

    def build(self) -> Classifier:
        return REGISTRY[self.algorithm](seed=self.seed, **self.hyperparameters)


def train(spec: ModelSpec, X, y, rng: int | None = None,
          n_classes: int | None = None) -> Classifier:
    """Fit the spec'd model; rng (an integer seed) overrides spec.seed."""
    effective = spec if rng is None else spec.with_seed(rng)
    return effective.build().fit(X, y, n_classes=n_classes)


def model_from_json_dict(doc: dict) -> Classifier:
    """Rebuild a fitted model from its serialized document."""
    if doc.get("format_version") != 1:
        raise DataError(f"unsupported model format version {doc.get('format_version')!r}")
    algorithm = doc["algorithm"]
    if algorithm not in REGISTRY:
        raise DataError(f"unknown serialized algorithm {algorithm!r}")
    model = REGISTRY[algorithm](seed=doc["seed"], **doc["hyperparameters"])
    model.n_features_ = int(doc["n_features"])
    model.n_classes_ = int(doc["n_classes"])
    model._load_state(doc["state"])
    return model


def model_from_json(text: str) -> Classifier:
    return model_from_json_dict(json.loads(text))
