"""Binary classifiers over embedded name matrices.

All models share the same surface: fit(X, y), score(X) -> P(positive)-like
values in [0, 1], and predict(X) -> {0, 1} by thresholding score at 0.5.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .bayes import NaiveBayes
from .forest import RandomForest
from .io import algorithm_of, load_model, save_model
from .linear import LogisticRegression
from .neighbors import KNearestNeighbors
from .svm import LinearSVM
from .tree import DecisionTree, gini

ALGORITHMS = ("nb", "lr", "knn", "svm", "dt", "rf")

_SEEDED = {"svm", "dt", "rf"}
_CLASSES = {
    "nb": NaiveBayes,
    "lr": LogisticRegression,
    "knn": KNearestNeighbors,
    "svm": LinearSVM,
    "dt": DecisionTree,
    "rf": RandomForest,
}


@dataclass
class FeatureMatrix:
    """Row-aligned feature matrix and binary labels."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y = np.asarray(self.y, dtype=int)
        if self.x.ndim != 2:
            raise InputError("feature matrix must be 2-D")
        if self.y.shape != (self.x.shape[0],):
            raise InputError(
                f"labels ({self.y.shape}) do not align with rows ({self.x.shape[0]})"
            )
        if self.y.size and not np.isin(self.y, (0, 1)).all():
            raise InputError("labels must be 0 or 1")

    def __len__(self) -> int:
        return self.x.shape[0]

    def take(self, indices) -> "FeatureMatrix":
        indices = np.asarray(indices, dtype=int)
        return FeatureMatrix(self.x[indices], self.y[indices])


def make_classifier(algorithm: str, seed: int = 0, **hyper):
    """Build an unfitted model by short algorithm name (see ALGORITHMS)."""
    if algorithm not in _CLASSES:
        raise InputError(
            f"unknown algorithm {algorithm!r}; expected one of {', '.join(ALGORITHMS)}"
        )
    if algorithm in _SEEDED:
        hyper.setdefault("seed", seed)
    try:
        return _CLASSES[algorithm](**hyper)
    except TypeError as exc:
        raise InputError(f"bad {algorithm} hyperparameter: {exc}") from exc


__all__ = [
    "ALGORITHMS",
    "FeatureMatrix",
    "NaiveBayes",
    "LogisticRegression",
    "KNearestNeighbors",
    "LinearSVM",
    "DecisionTree",
    "RandomForest",
    "algorithm_of",
    "gini",
    "load_model",
    "make_classifier",
    "save_model",
]
