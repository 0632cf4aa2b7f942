"""k-nearest-neighbors with Euclidean distance.

The score is the positive fraction among the k nearest training points.
Distance ties resolve to the lower training row index (stable sort), which
pins down behavior for symmetric inputs.
"""

import numpy as np

from ..errors import InputError


class KNearestNeighbors:
    def __init__(self, k=5):
        if k < 1:
            raise InputError(f"k must be positive, got {k}")
        self.k = k
        self.X_: np.ndarray | None = None
        self.y_: np.ndarray | None = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or len(X) != len(y):
            raise InputError("X must be 2-D and aligned with y")
        if len(y) < self.k:
            raise InputError(f"k={self.k} exceeds the {len(y)} training samples")
        self.X_ = X
        self.y_ = y
        return self

    def score(self, X) -> np.ndarray:
        """Fraction of positives among the k nearest training rows."""
        if self.X_ is None:
            raise InputError("model is not fitted")
        X = np.asarray(X, dtype=float)
        # Squared Euclidean via the expansion; monotone in true distance.
        sq = (
            (X * X).sum(axis=1)[:, None]
            + (self.X_ * self.X_).sum(axis=1)[None, :]
            - 2.0 * (X @ self.X_.T)
        )
        nearest = np.argsort(sq, axis=1, kind="stable")[:, : self.k]
        return self.y_[nearest].mean(axis=1)

    def predict(self, X) -> np.ndarray:
        return (self.score(X) >= 0.5).astype(int)
