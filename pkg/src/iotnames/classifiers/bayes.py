"""Gaussian naive Bayes for binary targets.

Per class and feature a Gaussian is fitted by maximum likelihood; variances
are floored at eps = 1e-9 times the largest per-feature variance of the
whole training set, so constant features cannot divide by zero.  Scores are
posterior probabilities computed in log space.
"""

import numpy as np

from ..errors import InputError


class NaiveBayes:
    def __init__(self, var_floor_scale=1e-9):
        self.var_floor_scale = var_floor_scale
        self.classes_: np.ndarray | None = None
        self.log_priors_: np.ndarray | None = None
        self.means_: np.ndarray | None = None
        self.vars_: np.ndarray | None = None

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or len(X) != len(y):
            raise InputError("X must be 2-D and aligned with y")
        if len(y) == 0:
            raise InputError("cannot fit on an empty dataset")
        global_var = X.var(axis=0)
        eps = self.var_floor_scale * float(global_var.max()) if len(X) > 1 else 0.0
        if eps <= 0.0:
            eps = 1e-12  # fully constant data still needs a finite width
        self.classes_ = np.array([0, 1])
        self.log_priors_ = np.full(2, -np.inf)
        self.means_ = np.zeros((2, X.shape[1]))
        self.vars_ = np.ones((2, X.shape[1]))
        for cls in (0, 1):
            rows = X[y == cls]
            if len(rows) == 0:
                continue  # absent class keeps -inf prior, posterior 0
            self.log_priors_[cls] = np.log(len(rows) / len(y))
            self.means_[cls] = rows.mean(axis=0)
            self.vars_[cls] = np.maximum(rows.var(axis=0), eps)
        return self

    def _log_joint(self, X) -> np.ndarray:
        if self.means_ is None:
            raise InputError("model is not fitted")
        X = np.asarray(X, dtype=float)
        out = np.empty((len(X), 2))
        for cls in (0, 1):
            if np.isneginf(self.log_priors_[cls]):
                out[:, cls] = -np.inf
                continue
            var = self.vars_[cls]
            diff = X - self.means_[cls]
            out[:, cls] = self.log_priors_[cls] - 0.5 * (
                np.log(2.0 * np.pi * var).sum() + (diff * diff / var).sum(axis=1)
            )
        return out

    def score(self, X) -> np.ndarray:
        """Posterior probability of the positive class."""
        joint = self._log_joint(X)
        peak = joint.max(axis=1, keepdims=True)
        # Rows can be [-inf, -inf] only if both classes were absent, which
        # fit() precludes; shifting by the peak keeps the exps in range.
        shifted = np.exp(joint - peak)
        return shifted[:, 1] / shifted.sum(axis=1)

    def predict(self, X) -> np.ndarray:
        return (self.score(X) >= 0.5).astype(int)
