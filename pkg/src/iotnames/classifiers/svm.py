"""Linear SVM trained with the Pegasos stochastic subgradient method.

One sample per step, learning rate 1/(l2 * t), weights shrunk by the
regularizer every step and pushed along y*x on margin violations.  The bias
is updated on violations but not regularized.  Ranking scores squash the
margin through a sigmoid so they live in [0, 1] like every other model.
"""

import numpy as np

from ..errors import InputError
from .linear import _stable_sigmoid


def hinge_objective(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float) -> float:
    """(l2/2)*||w||^2 plus mean hinge loss, with y in {0,1}."""
    signs = np.where(np.asarray(y) == 1, 1.0, -1.0)
    margins = signs * (np.asarray(X, dtype=float) @ w + b)
    return float(0.5 * l2 * (w @ w) + np.maximum(0.0, 1.0 - margins).mean())


def hinge_subgradient(w: np.ndarray, b: float, x: np.ndarray, sign: float, l2: float):
    """Subgradient of (l2/2)||w||^2 + hinge at one sample (sign in {-1,+1})."""
    margin = sign * (x @ w + b)
    grad_w = l2 * w
    grad_b = 0.0
    if margin < 1.0:
        grad_w = grad_w - sign * x
        grad_b = -sign
    return grad_w, grad_b


class LinearSVM:
    def __init__(self, l2=0.01, epochs=5, seed=0):
        if l2 <= 0:
            raise InputError(f"Pegasos needs a positive l2, got {l2}")
        if epochs < 1:
            raise InputError(f"epochs must be positive, got {epochs}")
        self.l2 = l2
        self.epochs = epochs
        self.seed = seed
        self.weights_: np.ndarray | None = None
        self.bias_: float = 0.0

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or len(X) != len(y):
            raise InputError("X must be 2-D and aligned with y")
        if len(y) == 0:
            raise InputError("cannot fit on an empty dataset")
        signs = np.where(y == 1, 1.0, -1.0)
        rng = np.random.default_rng(self.seed)
        w = np.zeros(X.shape[1])
        b = 0.0
        t = 0
        for _ in range(self.epochs):
            for i in rng.permutation(len(y)):
                t += 1
                lr = 1.0 / (self.l2 * t)
                grad_w, grad_b = hinge_subgradient(w, b, X[i], signs[i], self.l2)
                w = w - lr * grad_w
                b = b - lr * grad_b
        self.weights_ = w
        self.bias_ = b
        return self

    def decision(self, X) -> np.ndarray:
        if self.weights_ is None:
            raise InputError("model is not fitted")
        return np.asarray(X, dtype=float) @ self.weights_ + self.bias_

    def score(self, X) -> np.ndarray:
        """Margin squashed through a sigmoid; monotone in the margin."""
        return _stable_sigmoid(self.decision(X))

    def predict(self, X) -> np.ndarray:
        return (self.score(X) >= 0.5).astype(int)
