"""L2-regularized logistic regression trained by batch gradient descent.

The step size comes from a backtracking (Armijo) line search on the exact
objective, and training stops once the gradient max-norm falls under the
tolerance.  The bias is not regularized.  loss_and_grad is exposed so the
analytic gradient can be checked against finite differences.
"""

import numpy as np

from ..errors import InputError


def _stable_sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2: float):
    """Mean log-loss plus (l2/2)*||w||^2, with gradients for w and b."""
    n = len(y)
    margins = X @ w + b
    signed = np.where(y == 1, -margins, margins)
    loss = float(np.logaddexp(0.0, signed).mean() + 0.5 * l2 * (w @ w))
    residual = _stable_sigmoid(margins) - y
    grad_w = X.T @ residual / n + l2 * w
    grad_b = float(residual.mean())
    return loss, grad_w, grad_b


class LogisticRegression:
    # The default l2 is deliberately firm: with many more features than
    # samples a near-zero penalty lets gradient descent park at an
    # interpolating boundary glued to one class.
    def __init__(self, l2=1e-2, max_iters=500, tolerance=1e-6):
        if l2 < 0:
            raise InputError(f"l2 must be non-negative, got {l2}")
        self.l2 = l2
        self.max_iters = max_iters
        self.tolerance = tolerance
        self.weights_: np.ndarray | None = None
        self.bias_: float = 0.0
        self.iterations_: int = 0

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or len(X) != len(y):
            raise InputError("X must be 2-D and aligned with y")
        if len(y) == 0:
            raise InputError("cannot fit on an empty dataset")
        w = np.zeros(X.shape[1])
        b = 0.0
        loss, grad_w, grad_b = loss_and_grad(w, b, X, y, self.l2)
        for iteration in range(self.max_iters):
            grad_norm = max(np.abs(grad_w).max(initial=0.0), abs(grad_b))
            if grad_norm < self.tolerance:
                break
            # Backtracking line search along the negative gradient.
            grad_sq = grad_w @ grad_w + grad_b * grad_b
            step = 1.0
            for _ in range(60):
                cand_w = w - step * grad_w
                cand_b = b - step * grad_b
                cand_loss, cand_gw, cand_gb = loss_and_grad(cand_w, cand_b, X, y, self.l2)
                if cand_loss <= loss - 1e-4 * step * grad_sq:
                    break
                step *= 0.5
            else:
                break  # no admissible step: numerically converged
            w, b = cand_w, cand_b
            loss, grad_w, grad_b = cand_loss, cand_gw, cand_gb
            self.iterations_ = iteration + 1
        self.weights_ = w
        self.bias_ = b
        return self

    def score(self, X) -> np.ndarray:
        """sigmoid(w . x + b), the positive-class probability."""
        if self.weights_ is None:
            raise InputError("model is not fitted")
        X = np.asarray(X, dtype=float)
        return _stable_sigmoid(X @ self.weights_ + self.bias_)

    def predict(self, X) -> np.ndarray:
        return (self.score(X) >= 0.5).astype(int)
