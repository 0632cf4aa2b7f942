"""CART-style binary decision tree with Gini impurity.

Splits are searched greedily: candidate thresholds are the midpoints of
consecutive distinct sorted values, and the winning split minimizes the
weighted Gini of the children.  Ties resolve to the lower feature index,
then the lower threshold, so fits are fully deterministic.  Nodes are kept
in flat arrays (feature, threshold, child ids, class counts), which makes
prediction a vectorized walk and serialization trivial.
"""

import numpy as np

from ..errors import InputError


def gini(pos: float, total: float) -> float:
    """Binary Gini impurity of a node with `pos` positives out of `total`."""
    if total == 0:
        return 0.0
    p = pos / total
    return 2.0 * p * (1.0 - p)


class DecisionTree:
    """Binary classifier tree; score(x) is the positive fraction at the leaf."""

    def __init__(self, max_depth=None, min_samples_split=2, features_per_split=None, seed=0):
        if min_samples_split < 2:
            raise InputError(f"min_samples_split must be >= 2, got {min_samples_split}")
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.features_per_split = features_per_split
        self.seed = seed
        self.feature_: np.ndarray | None = None  # -1 marks a leaf
        self.threshold_: np.ndarray | None = None
        self.left_: np.ndarray | None = None
        self.right_: np.ndarray | None = None
        self.pos_: np.ndarray | None = None
        self.neg_: np.ndarray | None = None

    # -- fitting -----------------------------------------------------------

    def fit(self, X, y, sample_indices=None, rng=None):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or len(X) != len(y):
            raise InputError("X must be 2-D and aligned with y")
        if len(y) == 0:
            raise InputError("cannot fit on an empty dataset")
        if self.features_per_split is not None:
            if not 1 <= self.features_per_split <= X.shape[1]:
                raise InputError(
                    f"features_per_split {self.features_per_split} outside 1..{X.shape[1]}"
                )
            if rng is None:
                rng = np.random.default_rng(self.seed)
        rows = np.arange(len(y)) if sample_indices is None else np.asarray(sample_indices, dtype=int)
        nodes = {"feature": [], "threshold": [], "left": [], "right": [], "pos": [], "neg": []}
        self._grow(X, y, rows, 0, rng, nodes)
        self.feature_ = np.array(nodes["feature"], dtype=int)
        self.threshold_ = np.array(nodes["threshold"], dtype=float)
        self.left_ = np.array(nodes["left"], dtype=int)
        self.right_ = np.array(nodes["right"], dtype=int)
        self.pos_ = np.array(nodes["pos"], dtype=int)
        self.neg_ = np.array(nodes["neg"], dtype=int)
        return self

    def _new_node(self, nodes, pos, neg):
        nodes["feature"].append(-1)
        nodes["threshold"].append(0.0)
        nodes["left"].append(-1)
        nodes["right"].append(-1)
        nodes["pos"].append(int(pos))
        nodes["neg"].append(int(neg))
        return len(nodes["feature"]) - 1

    def _grow(self, X, y, rows, depth, rng, nodes):
        labels = y[rows]
        n = len(rows)
        n_pos = int(labels.sum())
        node = self._new_node(nodes, n_pos, n - n_pos)
        if (
            n_pos == 0
            or n_pos == n
            or n < self.min_samples_split
            or (self.max_depth is not None and depth >= self.max_depth)
        ):
            return node
        if self.features_per_split is None:
            candidates = np.arange(X.shape[1])
        else:
            candidates = np.sort(rng.choice(X.shape[1], self.features_per_split, replace=False))
        best = self._best_split(X, labels, rows, candidates, n, n_pos)
        if best is None:
            return node
        feature, threshold = best
        go_left = X[rows, feature] <= threshold
        if go_left.all() or not go_left.any():
            # Midpoint rounding collapsed the partition; keep the leaf.
            return node
        nodes["feature"][node] = int(feature)
        nodes["threshold"][node] = float(threshold)
        nodes["left"][node] = self._grow(X, y, rows[go_left], depth + 1, rng, nodes)
        nodes["right"][node] = self._grow(X, y, rows[~go_left], depth + 1, rng, nodes)
        return node

    @staticmethod
    def _best_split(X, labels, rows, candidates, n, n_pos):
        """Lowest weighted child Gini over (candidate feature, midpoint).

        Scanning candidates in ascending feature order with a strict "<"
        keeps the tie-break on lower feature index; within one feature,
        argmin returns the first (lowest) qualifying threshold.
        """
        best_impurity = np.inf
        best = None
        for feature in candidates:
            column = X[rows, feature]
            order = np.argsort(column, kind="stable")
            sorted_values = column[order]
            sorted_labels = labels[order]
            boundaries = np.flatnonzero(sorted_values[1:] > sorted_values[:-1])
            if boundaries.size == 0:
                continue
            left_n = boundaries + 1.0
            right_n = n - left_n
            left_pos = np.cumsum(sorted_labels)[boundaries]
            right_pos = n_pos - left_pos
            p_left = left_pos / left_n
            p_right = right_pos / right_n
            weighted = (
                left_n * 2.0 * p_left * (1.0 - p_left)
                + right_n * 2.0 * p_right * (1.0 - p_right)
            ) / n
            pick = int(np.argmin(weighted))
            if weighted[pick] < best_impurity:
                best_impurity = weighted[pick]
                boundary = boundaries[pick]
                midpoint = (sorted_values[boundary] + sorted_values[boundary + 1]) / 2.0
                best = (int(feature), float(midpoint))
        return best

    # -- inference ---------------------------------------------------------

    def _leaf_for(self, X) -> np.ndarray:
        if self.feature_ is None:
            raise InputError("tree is not fitted")
        X = np.asarray(X, dtype=float)
        node = np.zeros(len(X), dtype=int)
        while True:
            internal = self.feature_[node] >= 0
            if not internal.any():
                return node
            rows = np.flatnonzero(internal)
            at = node[rows]
            go_left = X[rows, self.feature_[at]] <= self.threshold_[at]
            node[rows] = np.where(go_left, self.left_[at], self.right_[at])

    def score(self, X) -> np.ndarray:
        """Positive-class fraction at each sample's leaf."""
        leaves = self._leaf_for(X)
        pos = self.pos_[leaves].astype(float)
        neg = self.neg_[leaves].astype(float)
        return pos / (pos + neg)

    def predict(self, X) -> np.ndarray:
        return (self.score(X) >= 0.5).astype(int)

    @property
    def node_count(self) -> int:
        return 0 if self.feature_ is None else len(self.feature_)
