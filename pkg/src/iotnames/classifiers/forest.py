"""Random forest of CART trees with bootstrap rows and feature subsampling.

Each tree gets its own deterministic RNG, expanded from the forest seed with
a splitmix64 chain, and draws a bootstrap sample plus floor(sqrt(cols))
candidate features per split (unless configured otherwise).  The forest
score is the fraction of trees voting positive; the usual >= 0.5 threshold
turns that into a prediction.
"""

import numpy as np

from ..errors import InputError
from ..seeds import derive_seed
from .tree import DecisionTree

_TREE_SALT = 0x74726565


class RandomForest:
    def __init__(
        self,
        trees=100,
        features_per_split=None,
        max_depth=None,
        min_samples_split=2,
        bootstrap=True,
        seed=0,
    ):
        if trees < 1:
            raise InputError(f"forest needs at least one tree, got {trees}")
        self.trees = trees
        self.features_per_split = features_per_split
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.bootstrap = bootstrap
        self.seed = seed
        self.trees_: list[DecisionTree] = []

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or len(X) != len(y):
            raise InputError("X must be 2-D and aligned with y")
        if len(y) == 0:
            raise InputError("cannot fit on an empty dataset")
        per_split = self.features_per_split
        if per_split is None:
            per_split = max(1, int(np.floor(np.sqrt(X.shape[1]))))
        self.trees_ = []
        n = len(y)
        for index in range(self.trees):
            rng = np.random.default_rng(derive_seed(self.seed, _TREE_SALT, index))
            rows = rng.integers(0, n, size=n) if self.bootstrap else np.arange(n)
            tree = DecisionTree(
                max_depth=self.max_depth,
                min_samples_split=self.min_samples_split,
                features_per_split=per_split,
            )
            tree.fit(X, y, sample_indices=rows, rng=rng)
            self.trees_.append(tree)
        return self

    def score(self, X) -> np.ndarray:
        """Fraction of trees voting positive for each sample."""
        if not self.trees_:
            raise InputError("forest is not fitted")
        X = np.asarray(X, dtype=float)
        votes = np.zeros(len(X))
        for tree in self.trees_:
            votes += tree.predict(X)
        return votes / len(self.trees_)

    def predict(self, X) -> np.ndarray:
        return (self.score(X) >= 0.5).astype(int)
