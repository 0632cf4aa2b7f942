"""Model persistence: a tagged container with per-algorithm payloads.

Files start with a text header line, "iotnames-model <algorithm> <version>",
followed by an npz archive of the model's arrays and hyperparameters.
Arrays round-trip bit-exactly, so a loaded model reproduces predictions
exactly.
"""

import io
from pathlib import Path

import numpy as np

from ..errors import InputError
from ..seeds import canonical_seed
from .bayes import NaiveBayes
from .forest import RandomForest
from .linear import LogisticRegression
from .neighbors import KNearestNeighbors
from .svm import LinearSVM
from .tree import DecisionTree

_HEADER_PREFIX = b"iotnames-model "
_FORMAT_VERSION = 1
_NONE = -1  # sentinel for optional integer hyperparameters


def _require_fitted(condition: bool, algorithm: str):
    if not condition:
        raise InputError(f"cannot save an unfitted {algorithm} model")


def _nb_pack(model: NaiveBayes) -> dict:
    _require_fitted(model.means_ is not None, "nb")
    return {
        "var_floor_scale": np.float64(model.var_floor_scale),
        "log_priors": model.log_priors_,
        "means": model.means_,
        "vars": model.vars_,
    }


def _nb_unpack(data) -> NaiveBayes:
    model = NaiveBayes(var_floor_scale=float(data["var_floor_scale"]))
    model.classes_ = np.array([0, 1])
    model.log_priors_ = data["log_priors"]
    model.means_ = data["means"]
    model.vars_ = data["vars"]
    return model


def _lr_pack(model: LogisticRegression) -> dict:
    _require_fitted(model.weights_ is not None, "lr")
    return {
        "l2": np.float64(model.l2),
        "max_iters": np.int64(model.max_iters),
        "tolerance": np.float64(model.tolerance),
        "weights": model.weights_,
        "bias": np.float64(model.bias_),
    }


def _lr_unpack(data) -> LogisticRegression:
    model = LogisticRegression(
        l2=float(data["l2"]),
        max_iters=int(data["max_iters"]),
        tolerance=float(data["tolerance"]),
    )
    model.weights_ = data["weights"]
    model.bias_ = float(data["bias"])
    return model


def _knn_pack(model: KNearestNeighbors) -> dict:
    _require_fitted(model.X_ is not None, "knn")
    return {"k": np.int64(model.k), "X": model.X_, "y": model.y_}


def _knn_unpack(data) -> KNearestNeighbors:
    model = KNearestNeighbors(k=int(data["k"]))
    model.X_ = data["X"]
    model.y_ = data["y"].astype(int)
    return model


def _svm_pack(model: LinearSVM) -> dict:
    _require_fitted(model.weights_ is not None, "svm")
    return {
        "l2": np.float64(model.l2),
        "epochs": np.int64(model.epochs),
        "seed": np.uint64(canonical_seed(model.seed)),
        "weights": model.weights_,
        "bias": np.float64(model.bias_),
    }


def _svm_unpack(data) -> LinearSVM:
    model = LinearSVM(l2=float(data["l2"]), epochs=int(data["epochs"]), seed=int(data["seed"]))
    model.weights_ = data["weights"]
    model.bias_ = float(data["bias"])
    return model


def _tree_arrays(tree: DecisionTree) -> dict:
    return {
        "feature": tree.feature_,
        "threshold": tree.threshold_,
        "left": tree.left_,
        "right": tree.right_,
        "pos": tree.pos_,
        "neg": tree.neg_,
    }


def _tree_restore(tree: DecisionTree, data, prefix="") -> DecisionTree:
    tree.feature_ = data[prefix + "feature"].astype(int)
    tree.threshold_ = data[prefix + "threshold"]
    tree.left_ = data[prefix + "left"].astype(int)
    tree.right_ = data[prefix + "right"].astype(int)
    tree.pos_ = data[prefix + "pos"].astype(int)
    tree.neg_ = data[prefix + "neg"].astype(int)
    return tree


def _dt_pack(model: DecisionTree) -> dict:
    _require_fitted(model.feature_ is not None, "dt")
    out = {
        "max_depth": np.int64(_NONE if model.max_depth is None else model.max_depth),
        "min_samples_split": np.int64(model.min_samples_split),
        "features_per_split": np.int64(
            _NONE if model.features_per_split is None else model.features_per_split
        ),
        "seed": np.uint64(canonical_seed(model.seed)),
    }
    out.update(_tree_arrays(model))
    return out


def _dt_unpack(data) -> DecisionTree:
    max_depth = int(data["max_depth"])
    per_split = int(data["features_per_split"])
    model = DecisionTree(
        max_depth=None if max_depth == _NONE else max_depth,
        min_samples_split=int(data["min_samples_split"]),
        features_per_split=None if per_split == _NONE else per_split,
        seed=int(data["seed"]),
    )
    return _tree_restore(model, data)


def _rf_pack(model: RandomForest) -> dict:
    _require_fitted(bool(model.trees_), "rf")
    out = {
        "trees": np.int64(model.trees),
        "features_per_split": np.int64(
            _NONE if model.features_per_split is None else model.features_per_split
        ),
        "max_depth": np.int64(_NONE if model.max_depth is None else model.max_depth),
        "min_samples_split": np.int64(model.min_samples_split),
        "bootstrap": np.int64(int(model.bootstrap)),
        "seed": np.uint64(canonical_seed(model.seed)),
        "offsets": np.cumsum([0] + [tree.node_count for tree in model.trees_]),
    }
    for key in ("feature", "threshold", "left", "right", "pos", "neg"):
        out[key] = np.concatenate([_tree_arrays(tree)[key] for tree in model.trees_])
    return out


def _rf_unpack(data) -> RandomForest:
    per_split = int(data["features_per_split"])
    max_depth = int(data["max_depth"])
    model = RandomForest(
        trees=int(data["trees"]),
        features_per_split=None if per_split == _NONE else per_split,
        max_depth=None if max_depth == _NONE else max_depth,
        min_samples_split=int(data["min_samples_split"]),
        bootstrap=bool(int(data["bootstrap"])),
        seed=int(data["seed"]),
    )
    offsets = data["offsets"].astype(int)
    for start, end in zip(offsets[:-1], offsets[1:]):
        tree = DecisionTree(
            max_depth=model.max_depth,
            min_samples_split=model.min_samples_split,
            features_per_split=model.features_per_split,
        )
        sliced = {
            key: data[key][start:end]
            for key in ("feature", "threshold", "left", "right", "pos", "neg")
        }
        model.trees_.append(_tree_restore(tree, sliced))
    return model


_CODECS = {
    "nb": (NaiveBayes, _nb_pack, _nb_unpack),
    "lr": (LogisticRegression, _lr_pack, _lr_unpack),
    "knn": (KNearestNeighbors, _knn_pack, _knn_unpack),
    "svm": (LinearSVM, _svm_pack, _svm_unpack),
    "dt": (DecisionTree, _dt_pack, _dt_unpack),
    "rf": (RandomForest, _rf_pack, _rf_unpack),
}


def algorithm_of(model) -> str:
    for name, (cls, _, _) in _CODECS.items():
        if type(model) is cls:
            return name
    raise InputError(f"unknown model type {type(model).__name__}")


def save_model(model, path) -> None:
    name = algorithm_of(model)
    _, pack, _ = _CODECS[name]
    buffer = io.BytesIO()
    np.savez(buffer, **pack(model))
    header = _HEADER_PREFIX + f"{name} {_FORMAT_VERSION}\n".encode("ascii")
    Path(path).write_bytes(header + buffer.getvalue())


def load_model(path):
    path = Path(path)
    if not path.is_file():
        raise InputError(f"model file not found: {path}")
    blob = path.read_bytes()
    newline = blob.find(b"\n")
    if newline < 0 or not blob.startswith(_HEADER_PREFIX):
        raise InputError(f"{path}: not a model container")
    fields = blob[len(_HEADER_PREFIX):newline].decode("ascii", "replace").split()
    if len(fields) != 2 or fields[0] not in _CODECS:
        raise InputError(f"{path}: unrecognized model header")
    if int(fields[1]) != _FORMAT_VERSION:
        raise InputError(f"{path}: unsupported container version {fields[1]}")
    data = np.load(io.BytesIO(blob[newline + 1:]), allow_pickle=False)
    _, _, unpack = _CODECS[fields[0]]
    return unpack(data)
