"""Evaluation for binary name classifiers.

Implements confusion-matrix metrics, ROC curves with trapezoidal AUC,
stratified k-fold cross-validation, and per-position ablation for
embedded-name feature matrices.

Precision is undefined when nothing was predicted positive, recall when
no positives exist, and F1 when either of those is undefined; undefined
metrics are reported as None rather than coerced to zero.  AUC is likewise
None when the evaluation labels contain only one class.
"""

from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from .classifiers import FeatureMatrix
from .corpus import stratified_fold_indices
from .errors import InputError
from .seeds import derive_seed

_FOLD_SALT = 0x666F6C64


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total

    @property
    def precision(self) -> Optional[float]:
        predicted = self.tp + self.fp
        return None if predicted == 0 else self.tp / predicted

    @property
    def recall(self) -> Optional[float]:
        actual = self.tp + self.fn
        return None if actual == 0 else self.tp / actual

    @property
    def f1(self) -> Optional[float]:
        if self.precision is None or self.recall is None:
            return None
        # Harmonic mean written in counts; exact when tp == 0 too.
        return self.tp / (self.tp + (self.fp + self.fn) / 2.0)


def confusion(y_true, y_pred) -> ConfusionMatrix:
    y_true = np.asarray(y_true, dtype=int)
    y_pred = np.asarray(y_pred, dtype=int)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise InputError("labels and predictions must be equal-length vectors")
    if y_true.size == 0:
        raise InputError("cannot evaluate an empty label vector")
    pos = y_true == 1
    return ConfusionMatrix(
        tp=int((y_pred[pos] == 1).sum()),
        fp=int((y_pred[~pos] == 1).sum()),
        tn=int((y_pred[~pos] == 0).sum()),
        fn=int((y_pred[pos] == 0).sum()),
    )


@dataclass(frozen=True)
class RocCurve:
    """Operating points swept from the highest score downward.

    Starts at (0, 0), ends at (1, 1); tied scores advance in one step.
    """

    fpr: np.ndarray
    tpr: np.ndarray
    auc: float


def roc_curve(y_true, scores) -> RocCurve:
    y_true = np.asarray(y_true, dtype=int)
    scores = np.asarray(scores, dtype=float)
    if y_true.shape != scores.shape or y_true.ndim != 1:
        raise InputError("labels and scores must be equal-length vectors")
    positives = int((y_true == 1).sum())
    negatives = y_true.size - positives
    if positives == 0 or negatives == 0:
        raise InputError("ROC requires both classes in the labels")

    order = np.argsort(-scores, kind="stable")
    ranked = y_true[order]
    # Collapse runs of equal scores: keep the last index of each run.
    boundaries = np.nonzero(np.diff(scores[order]))[0]
    cut = np.concatenate([boundaries, [y_true.size - 1]])
    tpr = np.concatenate([[0.0], np.cumsum(ranked)[cut] / positives])
    fpr = np.concatenate([[0.0], np.cumsum(1 - ranked)[cut] / negatives])
    auc = float(np.trapezoid(tpr, fpr))
    return RocCurve(fpr=fpr, tpr=tpr, auc=auc)


def roc_auc(y_true, scores) -> Optional[float]:
    y_true = np.asarray(y_true, dtype=int)
    if ((y_true == 1).sum() == 0) or ((y_true == 0).sum() == 0):
        return None
    return roc_curve(y_true, scores).auc


@dataclass(frozen=True)
class EvaluationReport:
    confusion: ConfusionMatrix
    auc: Optional[float]

    @property
    def accuracy(self) -> float:
        return self.confusion.accuracy

    @property
    def precision(self) -> Optional[float]:
        return self.confusion.precision

    @property
    def recall(self) -> Optional[float]:
        return self.confusion.recall

    @property
    def f1(self) -> Optional[float]:
        return self.confusion.f1


def evaluate(model, data: FeatureMatrix) -> EvaluationReport:
    """Score a fitted model on held-out rows."""
    matrix = confusion(data.y, model.predict(data.x))
    return EvaluationReport(confusion=matrix, auc=roc_auc(data.y, model.score(data.x)))


@dataclass(frozen=True)
class CrossValidationReport:
    folds: List[EvaluationReport]
    fold_sizes: np.ndarray
    # Score each row received from the one model that held it out.
    oof_scores: np.ndarray

    @property
    def accuracies(self) -> np.ndarray:
        return np.array([fold.accuracy for fold in self.folds])

    @property
    def mean_accuracy(self) -> float:
        return float(self.accuracies.mean())

    @property
    def std_accuracy(self) -> float:
        return float(self.accuracies.std())

    def metric_values(self, name: str) -> list:
        return [getattr(fold, name) for fold in self.folds]

    def mean_metric(self, name: str) -> Optional[float]:
        """Mean over folds; None when the metric was undefined in any fold."""
        values = self.metric_values(name)
        if any(value is None for value in values):
            return None
        return float(np.mean(values))

    def std_metric(self, name: str) -> Optional[float]:
        """Population standard deviation over folds (divisor k)."""
        values = self.metric_values(name)
        if any(value is None for value in values):
            return None
        return float(np.std(values))


def cross_validate(
    make_model: Callable[[], object], data: FeatureMatrix, k: int = 5, seed: int = 0
) -> CrossValidationReport:
    """Stratified k-fold: each fold is the test set once, a fresh model per fold."""
    pairs = stratified_fold_indices(data.y, k, derive_seed(seed, _FOLD_SALT))
    reports = []
    oof_scores = np.empty(len(data))
    for train_idx, test_idx in pairs:
        model = make_model()
        train = data.take(train_idx)
        model.fit(train.x, train.y)
        held_out = data.take(test_idx)
        oof_scores[test_idx] = model.score(held_out.x)
        reports.append(evaluate(model, held_out))
    return CrossValidationReport(
        folds=reports,
        fold_sizes=np.array([len(test) for _, test in pairs]),
        oof_scores=oof_scores,
    )


@dataclass(frozen=True)
class AblationReport:
    """Accuracy cost of hiding each name position from the classifier.

    Position p covers feature columns [p * dim, (p + 1) * dim).  Left-padded
    positions that are padding for every name leave the refit model's inputs
    unchanged, so their drop is ~0; positions carrying the class signal cost
    real accuracy.
    """

    baseline_accuracy: float
    position_accuracies: np.ndarray

    @property
    def drops(self) -> np.ndarray:
        return self.baseline_accuracy - self.position_accuracies

    @property
    def positions(self) -> int:
        return self.position_accuracies.size


def _zero_position(x: np.ndarray, position: int, dim: int) -> np.ndarray:
    masked = x.copy()
    masked[:, position * dim:(position + 1) * dim] = 0.0
    return masked


def ablate(
    make_model: Callable[[], object],
    train: FeatureMatrix,
    test: FeatureMatrix,
    positions: int,
) -> AblationReport:
    """Retrain with one name position zeroed at a time (train and test alike)."""
    cols = train.x.shape[1]
    if test.x.shape[1] != cols:
        raise InputError("train and test column counts differ")
    if positions < 1 or cols % positions != 0:
        raise InputError(f"{cols} columns do not divide into {positions} positions")
    dim = cols // positions

    baseline = make_model()
    baseline.fit(train.x, train.y)
    baseline_acc = confusion(test.y, baseline.predict(test.x)).accuracy

    accuracies = np.empty(positions)
    for p in range(positions):
        model = make_model()
        model.fit(_zero_position(train.x, p, dim), train.y)
        preds = model.predict(_zero_position(test.x, p, dim))
        accuracies[p] = confusion(test.y, preds).accuracy
    return AblationReport(baseline_accuracy=baseline_acc, position_accuracies=accuracies)
