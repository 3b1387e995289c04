"""Binary classification metrics from a confusion matrix."""

from __future__ import annotations

import dataclasses

import numpy as np
from sklearn.metrics import confusion_matrix


@dataclasses.dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_predictions(cls, predictions, labels, positive: int = 1) -> ConfusionCounts:
        predictions = np.asarray(predictions).astype(bool) == bool(positive)
        labels = np.asarray(labels).astype(bool) == bool(positive)
        tn, fp, fn, tp = confusion_matrix(labels, predictions, labels=[False, True]).ravel()
        return cls(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))


@dataclasses.dataclass(frozen=True)
class ClassificationReport:
    """Accuracy, sensitivity, precision, specificity and F1.

    A ratio whose denominator is zero is reported as 0 and its name is listed
    in `undefined`.
    """

    counts: ConfusionCounts
    accuracy: float
    sensitivity: float
    precision: float
    specificity: float
    f1: float
    undefined: frozenset[str] = frozenset()

    def as_dict(self) -> dict[str, float]:
        return {
            "ACC": self.accuracy,
            "Sensitivity": self.sensitivity,
            "Precision": self.precision,
            "Specificity": self.specificity,
            "F1": self.f1,
        }


def _ratio(numerator: float, denominator: float, name: str, undefined: set[str]) -> float:
    if denominator == 0:
        undefined.add(name)
        return 0.0
    return numerator / denominator


def report_from_counts(counts: ConfusionCounts) -> ClassificationReport:
    """Compute all metrics from confusion counts.

    Raises:
        ValueError: If the counts are all zero.
    """
    if counts.total == 0:
        msg = "cannot report on zero samples"
        raise ValueError(msg)
    undefined: set[str] = set()
    sensitivity = _ratio(counts.tp, counts.tp + counts.fn, "sensitivity", undefined)
    precision = _ratio(counts.tp, counts.tp + counts.fp, "precision", undefined)
    specificity = _ratio(counts.tn, counts.tn + counts.fp, "specificity", undefined)
    f1 = _ratio(2 * precision * sensitivity, precision + sensitivity, "f1", undefined)
    return ClassificationReport(
        counts=counts,
        accuracy=(counts.tp + counts.tn) / counts.total,
        sensitivity=sensitivity,
        precision=precision,
        specificity=specificity,
        f1=f1,
        undefined=frozenset(undefined),
    )


def classification_report(predictions, labels, positive: int = 1) -> ClassificationReport:
    """Metrics of binary `predictions` against `labels`.

    Raises:
        ValueError: If the inputs are empty or differ in length.
    """
    predictions = np.asarray(predictions).reshape(-1)
    labels = np.asarray(labels).reshape(-1)
    if len(predictions) != len(labels):
        msg = f"{len(predictions)} predictions for {len(labels)} labels"
        raise ValueError(msg)
    if not len(labels):
        msg = "classification report needs at least one sample"
        raise ValueError(msg)
    return report_from_counts(ConfusionCounts.from_predictions(predictions, labels, positive))
