"""Receiver operating characteristic curves."""

from __future__ import annotations

import dataclasses
import os

import numpy as np
import pandas as pd
from sklearn.metrics import auc, roc_curve


@dataclasses.dataclass(frozen=True)
class RocCurve:
    """Points of the curve by decreasing threshold, from (0, 0) to (1, 1).

    The first threshold is +inf: no sample is called positive.
    """

    thresholds: np.ndarray
    fpr: np.ndarray
    tpr: np.ndarray

    def __len__(self) -> int:
        return len(self.thresholds)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"threshold": self.thresholds, "fpr": self.fpr, "tpr": self.tpr})

    def to_csv(self, path: str | os.PathLike) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")


def roc_auc(scores, labels) -> tuple[RocCurve, float]:
    """ROC curve over every distinct score and its trapezoidal area.

    Higher scores mean "more likely positive" (label 1).

    Raises:
        ValueError: If only one class is present or the inputs differ in length.
    """
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels).reshape(-1).astype(int)
    if len(scores) != len(labels):
        msg = f"{len(scores)} scores for {len(labels)} labels"
        raise ValueError(msg)
    if len(np.unique(labels)) != 2:
        msg = "ROC analysis needs both positive and negative samples"
        raise ValueError(msg)
    fpr, tpr, thresholds = roc_curve(labels, scores, drop_intermediate=False)
    return RocCurve(thresholds=thresholds, fpr=fpr, tpr=tpr), float(auc(fpr, tpr))
