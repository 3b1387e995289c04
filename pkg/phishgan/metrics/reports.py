"""Plain-text result tables.

The column sets follow the three published result tables: generator
similarity, classification of real URLs and detection of adversarial URLs.
"""

from __future__ import annotations

import pandas as pd

from phishgan.metrics.classification import ClassificationReport
from phishgan.metrics.similarity import SimilarityReport

SIMILARITY_COLUMNS = ("MSE", "Structural Similarity", "Normalized RMSE")
CLASSIFICATION_COLUMNS = ("Method", "ACC", "Sensitivity", "Precision", "F1-score", "AUC")
ADVERSARIAL_COLUMNS = ("Method", "ACC", "Sensitivity", "Specificity", "F1-score", "AUC")

METHOD = "phishgan"


def _render(rows: list[dict], columns: tuple[str, ...], digits: int = 4) -> str:
    frame = pd.DataFrame(rows, columns=list(columns))
    return frame.to_string(index=False, float_format=lambda value: f"{value:.{digits}f}")


def similarity_table(report: SimilarityReport) -> str:
    return _render(
        [dict(zip(SIMILARITY_COLUMNS, (report.mse, report.ssim, report.nrmse), strict=True))],
        SIMILARITY_COLUMNS,
        digits=6,
    )


def classification_table(report: ClassificationReport, auc: float, method: str = METHOD) -> str:
    """Classification of real URLs, malicious as the positive class."""
    values = (method, report.accuracy, report.sensitivity, report.precision, report.f1, auc)
    return _render([dict(zip(CLASSIFICATION_COLUMNS, values, strict=True))], CLASSIFICATION_COLUMNS)


def adversarial_table(report: ClassificationReport, auc: float, method: str = METHOD) -> str:
    """Detection of generated URLs, adversarial as the positive class."""
    values = (method, report.accuracy, report.sensitivity, report.specificity, report.f1, auc)
    return _render([dict(zip(ADVERSARIAL_COLUMNS, values, strict=True))], ADVERSARIAL_COLUMNS)


def score_table(real_mean: float, generated_mean: float) -> str:
    """Mean raw adversarial score on real and on generated URLs."""
    return _render(
        [
            {"URLs": "real", "mean adv-score": real_mean},
            {"URLs": "generated", "mean adv-score": generated_mean},
        ],
        ("URLs", "mean adv-score"),
    )
