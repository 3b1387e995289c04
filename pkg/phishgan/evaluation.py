"""Evaluation of a trained model on labelled test URLs.

Three measurements are taken:

- classification of the real test URLs, malicious being the positive class;
- detection of adversarial URLs on a mix of the real test URLs and one
  generated rewrite of each, adversarial being the positive class;
- similarity of every generated rewrite to the URL it was generated from.
"""

from __future__ import annotations

from collections.abc import Sequence

import dataclasses
import logging
import time

import numpy as np

from phishgan.autodiff.tensor import no_grad
from phishgan.errors import DataError
from phishgan.metrics.classification import ClassificationReport, classification_report
from phishgan.metrics.roc import RocCurve, roc_auc
from phishgan.metrics.similarity import SimilarityReport, similarity_report
from phishgan.networks.discriminator import Detection, Detections, detect, detect_batch
from phishgan.networks.generator import generate_batch
from phishgan.networks.model import GanModel
from phishgan.urls.codec import encode_url, encode_urls, one_hot
from phishgan.urls.dataset import UrlRecord, labels_of

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class Evaluation:
    classification: ClassificationReport
    classification_auc: float
    classification_roc: RocCurve
    adversarial: ClassificationReport
    adversarial_auc: float
    adversarial_roc: RocCurve
    similarity: SimilarityReport
    mean_real_score: float
    mean_generated_score: float
    real_count: int
    mixed_count: int


def generate_rewrites(
    model: GanModel, matrices: np.ndarray, labels: np.ndarray, seed: int = 0, batch_size: int = 256
) -> np.ndarray:
    """One generated (200, 67) matrix per input, conditioned on its own label."""
    rng = np.random.default_rng(seed)
    outputs = []
    with no_grad():
        for start in range(0, len(matrices), batch_size):
            out = generate_batch(
                model.generator,
                matrices[start : start + batch_size],
                labels[start : start + batch_size],
                rng,
                config=model.config,
            )
            outputs.append(out.data.transpose(0, 2, 1))
    return np.concatenate(outputs)


def evaluate(model: GanModel, records: Sequence[UrlRecord], seed: int = 0) -> Evaluation:
    """Measure `model` on `records`.

    Raises:
        DataError: If `records` does not hold both classes.
    """
    labels = labels_of(records)
    if len(np.unique(labels)) < 2:
        msg = "the test set must contain both benign and malicious URLs"
        raise DataError(msg)

    real = one_hot(encode_urls(record.url for record in records))
    real_detections = detect_batch(model.discriminator, real)
    classification = classification_report(real_detections.predicted_classes, labels)
    classification_roc, classification_auc = roc_auc(real_detections.class_probs[:, 1], labels)

    generated = generate_rewrites(model, real, labels, seed)
    generated_detections = detect_batch(model.discriminator, generated)
    similarity = similarity_report(list(real), list(generated))

    # Mixed set: real URLs are negatives, generated rewrites are positives.
    adv_scores = np.concatenate([real_detections.adv_scores, generated_detections.adv_scores])
    is_adversarial = np.concatenate([np.zeros(len(real), int), np.ones(len(generated), int)])
    adversarial = classification_report((adv_scores < 0).astype(int), is_adversarial)
    adversarial_roc, adversarial_auc = roc_auc(-adv_scores, is_adversarial)

    log.info("Evaluated %d real and %d mixed URLs", len(real), len(adv_scores))
    return Evaluation(
        classification=classification,
        classification_auc=classification_auc,
        classification_roc=classification_roc,
        adversarial=adversarial,
        adversarial_auc=adversarial_auc,
        adversarial_roc=adversarial_roc,
        similarity=similarity,
        mean_real_score=float(real_detections.adv_scores.mean()),
        mean_generated_score=float(generated_detections.adv_scores.mean()),
        real_count=len(real),
        mixed_count=len(adv_scores),
    )


@dataclasses.dataclass(frozen=True)
class TimedDetection:
    url: str
    detection: Detection
    seconds: float


def timed_detections(model: GanModel, urls: Sequence[str]) -> tuple[list[TimedDetection], float]:
    """Detect every URL on its own, timing each call.

    Returns:
        The verdicts in input order and the throughput in URLs per second.
    """
    results = []
    for url in urls:
        matrix = encode_url(url)
        start = time.perf_counter()
        detection = detect(model.discriminator, matrix)
        results.append(TimedDetection(url, detection, time.perf_counter() - start))
    total = sum(result.seconds for result in results)
    return results, (len(results) / total if total > 0 else float("inf"))


def batch_throughput(model: GanModel, urls: Sequence[str]) -> tuple[Detections, float]:
    """Detect all URLs in batches; returns the verdicts and URLs per second."""
    matrices = one_hot(encode_urls(urls))
    start = time.perf_counter()
    detections = detect_batch(model.discriminator, matrices)
    elapsed = time.perf_counter() - start
    return detections, (len(urls) / elapsed if elapsed > 0 else float("inf"))
