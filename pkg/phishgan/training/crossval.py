"""Stratified k-fold training and selection of the best fold model."""

from __future__ import annotations

from collections.abc import Sequence

import dataclasses
import logging

import numpy as np

from phishgan.networks.discriminator import detect_batch
from phishgan.networks.model import GanModel, build_model
from phishgan.settings import LossWeights, NetworkConfig, TrainConfig
from phishgan.training.loop import TrainLog, train
from phishgan.urls.codec import encode_urls, one_hot
from phishgan.urls.dataset import FoldPlan, UrlRecord, labels_of, stratified_kfold

log = logging.getLogger(__name__)


@dataclasses.dataclass
class FoldResult:
    fold: int
    train_size: int
    test_size: int
    accuracy: float
    model: GanModel
    log: TrainLog


@dataclasses.dataclass
class CrossValidation:
    plan: FoldPlan
    results: list[FoldResult]

    @property
    def best(self) -> FoldResult:
        """The fold with the highest validation accuracy, the earliest on ties."""
        return max(self.results, key=lambda result: (result.accuracy, -result.fold))


def validation_accuracy(model: GanModel, records: Sequence[UrlRecord]) -> float:
    """Share of `records` whose class the discriminator gets right."""
    matrices = one_hot(encode_urls(record.url for record in records))
    detections = detect_batch(model.discriminator, matrices)
    return float(np.mean(detections.predicted_classes == labels_of(records)))


def cross_validate(
    records: Sequence[UrlRecord],
    config: TrainConfig | None = None,
    weights: LossWeights | None = None,
    networks: NetworkConfig | None = None,
    k: int = 5,
    max_folds: int | None = None,
) -> CrossValidation:
    """Train one model per fold and measure it on the held-out fold.

    Args:
        records: The whole labelled dataset.
        config: Training settings; its seed drives folds, weights and noise.
        weights: Loss weights.
        networks: Network construction settings.
        k: Number of folds.
        max_folds: Train only the first `max_folds` folds.

    Returns:
        The fold plan and one result per trained fold.
    """
    config = config or TrainConfig()
    networks = networks or NetworkConfig()
    plan = stratified_kfold(records, k=k, seed=config.seed)
    folds = range(k if max_folds is None else min(k, max_folds))
    results = []
    for fold in folds:
        train_records = [records[i] for i in plan.train_indices(fold)]
        test_records = [records[i] for i in plan.test_indices(fold)]
        model = build_model(config.seed, networks)
        result = train(
            model.generator,
            model.discriminator,
            train_records,
            config,
            weights,
            networks,
        )
        accuracy = validation_accuracy(model, test_records)
        model.metadata.update(
            {"fold": fold, "folds": k, "validation_accuracy": accuracy, "epochs": config.epochs}
        )
        log.info("fold %d/%d: validation accuracy %.4f", fold + 1, k, accuracy)
        results.append(
            FoldResult(
                fold=fold,
                train_size=len(train_records),
                test_size=len(test_records),
                accuracy=accuracy,
                model=model,
                log=result.log,
            )
        )
    return CrossValidation(plan=plan, results=results)
