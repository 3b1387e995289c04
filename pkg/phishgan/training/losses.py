"""Least-squares adversarial, class and reconstruction losses.

The adversarial terms push discriminator scores towards +1 for real URLs and
-1 for generated ones; the generator is rewarded when its output scores +1.
Every function accepts tensors or plain arrays and returns a scalar tensor, so
the same code serves training and the empirical utilities of the games.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from phishgan.autodiff.tensor import Tensor, as_tensor
from phishgan.errors import ShapeError
from phishgan.settings import LossWeights

REAL_TARGET = 1.0
FAKE_TARGET = -1.0
GENERATOR_TARGET = 1.0

LOG_FLOOR = 1e-12
ROW_SUM_TOLERANCE = 1e-6


def _scores(scores, what: str) -> Tensor:
    scores = as_tensor(scores)
    if scores.size == 0:
        msg = f"{what} batch is empty"
        raise ValueError(msg)
    return scores.reshape(-1)


def adv_loss_d(real_scores, fake_scores) -> Tensor:
    """Discriminator loss: mean (s_real - 1)^2 plus mean (s_fake + 1)^2.

    Raises:
        ValueError: If a batch is empty or the batches differ in size.
    """
    real = _scores(real_scores, "real")
    fake = _scores(fake_scores, "fake")
    if real.size != fake.size:
        msg = f"real and fake batches differ in size: {real.size} != {fake.size}"
        raise ValueError(msg)
    return (real - REAL_TARGET).square().mean() + (fake - FAKE_TARGET).square().mean()


def adv_loss_g(fake_scores) -> Tensor:
    """Generator loss: mean (s_fake - 1)^2."""
    fake = _scores(fake_scores, "fake")
    return (fake - GENERATOR_TARGET).square().mean()


def class_loss(class_probs, labels) -> Tensor:
    """Categorical cross-entropy of (n, 2) probabilities against class labels.

    Raises:
        ValueError: If the batch is empty or a row does not sum to 1.
    """
    probs = as_tensor(class_probs)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if probs.size == 0 or len(labels) == 0:
        msg = "class batch is empty"
        raise ValueError(msg)
    if probs.ndim != 2 or probs.shape[0] != len(labels):
        raise ShapeError("class_loss", (len(labels), "classes"), probs.shape)
    sums = probs.data.sum(axis=1)
    if np.any(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE):
        row = int(np.argmax(np.abs(sums - 1.0)))
        msg = f"class probabilities of row {row} sum to {sums[row]!r}, not 1"
        raise ValueError(msg)
    picked = probs[np.arange(len(labels)), labels]
    return -picked.log(LOG_FLOOR).mean()


def rec_loss(fake, real) -> Tensor:
    """Mean squared difference between generated and real matrices."""
    fake = as_tensor(fake)
    real = as_tensor(real)
    if fake.shape != real.shape:
        raise ShapeError("rec_loss", real.shape, fake.shape)
    if fake.size == 0:
        msg = "reconstruction batch is empty"
        raise ValueError(msg)
    return (fake - real).square().mean()


@dataclasses.dataclass(frozen=True)
class LossComponents:
    """The three loss terms, as floats or scalar tensors."""

    adv: float | Tensor = 0.0
    rec: float | Tensor = 0.0
    cls: float | Tensor = 0.0


def total_loss(components: LossComponents, weights: LossWeights | None = None):
    """Weighted sum lambda_adv * adv + lambda_rec * rec + lambda_class * cls.

    Examples:
        >>> total_loss(LossComponents(1.0, 1.0, 1.0))
        21.0
    """
    weights = weights or LossWeights()
    return (
        weights.lambda_adv * components.adv
        + weights.lambda_rec * components.rec
        + weights.lambda_class * components.cls
    )
