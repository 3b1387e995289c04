"""Empirical utilities of the training game, measured on a batch."""

from __future__ import annotations

import dataclasses

import numpy as np

from phishgan.autodiff.tensor import concat, no_grad
from phishgan.networks.discriminator import DiscriminatorNet, channels_first
from phishgan.networks.generator import GeneratorNet, generate_batch
from phishgan.settings import LossWeights, NetworkConfig
from phishgan.training.losses import (
    LossComponents,
    adv_loss_d,
    class_loss,
    rec_loss,
    total_loss,
)


@dataclasses.dataclass(frozen=True)
class UtilityReport:
    u_adv: float
    u_class: float
    u_rec: float
    u_total: float
    weights: LossWeights

    @classmethod
    def from_components(
        cls, u_adv: float, u_class: float, u_rec: float, weights: LossWeights | None = None
    ) -> UtilityReport:
        weights = weights or LossWeights()
        return cls(
            u_adv=u_adv,
            u_class=u_class,
            u_rec=u_rec,
            u_total=float(total_loss(LossComponents(adv=u_adv, rec=u_rec, cls=u_class), weights)),
            weights=weights,
        )


def empirical_utilities(
    g: GeneratorNet,
    d: DiscriminatorNet,
    matrices: np.ndarray,
    labels: np.ndarray,
    weights: LossWeights | None = None,
    seed: int = 0,
    networks: NetworkConfig | None = None,
) -> UtilityReport:
    """Batch means of the utility terms, both networks in inference mode.

    The generated batch is conditioned on the batch's own labels. Each term is
    computed with the training loss of the same name, so the values agree
    with the losses on the same real and generated batch.

    Raises:
        ValueError: If the batch is empty.
    """
    matrices = np.asarray(matrices, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if len(matrices) == 0:
        msg = "utilities need a nonempty batch"
        raise ValueError(msg)
    rng = np.random.default_rng(seed)
    with no_grad():
        fake = generate_batch(g, matrices, labels, rng, config=networks)
        real = channels_first(matrices)
        real_probs, real_scores = d.forward(real)
        fake_probs, fake_scores = d.forward(fake)
        u_adv = adv_loss_d(real_scores, fake_scores).item()
        both_probs = concat([real_probs, fake_probs], axis=0)
        u_class = class_loss(both_probs, np.concatenate([labels, labels])).item()
        u_rec = rec_loss(fake, real).item()
    return UtilityReport.from_components(u_adv, u_class, u_rec, weights)
