"""The adversarial training loop.

Every iteration works on one mini-batch of real URLs:

1. `max_d_iter` discriminator updates on the real batch and on a freshly
   generated batch conditioned on the real labels.
2. One generator update on the reconstruction and adversarial terms, with
   the discriminator frozen: it runs in inference mode and its parameters
   are left out of the update.
3. One joint fine-tuning update of the discriminator on the real batch and
   a new generated batch.
4. One row in the training log.

The discriminator's class head sees generated URLs too, with the label the
generator was conditioned on as target.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

import dataclasses
import logging
import math
import os
import time

import numpy as np
import pandas as pd

from phishgan.autodiff.adam import AdamState, adam_step
from phishgan.autodiff.tensor import Tensor, backward, concat, no_grad
from phishgan.errors import NumericAbort
from phishgan.networks.checkpoint import save_checkpoint
from phishgan.networks.discriminator import DiscriminatorNet, channels_first
from phishgan.networks.generator import GeneratorNet, generate_batch
from phishgan.networks.model import GanModel
from phishgan.settings import LossWeights, NetworkConfig, TrainConfig
from phishgan.training.losses import (
    LossComponents,
    adv_loss_d,
    adv_loss_g,
    class_loss,
    rec_loss,
    total_loss,
)
from phishgan.urls.codec import encode_urls, one_hot
from phishgan.urls.dataset import UrlRecord, labels_of

log = logging.getLogger(__name__)

LOG_COLUMNS = ("iter", "epoch", "l_adv_d", "l_class_d", "l_rec_g", "total", "seconds")


@dataclasses.dataclass(frozen=True)
class TrainRecord:
    iter: int
    epoch: int
    l_adv_d: float
    l_class_d: float
    l_rec_g: float
    total: float
    seconds: float


@dataclasses.dataclass
class TrainLog:
    """One record per training iteration, in order."""

    records: list[TrainRecord] = dataclasses.field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: TrainRecord) -> None:
        if self.records and record.iter <= self.records[-1].iter:
            msg = f"iteration {record.iter} logged after {self.records[-1].iter}"
            raise ValueError(msg)
        self.records.append(record)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [dataclasses.astuple(record) for record in self.records],
            columns=list(LOG_COLUMNS),
        )

    def to_csv(self, path: str | os.PathLike) -> None:
        self.to_frame().to_csv(path, index=False, float_format="%.17g")

    def epoch_means(self) -> pd.DataFrame:
        return self.to_frame().groupby("epoch")[["l_adv_d", "l_class_d", "l_rec_g", "total"]].mean()


@dataclasses.dataclass
class TrainResult:
    generator: GeneratorNet
    discriminator: DiscriminatorNet
    log: TrainLog


def _require_finite(iteration: int, **terms: Tensor | float) -> None:
    """Raise `NumericAbort` naming the first non-finite loss term."""
    for term, value in terms.items():
        number = value.item() if isinstance(value, Tensor) else float(value)
        if not math.isfinite(number):
            raise NumericAbort(term, iteration, number)


@dataclasses.dataclass
class Trainer:
    """State shared by the steps of one training run.

    Attributes:
        g: The generator, updated in place.
        d: The discriminator, updated in place.
        config: Schedule and optimizer settings.
        weights: Loss weights.
        networks: Noise smoothing settings for the generator input.
        rng: Source of batch order and generator noise.
    """

    g: GeneratorNet
    d: DiscriminatorNet
    config: TrainConfig = dataclasses.field(default_factory=TrainConfig)
    weights: LossWeights = dataclasses.field(default_factory=LossWeights)
    networks: NetworkConfig = dataclasses.field(default_factory=NetworkConfig)
    rng: np.random.Generator | None = None
    g_state: AdamState | None = None
    d_state: AdamState | None = None

    def __post_init__(self):
        if self.rng is None:
            self.rng = np.random.default_rng(self.config.seed)
        if self.g_state is None:
            self.g_state = AdamState.from_config(self.config.generator_optimizer)
        if self.d_state is None:
            self.d_state = AdamState.from_config(self.config.discriminator_optimizer)

    def _fake(self, x: np.ndarray, y: np.ndarray) -> Tensor:
        with no_grad():
            out = generate_batch(self.g, x, y, self.rng, training=True, config=self.networks)
        return Tensor(out.data)

    def discriminator_losses(
        self, x: np.ndarray, y: np.ndarray, fake: Tensor
    ) -> tuple[Tensor, Tensor]:
        """Adversarial and class losses of the discriminator on a real and a fake batch."""
        real_probs, real_scores = self.d.forward(channels_first(x), training=True)
        fake_probs, fake_scores = self.d.forward(fake, training=True)
        l_adv = adv_loss_d(real_scores, fake_scores)
        l_class = class_loss(concat([real_probs, fake_probs], axis=0), np.concatenate([y, y]))
        return l_adv, l_class

    def discriminator_step(
        self, x: np.ndarray, y: np.ndarray, iteration: int = 0
    ) -> tuple[float, float]:
        """One discriminator update; returns its adversarial and class losses."""
        l_adv, l_class = self.discriminator_losses(x, y, self._fake(x, y))
        _require_finite(iteration, l_adv_d=l_adv, l_class_d=l_class)
        loss = total_loss(LossComponents(adv=l_adv, cls=l_class), self.weights)
        grads = backward(loss, self.d.params)
        adam_step(self.d.params, grads, self.d_state)
        return l_adv.item(), l_class.item()

    def generator_step(
        self, x: np.ndarray, y: np.ndarray, iteration: int = 0
    ) -> tuple[float, float]:
        """One generator update against the frozen discriminator.

        Returns:
            The reconstruction and generator adversarial losses.
        """
        fake = generate_batch(self.g, x, y, self.rng, training=True, config=self.networks)
        class_probs, scores = self.d.forward(fake, training=False)
        l_rec = rec_loss(fake, channels_first(x))
        l_adv = adv_loss_g(scores)
        l_class = class_loss(class_probs, y) if self.config.generator_class_loss else 0.0
        _require_finite(iteration, l_rec_g=l_rec, l_adv_g=l_adv, l_class_g=l_class)
        loss = total_loss(LossComponents(adv=l_adv, rec=l_rec, cls=l_class), self.weights)
        grads = backward(loss, self.g.params)
        adam_step(self.g.params, grads, self.g_state)
        return l_rec.item(), l_adv.item()

    def iteration(self, iteration: int, x: np.ndarray, y: np.ndarray) -> LossComponents:
        for _ in range(self.config.max_d_iter):
            self.discriminator_step(x, y, iteration)
        l_rec, _ = self.generator_step(x, y, iteration)
        l_adv, l_class = self.discriminator_step(x, y, iteration)
        return LossComponents(adv=l_adv, rec=l_rec, cls=l_class)

    def batches(self, n: int) -> list[np.ndarray]:
        order = self.rng.permutation(n)
        size = self.config.batch_size
        return [order[start : start + size] for start in range(0, n, size)]

    def checkpoint(self, iteration: int) -> None:
        directory = self.config.checkpoint_dir
        if not self.config.checkpoint_every or directory is None:
            return
        if iteration % self.config.checkpoint_every:
            return
        os.makedirs(directory, exist_ok=True)
        model = GanModel(self.g, self.d, seed=self.config.seed, config=self.networks)
        model.metadata["iteration"] = iteration
        save_checkpoint(model, os.path.join(directory, f"iter-{iteration:06d}.ckpt"))


def train(
    g: GeneratorNet,
    d: DiscriminatorNet,
    records: Sequence[UrlRecord],
    config: TrainConfig | None = None,
    weights: LossWeights | None = None,
    networks: NetworkConfig | None = None,
    on_epoch: Callable[[int, TrainLog], None] | None = None,
) -> TrainResult:
    """Train `g` and `d` in place on labelled URLs.

    Args:
        g: Generator.
        d: Discriminator.
        records: Training URLs; both classes must be present.
        config: Schedule, optimizers, seed and checkpointing.
        weights: Loss weights.
        networks: Noise smoothing settings.
        on_epoch: Called after every epoch with its index and the log so far.

    Returns:
        The trained networks and the training log.

    Raises:
        ValueError: If `records` is empty or holds a single class.
        NumericAbort: If a loss term becomes NaN or infinite.
    """
    if not records:
        msg = "cannot train on an empty dataset"
        raise ValueError(msg)
    labels = labels_of(records)
    if len(np.unique(labels)) < 2:
        msg = "training needs both benign and malicious URLs"
        raise ValueError(msg)

    trainer = Trainer(
        g,
        d,
        config or TrainConfig(),
        weights or LossWeights(),
        networks or NetworkConfig(),
    )
    indices = encode_urls(record.url for record in records)
    train_log = TrainLog()
    start = time.perf_counter()
    iteration = 0
    for epoch in range(trainer.config.epochs):
        for batch in trainer.batches(len(records)):
            iteration += 1
            x = one_hot(indices[batch])
            y = labels[batch]
            components = trainer.iteration(iteration, x, y)
            train_log.append(
                TrainRecord(
                    iter=iteration,
                    epoch=epoch,
                    l_adv_d=components.adv,
                    l_class_d=components.cls,
                    l_rec_g=components.rec,
                    total=float(total_loss(components, trainer.weights)),
                    seconds=time.perf_counter() - start,
                )
            )
            log.debug(
                "iter %d: l_adv_d=%.6f l_class_d=%.6f l_rec_g=%.6f",
                iteration,
                components.adv,
                components.cls,
                components.rec,
            )
            trainer.checkpoint(iteration)
        means = train_log.epoch_means().loc[epoch]
        log.info(
            "epoch %d/%d: l_adv_d=%.4f l_class_d=%.4f l_rec_g=%.4f total=%.4f",
            epoch + 1,
            trainer.config.epochs,
            means["l_adv_d"],
            means["l_class_d"],
            means["l_rec_g"],
            means["total"],
        )
        if on_epoch is not None:
            on_epoch(epoch, train_log)
    return TrainResult(g, d, train_log)
