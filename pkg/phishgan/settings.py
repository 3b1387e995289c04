"""This file turns the YAML parameter tree into typed settings.

The defaults of every tunable quantity (training schedule, Adam settings, loss
weights, network construction constants and game payoffs) are stored as dated
parameters in the `parameters` folder. They are loaded with the OpenFisca
parameter loader, resolved at an instant, and copied into frozen dataclasses
that the rest of the package consumes.

See https://openfisca.org/doc/coding-the-legislation/legislation_parameters.html
"""

from __future__ import annotations

import dataclasses
import datetime
import functools
import logging

from openfisca_core.parameters import ParameterNode

from phishgan import PARAMETERS_DIR

log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class LossWeights:
    """Weights of the adversarial, reconstruction and class loss terms."""

    lambda_adv: float = 1.0
    lambda_rec: float = 10.0
    lambda_class: float = 10.0

    def __post_init__(self):
        for name in ("lambda_adv", "lambda_rec", "lambda_class"):
            if getattr(self, name) < 0:
                msg = f"{name} must be nonnegative, got {getattr(self, name)}"
                raise ValueError(msg)


@dataclasses.dataclass(frozen=True)
class AdamConfig:
    alpha: float = 0.0002
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon: float = 1e-8


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """Training schedule and optimizer settings for one run."""

    epochs: int = 200
    batch_size: int = 64
    max_d_iter: int = 2
    generator_optimizer: AdamConfig = AdamConfig()
    discriminator_optimizer: AdamConfig = AdamConfig()
    seed: int = 0
    checkpoint_every: int = 0
    checkpoint_dir: str | None = None
    generator_class_loss: bool = False

    def __post_init__(self):
        for name in ("epochs", "batch_size", "max_d_iter"):
            if getattr(self, name) < 1:
                msg = f"{name} must be at least 1, got {getattr(self, name)}"
                raise ValueError(msg)
        if self.checkpoint_every < 0:
            msg = f"checkpoint_every must be nonnegative, got {self.checkpoint_every}"
            raise ValueError(msg)


@dataclasses.dataclass(frozen=True)
class NetworkConfig:
    leaky_relu_slope: float = 0.2
    init_std: float = 0.02
    batchnorm_epsilon: float = 1e-5
    batchnorm_momentum: float = 0.9
    noise_sigma: float = 3.0
    noise_truncate: float = 4.0


@dataclasses.dataclass(frozen=True)
class DeploymentPayoffs:
    """(attacker, defender) payoff pairs of the deployment game leaves."""

    dont_send: tuple[float, float] = (0.0, 0.0)
    send_benign: tuple[float, float] = (3.0, -3.0)
    send_malicious: tuple[float, float] = (1.0, 3.0)


@dataclasses.dataclass(frozen=True)
class Settings:
    weights: LossWeights
    training: TrainConfig
    networks: NetworkConfig
    deployment: DeploymentPayoffs
    folds: int


@functools.cache
def load_parameters() -> ParameterNode:
    """Load the whole parameter tree from the package `parameters` folder."""
    return ParameterNode("", directory_path=PARAMETERS_DIR)


def _adam(node) -> AdamConfig:
    return AdamConfig(
        alpha=float(node.alpha),
        beta1=float(node.beta1),
        beta2=float(node.beta2),
        epsilon=float(node.epsilon),
    )


def _pair(node) -> tuple[float, float]:
    return float(node.attacker), float(node.defender)


def load_settings(instant: str | datetime.date | None = None) -> Settings:
    """Resolve the parameter tree at `instant` (default: today).

    Args:
        instant: Date at which dated parameter values are read. A later-dated
            revision of a default supersedes the earlier one from its date on.

    Returns:
        The resolved settings.
    """
    if instant is None:
        instant = datetime.date.today()
    parameters = load_parameters()(str(instant))
    log.debug("Resolved parameters at %s", instant)

    training = parameters.training
    networks = parameters.networks
    deployment = parameters.games.deployment

    return Settings(
        weights=LossWeights(
            lambda_adv=float(parameters.losses.lambda_adv),
            lambda_rec=float(parameters.losses.lambda_rec),
            lambda_class=float(parameters.losses.lambda_class),
        ),
        training=TrainConfig(
            epochs=int(training.epochs),
            batch_size=int(training.batch_size),
            max_d_iter=int(training.max_d_iter),
            generator_optimizer=_adam(parameters.optimizer.generator),
            discriminator_optimizer=_adam(parameters.optimizer.discriminator),
            checkpoint_every=int(training.checkpoint_every),
            generator_class_loss=bool(training.generator_class_loss),
        ),
        networks=NetworkConfig(
            leaky_relu_slope=float(networks.leaky_relu_slope),
            init_std=float(networks.init_std),
            batchnorm_epsilon=float(networks.batchnorm_epsilon),
            batchnorm_momentum=float(networks.batchnorm_momentum),
            noise_sigma=float(networks.noise_sigma),
            noise_truncate=float(networks.noise_truncate),
        ),
        deployment=DeploymentPayoffs(
            dont_send=_pair(deployment.dont_send),
            send_benign=_pair(deployment.send_benign),
            send_malicious=_pair(deployment.send_malicious),
        ),
        folds=int(training.folds),
    )
