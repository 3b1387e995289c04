"""A generator and discriminator trained together."""

from __future__ import annotations

import dataclasses

from phishgan.networks.discriminator import DiscriminatorNet, build_discriminator
from phishgan.networks.generator import GeneratorNet, build_generator
from phishgan.settings import NetworkConfig


@dataclasses.dataclass
class GanModel:
    """Paired networks, the seed they were initialized from and their settings.

    `metadata` holds plain values describing how the pair was obtained (fold,
    validation accuracy, epochs); it is written into checkpoint headers.
    """

    generator: GeneratorNet
    discriminator: DiscriminatorNet
    seed: int = 0
    config: NetworkConfig = dataclasses.field(default_factory=NetworkConfig)
    metadata: dict = dataclasses.field(default_factory=dict)

    def parameter_counts(self) -> dict[str, int]:
        generator = self.generator.parameter_count()
        discriminator = self.discriminator.parameter_count()
        return {
            "generator": generator,
            "discriminator": discriminator,
            "total": generator + discriminator,
        }


def build_model(seed: int = 0, config: NetworkConfig | None = None) -> GanModel:
    """Initialize both networks from `seed`.

    The discriminator draws its weights from `seed + 1` so the two networks
    never share a random stream.
    """
    config = config or NetworkConfig()
    return GanModel(
        generator=build_generator(seed, config),
        discriminator=build_discriminator(seed + 1, config),
        seed=seed,
        config=config,
    )
