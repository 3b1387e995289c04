"""The class-conditional generator.

The generator reads a real URL matrix, a smoothed noise channel and the
broadcast target label, encodes them with six convolutions (three of them
downsampling) and decodes back to 200 positions with three transposed
convolutions, ending in a 67-channel sigmoid projection.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.ndimage import gaussian_filter1d

from phishgan.autodiff.layers import LayerKind, LayerSpec, forward
from phishgan.autodiff.tensor import Tensor, no_grad
from phishgan.errors import ShapeError
from phishgan.networks.network import Network, conv_block
from phishgan.settings import NetworkConfig
from phishgan.urls.codec import MAX_LENGTH, VOCABULARY_SIZE, UrlMatrix
from phishgan.urls.labels import UrlLabel

ENCODER_FEATURES = (32, 32, 64, 64, 128, 128)
ENCODER_STRIDES = (1, 2, 1, 2, 1, 2)
DECODER_FEATURES = (128, 64, 32)
NOISE_CHANNELS = 1
LABEL_CHANNELS = len(UrlLabel)
INPUT_CHANNELS = VOCABULARY_SIZE + NOISE_CHANNELS + LABEL_CHANNELS


@dataclasses.dataclass(frozen=True)
class ConditionInput:
    """Generator input, channels-first.

    Attributes:
        x: URL matrices, (n, 67, 200).
        zeta: Smoothed uniform noise in [0, 1], (n, 1, 200).
        y: One-hot target label repeated along the positions, (n, 2, 200).
    """

    x: np.ndarray
    zeta: np.ndarray
    y: np.ndarray

    @property
    def batch_size(self) -> int:
        return self.x.shape[0]


def condition_input(
    matrices: np.ndarray,
    labels: np.ndarray,
    rng: np.random.Generator,
    config: NetworkConfig | None = None,
) -> ConditionInput:
    """Assemble the generator input for a batch.

    Args:
        matrices: (n, 200, 67) URL matrices.
        labels: (n,) target labels.
        rng: Source of the noise.
        config: Smoothing settings.
    """
    config = config or NetworkConfig()
    matrices = np.asarray(matrices, dtype=np.float64)
    if matrices.ndim != 3 or matrices.shape[1:] != (MAX_LENGTH, VOCABULARY_SIZE):
        raise ShapeError("generator input", ("batch", MAX_LENGTH, VOCABULARY_SIZE), matrices.shape)
    batch = matrices.shape[0]
    noise = rng.uniform(0.0, 1.0, size=(batch, MAX_LENGTH))
    zeta = gaussian_filter1d(
        noise, sigma=config.noise_sigma, axis=1, truncate=config.noise_truncate
    )
    y = np.eye(LABEL_CHANNELS)[np.asarray(labels, dtype=np.int64)]
    return ConditionInput(
        x=matrices.transpose(0, 2, 1),
        zeta=zeta[:, None, :],
        y=np.repeat(y[:, :, None], MAX_LENGTH, axis=2),
    )


class GeneratorNet(Network):
    CONCAT = LayerSpec(LayerKind.CONCAT, name="condition")

    def forward(self, condition: ConditionInput, training: bool = False) -> Tensor:
        """(n, 67, 200) sigmoid output for the given condition."""
        x = forward(
            self.CONCAT,
            [Tensor(condition.x), Tensor(condition.zeta), Tensor(condition.y)],
        )
        if x.shape[1] != INPUT_CHANNELS:
            raise ShapeError("generator condition", ("batch", INPUT_CHANNELS, MAX_LENGTH), x.shape)
        return self.apply((layer.name for layer in self.layers), x, training)

    def length_chain(self, length: int = MAX_LENGTH) -> list[int]:
        """Sequence length after the input and after every (transposed) convolution."""
        chain = [length]
        for layer in self.layers:
            if layer.kind in {LayerKind.CONV1D, LayerKind.CONV1D_TRANSPOSED}:
                chain.append(layer.output_length(chain[-1]))
        return chain


def generator_layers(config: NetworkConfig | None = None) -> list[LayerSpec]:
    config = config or NetworkConfig()
    block = {
        "negative_slope": config.leaky_relu_slope,
        "epsilon": config.batchnorm_epsilon,
        "momentum": config.batchnorm_momentum,
    }
    layers: list[LayerSpec] = []
    features = INPUT_CHANNELS
    for i, (out, stride) in enumerate(zip(ENCODER_FEATURES, ENCODER_STRIDES, strict=True)):
        layers += conv_block(f"enc{i + 1}", LayerKind.CONV1D, features, out, stride, **block)
        features = out
    for i, out in enumerate(DECODER_FEATURES):
        layers += conv_block(
            f"dec{i + 1}",
            LayerKind.CONV1D_TRANSPOSED,
            features,
            out,
            stride=2,
            output_padding=1,
            **block,
        )
        features = out
    layers += [
        LayerSpec(
            LayerKind.CONV1D,
            name="out.conv",
            in_features=features,
            out_features=VOCABULARY_SIZE,
        ),
        LayerSpec(LayerKind.SIGMOID, name="out.sigmoid"),
    ]
    return layers


def build_generator(seed: int = 0, config: NetworkConfig | None = None) -> GeneratorNet:
    """A freshly initialized generator."""
    config = config or NetworkConfig()
    return GeneratorNet.initialize(generator_layers(config), seed, config.init_std)


def generate_batch(
    g: GeneratorNet,
    matrices: np.ndarray,
    labels: np.ndarray,
    rng: np.random.Generator,
    *,
    training: bool = False,
    config: NetworkConfig | None = None,
) -> Tensor:
    """Generator output for a batch, (n, 67, 200)."""
    return g.forward(condition_input(matrices, labels, rng, config), training=training)


def generate(
    g: GeneratorNet,
    x: UrlMatrix | np.ndarray,
    label: UrlLabel | int,
    seed: int = 0,
    config: NetworkConfig | None = None,
) -> np.ndarray:
    """Synthesize a (200, 67) matrix from one real URL and a target label.

    The result depends only on the generator, the inputs and `seed`.
    """
    data = x.data if isinstance(x, UrlMatrix) else np.asarray(x)
    rng = np.random.default_rng(seed)
    with no_grad():
        out = generate_batch(g, data[None], np.array([int(label)]), rng, config=config)
    return out.data[0].T.copy()
