"""The two-headed discriminator.

Six convolutions (three of them downsampling) reduce a URL matrix to 25
positions of 128 features. After two dense layers, one head classifies the
URL as benign or malicious and the other emits a raw adversarial score that is
trained towards +1 for real URLs and -1 for generated ones.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from phishgan.autodiff.layers import LayerKind, LayerSpec
from phishgan.autodiff.tensor import Tensor, no_grad
from phishgan.errors import ShapeError
from phishgan.networks.network import Network, conv_block
from phishgan.settings import NetworkConfig
from phishgan.urls.codec import MAX_LENGTH, VOCABULARY_SIZE, UrlMatrix
from phishgan.urls.labels import UrlLabel

CONV_FEATURES = (16, 16, 32, 32, 128, 128)
CONV_STRIDES = (1, 2, 1, 2, 1, 2)
DENSE_WIDTHS = (256, 64)
FLATTEN_WIDTH = 25 * CONV_FEATURES[-1]

CLASS_HEAD = "class"
ADV_HEAD = "adv"


def realness(adv_scores: np.ndarray) -> np.ndarray:
    """Map raw adversarial scores to a probability of being a real URL."""
    return np.clip((np.asarray(adv_scores) + 1.0) / 2.0, 0.0, 1.0)


@dataclasses.dataclass(frozen=True)
class Detection:
    """Verdict of the discriminator on one URL matrix."""

    class_probs: np.ndarray
    adv_score: float

    @property
    def realness(self) -> float:
        return float(realness(self.adv_score))

    @property
    def predicted_class(self) -> UrlLabel:
        return UrlLabel(int(np.argmax(self.class_probs)))

    @property
    def predicted_real(self) -> bool:
        return self.adv_score >= 0.0


@dataclasses.dataclass(frozen=True)
class Detections:
    """Verdicts on a batch: class probabilities (n, 2) and raw scores (n,)."""

    class_probs: np.ndarray
    adv_scores: np.ndarray

    def __len__(self) -> int:
        return len(self.adv_scores)

    def __getitem__(self, i: int) -> Detection:
        return Detection(self.class_probs[i], float(self.adv_scores[i]))

    @property
    def realness(self) -> np.ndarray:
        return realness(self.adv_scores)

    @property
    def predicted_classes(self) -> np.ndarray:
        return self.class_probs.argmax(axis=1)

    @property
    def predicted_real(self) -> np.ndarray:
        return self.adv_scores >= 0.0


class DiscriminatorNet(Network):
    def trunk_names(self) -> list[str]:
        heads = {CLASS_HEAD, ADV_HEAD}
        return [layer.name for layer in self.layers if layer.name.split(".")[0] not in heads]

    def head_names(self, head: str) -> list[str]:
        return [layer.name for layer in self.layers if layer.name.split(".")[0] == head]

    def forward(self, x: Tensor, training: bool = False) -> tuple[Tensor, Tensor]:
        """Class probabilities (n, 2) and raw adversarial scores (n,).

        Args:
            x: Channels-first URL matrices, (n, 67, 200).
            training: Batch normalization mode; inference uses running statistics.
        """
        if x.ndim != 3 or x.shape[1:] != (VOCABULARY_SIZE, MAX_LENGTH):
            raise ShapeError("discriminator input", ("batch", VOCABULARY_SIZE, MAX_LENGTH), x.shape)
        features = self.apply(self.trunk_names(), x, training)
        class_probs = self.apply(self.head_names(CLASS_HEAD), features, training)
        adv = self.apply(self.head_names(ADV_HEAD), features, training)
        return class_probs, adv.reshape(-1)


def discriminator_layers(config: NetworkConfig | None = None) -> list[LayerSpec]:
    config = config or NetworkConfig()
    layers: list[LayerSpec] = []
    features = VOCABULARY_SIZE
    for i, (out, stride) in enumerate(zip(CONV_FEATURES, CONV_STRIDES, strict=True)):
        layers += conv_block(
            f"conv{i + 1}",
            LayerKind.CONV1D,
            features,
            out,
            stride,
            negative_slope=config.leaky_relu_slope,
            epsilon=config.batchnorm_epsilon,
            momentum=config.batchnorm_momentum,
        )
        features = out
    layers.append(LayerSpec(LayerKind.FLATTEN, name="flatten", in_features=FLATTEN_WIDTH))
    width = FLATTEN_WIDTH
    for i, out in enumerate(DENSE_WIDTHS):
        layers += [
            LayerSpec(
                LayerKind.DENSE, name=f"dense{i + 1}.dense", in_features=width, out_features=out
            ),
            LayerSpec(
                LayerKind.LEAKY_RELU,
                name=f"dense{i + 1}.act",
                negative_slope=config.leaky_relu_slope,
            ),
        ]
        width = out
    layers += [
        LayerSpec(
            LayerKind.DENSE,
            name=f"{CLASS_HEAD}.dense",
            in_features=width,
            out_features=len(UrlLabel),
        ),
        LayerSpec(LayerKind.SOFTMAX, name=f"{CLASS_HEAD}.softmax"),
        LayerSpec(LayerKind.DENSE, name=f"{ADV_HEAD}.dense", in_features=width, out_features=1),
    ]
    return layers


def build_discriminator(seed: int = 0, config: NetworkConfig | None = None) -> DiscriminatorNet:
    """A freshly initialized discriminator."""
    config = config or NetworkConfig()
    return DiscriminatorNet.initialize(discriminator_layers(config), seed, config.init_std)


def channels_first(matrices: np.ndarray) -> Tensor:
    """(n, 200, 67) matrices as a (n, 67, 200) tensor."""
    matrices = np.asarray(matrices, dtype=np.float64)
    if matrices.ndim != 3 or matrices.shape[1:] != (MAX_LENGTH, VOCABULARY_SIZE):
        expected = ("batch", MAX_LENGTH, VOCABULARY_SIZE)
        raise ShapeError("discriminator input", expected, matrices.shape)
    return Tensor(matrices.transpose(0, 2, 1))


def detect_batch(d: DiscriminatorNet, matrices: np.ndarray, batch_size: int = 256) -> Detections:
    """Run the discriminator in inference mode over (n, 200, 67) matrices."""
    matrices = np.asarray(matrices, dtype=np.float64)
    probs, scores = [], []
    with no_grad():
        for start in range(0, len(matrices), batch_size):
            class_probs, adv = d.forward(channels_first(matrices[start : start + batch_size]))
            probs.append(class_probs.data)
            scores.append(adv.data)
    if not probs:
        return Detections(np.empty((0, len(UrlLabel))), np.empty(0))
    return Detections(np.concatenate(probs), np.concatenate(scores))


def detect(d: DiscriminatorNet, m: UrlMatrix | np.ndarray) -> Detection:
    """Classify one (200, 67) matrix and score its realness.

    Inference mode only: no parameter or running statistic changes.
    """
    data = m.data if isinstance(m, UrlMatrix) else np.asarray(m)
    if data.shape != (MAX_LENGTH, VOCABULARY_SIZE):
        raise ShapeError("detect", (MAX_LENGTH, VOCABULARY_SIZE), data.shape)
    return detect_batch(d, data[None])[0]
