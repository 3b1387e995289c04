"""A named stack of layers with its parameters and running statistics."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import logging

import numpy as np

from phishgan.autodiff.layers import (
    LayerKind,
    LayerSpec,
    forward,
    initial_buffers,
    initial_parameters,
)
from phishgan.autodiff.tensor import Tensor

log = logging.getLogger(__name__)


class Network:
    """Layers applied by name, with parameters keyed `<layer>.<parameter>`."""

    def __init__(
        self,
        layers: Sequence[LayerSpec],
        params: dict[str, Tensor],
        buffers: dict[str, np.ndarray],
    ):
        self.layers = list(layers)
        self.params = params
        self.buffers = buffers
        self._by_name = {layer.name: layer for layer in self.layers}
        if len(self._by_name) != len(self.layers):
            msg = "layer names must be unique"
            raise ValueError(msg)

    @classmethod
    def initialize(cls, layers: Sequence[LayerSpec], seed: int, init_std: float):
        rng = np.random.default_rng(seed)
        params = {}
        buffers = {}
        for layer in layers:
            for name, value in initial_parameters(layer, rng, init_std).items():
                key = f"{layer.name}.{name}"
                params[key] = Tensor(value, requires_grad=True, name=key)
            for name, value in initial_buffers(layer).items():
                buffers[f"{layer.name}.{name}"] = value
        network = cls(layers, params, buffers)
        log.info(
            "Built %s with %d parameters", cls.__name__, network.parameter_count()
        )
        return network

    def parameter_count(self) -> int:
        return sum(param.size for param in self.params.values())

    def layer(self, name: str) -> LayerSpec:
        return self._by_name[name]

    def layer_params(self, layer: LayerSpec) -> dict[str, Tensor]:
        return {name: self.params[f"{layer.name}.{name}"] for name in layer.parameter_shapes()}

    def layer_buffers(self, layer: LayerSpec) -> dict[str, np.ndarray]:
        return {
            name: self.buffers[f"{layer.name}.{name}"] for name in layer.buffer_shapes()
        }

    def apply(self, names: Iterable[str], x: Tensor, training: bool) -> Tensor:
        """Run `x` through the named layers in order."""
        for name in names:
            layer = self._by_name[name]
            x = forward(
                layer,
                x,
                self.layer_params(layer),
                training=training,
                buffers=self.layer_buffers(layer) if layer.kind == LayerKind.BATCHNORM else None,
            )
        return x

    def state_arrays(self) -> dict[str, np.ndarray]:
        """Parameters then buffers, in layer order."""
        arrays = {name: param.data for name, param in self.params.items()}
        arrays.update(self.buffers)
        return arrays

    def load_state_arrays(self, arrays: dict[str, np.ndarray]) -> None:
        for name, param in self.params.items():
            param.data[...] = arrays[name]
        for name, buffer in self.buffers.items():
            buffer[...] = arrays[name]

    def snapshot(self) -> dict[str, np.ndarray]:
        return {name: value.copy() for name, value in self.state_arrays().items()}


def conv_block(
    prefix: str,
    kind: LayerKind,
    in_features: int,
    out_features: int,
    stride: int,
    *,
    output_padding: int = 0,
    negative_slope: float = 0.2,
    epsilon: float = 1e-5,
    momentum: float = 0.9,
) -> list[LayerSpec]:
    """A (transposed) convolution followed by batchnorm and leaky ReLU."""
    return [
        LayerSpec(
            kind,
            name=f"{prefix}.conv",
            in_features=in_features,
            out_features=out_features,
            kernel=3,
            stride=stride,
            padding=1,
            output_padding=output_padding,
        ),
        LayerSpec(
            LayerKind.BATCHNORM,
            name=f"{prefix}.bn",
            in_features=out_features,
            out_features=out_features,
            epsilon=epsilon,
            momentum=momentum,
        ),
        LayerSpec(LayerKind.LEAKY_RELU, name=f"{prefix}.act", negative_slope=negative_slope),
    ]
