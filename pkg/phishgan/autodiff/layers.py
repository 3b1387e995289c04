"""The layer kinds used by the generator and discriminator.

Convolutions are one-dimensional: the 67 symbol dimensions of a URL matrix are
channels and the kernel slides along the 200 positions. Tensors flowing
through convolutional layers are laid out as (batch, channels, length).
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence

import dataclasses
import enum

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from phishgan.autodiff.tensor import Tensor, concat, record
from phishgan.errors import ShapeError


class LayerKind(enum.StrEnum):
    CONV1D = "conv1d"
    CONV1D_TRANSPOSED = "conv1d-transposed"
    DENSE = "dense"
    BATCHNORM = "batchnorm"
    LEAKY_RELU = "leaky-relu"
    SIGMOID = "sigmoid"
    SOFTMAX = "softmax"
    CONCAT = "concat"
    FLATTEN = "flatten"


@dataclasses.dataclass(frozen=True)
class LayerSpec:
    """Static description of one layer.

    `in_features` / `out_features` are channel counts for convolutions and
    batch normalization, widths for dense layers, and the flattened width for
    `flatten` (0 leaves it unchecked).
    """

    kind: LayerKind
    name: str = ""
    in_features: int = 0
    out_features: int = 0
    kernel: int = 3
    stride: int = 1
    padding: int = 1
    output_padding: int = 0
    negative_slope: float = 0.2
    epsilon: float = 1e-5
    momentum: float = 0.9

    def output_length(self, length: int) -> int:
        """Sequence length produced from an input of `length` positions."""
        if self.kind == LayerKind.CONV1D:
            return (length + 2 * self.padding - self.kernel) // self.stride + 1
        if self.kind == LayerKind.CONV1D_TRANSPOSED:
            return (
                (length - 1) * self.stride
                - 2 * self.padding
                + self.kernel
                + self.output_padding
            )
        return length

    def parameter_shapes(self) -> dict[str, tuple[int, ...]]:
        if self.kind == LayerKind.CONV1D:
            return {
                "weight": (self.out_features, self.in_features, self.kernel),
                "bias": (self.out_features,),
            }
        if self.kind == LayerKind.CONV1D_TRANSPOSED:
            return {
                "weight": (self.in_features, self.out_features, self.kernel),
                "bias": (self.out_features,),
            }
        if self.kind == LayerKind.DENSE:
            return {
                "weight": (self.in_features, self.out_features),
                "bias": (self.out_features,),
            }
        if self.kind == LayerKind.BATCHNORM:
            return {"gamma": (self.in_features,), "beta": (self.in_features,)}
        return {}

    def buffer_shapes(self) -> dict[str, tuple[int, ...]]:
        if self.kind == LayerKind.BATCHNORM:
            return {
                "running_mean": (self.in_features,),
                "running_var": (self.in_features,),
            }
        return {}

    def to_dict(self) -> dict:
        data = dataclasses.asdict(self)
        data["kind"] = str(self.kind)
        return data

    @classmethod
    def from_dict(cls, data: Mapping) -> LayerSpec:
        return cls(**{**data, "kind": LayerKind(data["kind"])})


def initial_parameters(
    layer: LayerSpec, rng: np.random.Generator, std: float
) -> dict[str, np.ndarray]:
    """Zero-mean Gaussian weights, zero biases, unit batchnorm scale."""
    params = {}
    for name, shape in layer.parameter_shapes().items():
        if name == "weight":
            params[name] = rng.normal(0.0, std, size=shape)
        elif name == "gamma":
            params[name] = np.ones(shape)
        else:
            params[name] = np.zeros(shape)
    return params


def initial_buffers(layer: LayerSpec) -> dict[str, np.ndarray]:
    return {
        name: np.zeros(shape) if name == "running_mean" else np.ones(shape)
        for name, shape in layer.buffer_shapes().items()
    }


def conv1d(x: Tensor, weight: Tensor, bias: Tensor, stride: int, padding: int) -> Tensor:
    length = x.shape[2]
    kernel = weight.shape[2]
    padded = np.pad(x.data, ((0, 0), (0, 0), (padding, padding)))
    windows = sliding_window_view(padded, kernel, axis=2)[:, :, ::stride, :]
    data = np.einsum("nclk,fck->nfl", windows, weight.data, optimize=True)
    out = record(data + bias.data[None, :, None], (x, weight, bias), "conv1d")
    if out.requires_grad:
        span = stride * (windows.shape[2] - 1) + 1

        def _backward():
            grad = out.grad
            weight.accumulate(np.einsum("nfl,nclk->fck", grad, windows, optimize=True))
            bias.accumulate(grad.sum(axis=(0, 2)))
            if x.requires_grad:
                grad_padded = np.zeros_like(padded)
                for k in range(kernel):
                    grad_padded[:, :, k : k + span : stride] += np.einsum(
                        "nfl,fc->ncl", grad, weight.data[:, :, k], optimize=True
                    )
                x.accumulate(grad_padded[:, :, padding : padding + length])

        out._backward = _backward
    return out


def conv_transpose1d(
    x: Tensor,
    weight: Tensor,
    bias: Tensor,
    stride: int,
    padding: int,
    output_padding: int,
) -> Tensor:
    batch, _, length = x.shape
    features, kernel = weight.shape[1], weight.shape[2]
    out_length = (length - 1) * stride - 2 * padding + kernel + output_padding
    full_length = (length - 1) * stride + kernel + output_padding
    span = stride * (length - 1) + 1

    full = np.zeros((batch, features, full_length))
    for k in range(kernel):
        full[:, :, k : k + span : stride] += np.einsum(
            "ncl,cf->nfl", x.data, weight.data[:, :, k], optimize=True
        )
    data = full[:, :, padding : padding + out_length] + bias.data[None, :, None]
    out = record(data, (x, weight, bias), "conv1d-transposed")
    if out.requires_grad:

        def _backward():
            grad_full = np.zeros((batch, features, full_length))
            grad_full[:, :, padding : padding + out_length] = out.grad
            grad_x = np.zeros_like(x.data)
            grad_weight = np.zeros_like(weight.data)
            for k in range(kernel):
                grad_k = grad_full[:, :, k : k + span : stride]
                grad_x += np.einsum("nfl,cf->ncl", grad_k, weight.data[:, :, k], optimize=True)
                grad_weight[:, :, k] = np.einsum("ncl,nfl->cf", x.data, grad_k, optimize=True)
            x.accumulate(grad_x)
            weight.accumulate(grad_weight)
            bias.accumulate(out.grad.sum(axis=(0, 2)))

        out._backward = _backward
    return out


def dense(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    out = record(x.data @ weight.data + bias.data, (x, weight, bias), "dense")
    if out.requires_grad:

        def _backward():
            x.accumulate(out.grad @ weight.data.T)
            weight.accumulate(x.data.T @ out.grad)
            bias.accumulate(out.grad.sum(axis=0))

        out._backward = _backward
    return out


def batchnorm(
    x: Tensor,
    gamma: Tensor,
    beta: Tensor,
    buffers: dict[str, np.ndarray],
    *,
    training: bool,
    epsilon: float,
    momentum: float,
) -> Tensor:
    """Per-channel normalization over the batch (and length) axes.

    In training mode the batch statistics are used and folded into the
    running statistics; in inference mode the running statistics are used and
    nothing is mutated.
    """
    axes = (0,) if x.ndim == 2 else (0, 2)
    view = (1, -1) if x.ndim == 2 else (1, -1, 1)
    if training:
        mean = x.data.mean(axis=axes)
        var = x.data.var(axis=axes)
        buffers["running_mean"][...] = (
            momentum * buffers["running_mean"] + (1.0 - momentum) * mean
        )
        buffers["running_var"][...] = (
            momentum * buffers["running_var"] + (1.0 - momentum) * var
        )
    else:
        mean = buffers["running_mean"]
        var = buffers["running_var"]
    inv_std = (1.0 / np.sqrt(var + epsilon)).reshape(view)
    normalized = (x.data - mean.reshape(view)) * inv_std
    data = gamma.data.reshape(view) * normalized + beta.data.reshape(view)
    out = record(data, (x, gamma, beta), "batchnorm")
    if out.requires_grad:
        count = x.data.size // x.shape[1]

        def _backward():
            grad = out.grad
            gamma.accumulate((grad * normalized).sum(axis=axes))
            beta.accumulate(grad.sum(axis=axes))
            if not x.requires_grad:
                return
            grad_normalized = grad * gamma.data.reshape(view)
            if not training:
                x.accumulate(grad_normalized * inv_std)
                return
            x.accumulate(
                inv_std
                / count
                * (
                    count * grad_normalized
                    - grad_normalized.sum(axis=axes).reshape(view)
                    - normalized
                    * (grad_normalized * normalized).sum(axis=axes).reshape(view)
                )
            )

        out._backward = _backward
    return out


def leaky_relu(x: Tensor, negative_slope: float) -> Tensor:
    slope = np.where(x.data > 0, 1.0, negative_slope)
    out = record(x.data * slope, (x,), "leaky-relu")
    if out.requires_grad:

        def _backward():
            x.accumulate(out.grad * slope)

        out._backward = _backward
    return out


def sigmoid(x: Tensor) -> Tensor:
    data = expit(x.data)
    out = record(data, (x,), "sigmoid")
    if out.requires_grad:

        def _backward():
            x.accumulate(out.grad * data * (1.0 - data))

        out._backward = _backward
    return out


def softmax(x: Tensor) -> Tensor:
    """Softmax over the last axis."""
    shifted = np.exp(x.data - x.data.max(axis=-1, keepdims=True))
    data = shifted / shifted.sum(axis=-1, keepdims=True)
    out = record(data, (x,), "softmax")
    if out.requires_grad:

        def _backward():
            grad = out.grad
            x.accumulate(data * (grad - (grad * data).sum(axis=-1, keepdims=True)))

        out._backward = _backward
    return out


def flatten(x: Tensor) -> Tensor:
    return x.reshape(x.shape[0], -1)


def _check_channels(layer: LayerSpec, x: Tensor, ndims: tuple[int, ...]) -> None:
    if x.ndim not in ndims or x.shape[1] != layer.in_features:
        expected = ("batch", layer.in_features, "length")[: max(ndims)]
        raise ShapeError(f"{layer.kind} layer {layer.name!r}", expected, x.shape)


def forward(
    layer: LayerSpec,
    x: Tensor | Sequence[Tensor],
    params: Mapping[str, Tensor] | None = None,
    *,
    training: bool = False,
    buffers: dict[str, np.ndarray] | None = None,
) -> Tensor:
    """Apply `layer` to `x` with the given parameters.

    Args:
        layer: The layer to apply.
        x: Input tensor, or the list of tensors to join for `concat`.
        params: The layer parameters, keyed as in `LayerSpec.parameter_shapes`.
        training: Batch normalization mode.
        buffers: Batch normalization running statistics.

    Returns:
        The output tensor, recorded in the graph when gradients are needed.

    Raises:
        ShapeError: If the input or a parameter does not fit the layer.
    """
    params = params or {}
    for name, shape in layer.parameter_shapes().items():
        if params[name].shape != shape:
            raise ShapeError(f"{layer.name!r} parameter {name}", shape, params[name].shape)

    kind = layer.kind
    if kind == LayerKind.CONCAT:
        return concat(list(x), axis=1)
    if kind == LayerKind.CONV1D:
        _check_channels(layer, x, (3,))
        return conv1d(x, params["weight"], params["bias"], layer.stride, layer.padding)
    if kind == LayerKind.CONV1D_TRANSPOSED:
        _check_channels(layer, x, (3,))
        return conv_transpose1d(
            x,
            params["weight"],
            params["bias"],
            layer.stride,
            layer.padding,
            layer.output_padding,
        )
    if kind == LayerKind.DENSE:
        _check_channels(layer, x, (2,))
        return dense(x, params["weight"], params["bias"])
    if kind == LayerKind.BATCHNORM:
        _check_channels(layer, x, (2, 3))
        return batchnorm(
            x,
            params["gamma"],
            params["beta"],
            buffers,
            training=training,
            epsilon=layer.epsilon,
            momentum=layer.momentum,
        )
    if kind == LayerKind.LEAKY_RELU:
        return leaky_relu(x, layer.negative_slope)
    if kind == LayerKind.SIGMOID:
        return sigmoid(x)
    if kind == LayerKind.SOFTMAX:
        return softmax(x)
    if kind == LayerKind.FLATTEN:
        width = int(np.prod(x.shape[1:]))
        if layer.in_features and width != layer.in_features:
            raise ShapeError(
                f"flatten layer {layer.name!r}", ("batch", layer.in_features), (x.shape[0], width)
            )
        return flatten(x)
    msg = f"unknown layer kind {kind!r}"
    raise ValueError(msg)
