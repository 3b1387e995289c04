import numpy as np
import pytest

from phishgan.autodiff.layers import LayerKind, LayerSpec, forward, initial_buffers
from phishgan.autodiff.tensor import Tensor
from phishgan.errors import ShapeError


def params_for(layer, rng):
    return {
        name: Tensor(rng.normal(size=shape), requires_grad=True)
        for name, shape in layer.parameter_shapes().items()
    }


@pytest.mark.parametrize(
    ("kind", "stride", "output_padding", "length", "expected"),
    [
        (LayerKind.CONV1D, 1, 0, 200, 200),
        (LayerKind.CONV1D, 2, 0, 200, 100),
        (LayerKind.CONV1D, 2, 0, 100, 50),
        (LayerKind.CONV1D, 2, 0, 50, 25),
        (LayerKind.CONV1D_TRANSPOSED, 2, 1, 25, 50),
        (LayerKind.CONV1D_TRANSPOSED, 2, 1, 100, 200),
        # without output padding the upsampled length falls one short
        (LayerKind.CONV1D_TRANSPOSED, 2, 0, 25, 49),
    ],
)
def test_output_length(kind, stride, output_padding, length, expected):
    layer = LayerSpec(kind, stride=stride, output_padding=output_padding)

    assert layer.output_length(length) == expected


@pytest.mark.parametrize(
    ("kind", "stride", "output_padding", "length"),
    [
        (LayerKind.CONV1D, 1, 0, 200),
        (LayerKind.CONV1D, 2, 0, 200),
        (LayerKind.CONV1D, 2, 0, 25),
        (LayerKind.CONV1D_TRANSPOSED, 2, 1, 25),
        (LayerKind.CONV1D_TRANSPOSED, 2, 1, 7),
    ],
)
def test_convolution_output_shape_matches_formula(rng, kind, stride, output_padding, length):
    layer = LayerSpec(
        kind, name="c", in_features=67, out_features=5, stride=stride, output_padding=output_padding
    )
    x = Tensor(rng.normal(size=(2, 67, length)))

    out = forward(layer, x, params_for(layer, rng))

    assert out.shape == (2, 5, layer.output_length(length))


def test_convolution_matches_direct_sum(rng):
    layer = LayerSpec(LayerKind.CONV1D, name="c", in_features=3, out_features=2, stride=2)
    params = params_for(layer, rng)
    x = rng.normal(size=(1, 3, 9))

    out = forward(layer, Tensor(x), params).data

    w = params["weight"].data
    b = params["bias"].data
    padded = np.pad(x, ((0, 0), (0, 0), (1, 1)))
    for f in range(2):
        for position in range(out.shape[2]):
            expected = b[f]
            for c in range(3):
                for k in range(3):
                    expected += w[f, c, k] * padded[0, c, 2 * position + k]
            assert out[0, f, position] == pytest.approx(expected, abs=1e-12)


def test_transposed_convolution_is_adjoint_of_convolution(rng):
    conv = LayerSpec(LayerKind.CONV1D, name="c", in_features=4, out_features=3, stride=2)
    up = LayerSpec(
        LayerKind.CONV1D_TRANSPOSED,
        name="t",
        in_features=3,
        out_features=4,
        stride=2,
        output_padding=1,
    )
    weight = rng.normal(size=(3, 4, 3))
    x = rng.normal(size=(1, 4, 10))
    y = rng.normal(size=(1, 3, 5))
    zero = Tensor(np.zeros(3))
    zero4 = Tensor(np.zeros(4))

    conv_x = forward(conv, Tensor(x), {"weight": Tensor(weight), "bias": zero}).data
    up_y = forward(up, Tensor(y), {"weight": Tensor(weight), "bias": zero4}).data

    # <conv(x), y> == <x, conv^T(y)>
    assert np.sum(conv_x * y) == pytest.approx(np.sum(x * up_y), rel=1e-12)


def test_softmax_of_zeros_is_uniform():
    out = forward(LayerSpec(LayerKind.SOFTMAX), Tensor(np.zeros((1, 2))))

    np.testing.assert_array_equal(out.data, [[0.5, 0.5]])


def test_softmax_rows_sum_to_one(rng):
    out = forward(LayerSpec(LayerKind.SOFTMAX), Tensor(rng.normal(scale=50, size=(16, 2))))

    np.testing.assert_allclose(out.data.sum(axis=1), 1.0, atol=1e-12)


def test_leaky_relu_slope():
    out = forward(LayerSpec(LayerKind.LEAKY_RELU, negative_slope=0.2), Tensor([[-2.0, 3.0]]))

    np.testing.assert_allclose(out.data, [[-0.4, 3.0]])


def test_batchnorm_training_normalizes_and_updates_running_stats(rng):
    layer = LayerSpec(LayerKind.BATCHNORM, name="bn", in_features=3, momentum=0.9)
    buffers = initial_buffers(layer)
    x = rng.normal(loc=5.0, scale=2.0, size=(8, 3, 10))

    params = {"gamma": Tensor(np.ones(3)), "beta": Tensor(np.zeros(3))}

    out = forward(layer, Tensor(x), params, training=True, buffers=buffers)

    np.testing.assert_allclose(out.data.mean(axis=(0, 2)), 0.0, atol=1e-10)
    np.testing.assert_allclose(out.data.var(axis=(0, 2)), 1.0, atol=1e-3)
    np.testing.assert_allclose(buffers["running_mean"], 0.1 * x.mean(axis=(0, 2)))
    np.testing.assert_allclose(buffers["running_var"], 0.9 + 0.1 * x.var(axis=(0, 2)))


def test_batchnorm_inference_leaves_running_stats_alone(rng):
    layer = LayerSpec(LayerKind.BATCHNORM, name="bn", in_features=3)
    buffers = initial_buffers(layer)
    before = {name: value.copy() for name, value in buffers.items()}
    x = rng.normal(size=(4, 3, 6))

    out = forward(layer, Tensor(x), params_for(layer, rng), training=False, buffers=buffers)

    assert out.shape == x.shape
    for name, value in buffers.items():
        np.testing.assert_array_equal(value, before[name])


def test_shape_mismatch_names_layer_and_both_shapes(rng):
    layer = LayerSpec(LayerKind.CONV1D, name="enc1.conv", in_features=70, out_features=32)

    with pytest.raises(ShapeError) as excinfo:
        forward(layer, Tensor(np.zeros((1, 67, 200))), params_for(layer, rng))

    message = str(excinfo.value)
    assert "enc1.conv" in message
    assert "(1, 67, 200)" in message
    assert "70" in message


def test_flatten_width_is_checked():
    layer = LayerSpec(LayerKind.FLATTEN, name="flatten", in_features=3200)

    assert forward(layer, Tensor(np.zeros((2, 128, 25)))).shape == (2, 3200)
    with pytest.raises(ShapeError):
        forward(layer, Tensor(np.zeros((2, 128, 24))))


def test_layer_spec_round_trips_through_dict():
    layer = LayerSpec(
        LayerKind.CONV1D_TRANSPOSED,
        name="dec1.conv",
        in_features=128,
        out_features=128,
        stride=2,
        output_padding=1,
    )

    assert LayerSpec.from_dict(layer.to_dict()) == layer
