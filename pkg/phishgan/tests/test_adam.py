import numpy as np
import pytest

from phishgan.autodiff.adam import AdamState, adam_step
from phishgan.autodiff.tensor import Tensor
from phishgan.settings import AdamConfig


def test_zero_gradient_leaves_parameters_unchanged():
    param = Tensor(np.array([0.5, -1.5]), requires_grad=True)
    state = AdamState()

    adam_step({"p": param}, {"p": np.zeros(2)}, state)

    np.testing.assert_array_equal(param.data, [0.5, -1.5])
    assert state.step == 1


def test_first_step_on_a_scalar():
    param = Tensor(np.array(1.0), requires_grad=True)

    adam_step({"p": param}, {"p": np.array(1.0)}, AdamState(alpha=0.0002))

    # m_hat = 1, v_hat = 1: 1.0 - 0.0002 * 1 / (1 + 1e-8)
    assert param.item() == pytest.approx(0.9998, abs=1e-10)


def test_constant_gradient_moves_by_alpha_per_step():
    param = Tensor(np.zeros(3), requires_grad=True)
    grad = np.array([3.0, -0.5, 100.0])
    state = AdamState(alpha=0.01)

    for _ in range(10):
        adam_step({"p": param}, {"p": grad}, state)

    # bias-corrected moments of a constant gradient are exact
    np.testing.assert_allclose(param.data, -0.1 * np.sign(grad), rtol=1e-6)
    assert state.step == 10


def test_empty_parameter_set_is_a_no_op():
    state = AdamState()

    assert adam_step({}, {}, state) is state
    assert state.step == 0


def test_gradient_shape_mismatch_rejected():
    param = Tensor(np.zeros((2, 2)), requires_grad=True)

    with pytest.raises(ValueError, match="shape"):
        adam_step({"p": param}, {"p": np.zeros(4)}, AdamState())


def test_state_from_config():
    state = AdamState.from_config(AdamConfig(alpha=0.001, beta1=0.9))

    assert (state.alpha, state.beta1, state.beta2, state.epsilon) == (0.001, 0.9, 0.999, 1e-8)
    assert state.step == 0
    assert state.first_moment == {}
