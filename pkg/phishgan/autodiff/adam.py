"""Adam with bias-corrected moment estimates."""

from __future__ import annotations

from collections.abc import Mapping

import dataclasses

import numpy as np

from phishgan.autodiff.tensor import Tensor
from phishgan.settings import AdamConfig


@dataclasses.dataclass
class AdamState:
    """Moment accumulators and step counter of one optimizer.

    The accumulators are created zero-filled the first time a parameter is
    seen, so a fresh state has `step == 0` and no moments.
    """

    alpha: float = 0.0002
    beta1: float = 0.5
    beta2: float = 0.999
    epsilon: float = 1e-8
    step: int = 0
    first_moment: dict[str, np.ndarray] = dataclasses.field(default_factory=dict)
    second_moment: dict[str, np.ndarray] = dataclasses.field(default_factory=dict)

    @classmethod
    def from_config(cls, config: AdamConfig) -> AdamState:
        return cls(
            alpha=config.alpha,
            beta1=config.beta1,
            beta2=config.beta2,
            epsilon=config.epsilon,
        )


def adam_step(
    params: Mapping[str, Tensor],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
) -> AdamState:
    """Apply one Adam update to `params` in place.

    Args:
        params: Named parameters to update.
        grads: Gradient of the objective for every entry of `params`.
        state: Optimizer state, updated in place and returned.

    Returns:
        The updated state. An empty parameter set leaves it untouched.

    Raises:
        ValueError: If a gradient does not match its parameter's shape.
    """
    if not params:
        return state

    state.step += 1
    correction1 = 1.0 - state.beta1**state.step
    correction2 = 1.0 - state.beta2**state.step

    for name, param in params.items():
        grad = grads[name]
        if grad.shape != param.shape:
            msg = f"gradient of {name} has shape {grad.shape}, parameter has {param.shape}"
            raise ValueError(msg)
        if name not in state.first_moment:
            state.first_moment[name] = np.zeros_like(param.data)
            state.second_moment[name] = np.zeros_like(param.data)
        m = state.first_moment[name]
        v = state.second_moment[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * (grad * grad)
        param.data -= state.alpha * (m / correction1) / (
            np.sqrt(v / correction2) + state.epsilon
        )
    return state
