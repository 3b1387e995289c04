"""Central finite-difference check of recorded gradients."""

from __future__ import annotations

from collections.abc import Callable, Mapping

import logging

import numpy as np

from phishgan.autodiff.tensor import Tensor, backward, no_grad
from phishgan.errors import GradientCheckError

log = logging.getLogger(__name__)


def grad_check(
    build: Callable[[], Tensor],
    inputs: Mapping[str, Tensor],
    h: float = 1e-5,
    *,
    max_entries: int | None = None,
    seed: int = 0,
) -> float:
    """Compare analytic gradients with central differences.

    Args:
        build: Deterministic function rebuilding the scalar objective from the
            current values of `inputs`.
        inputs: Named tensors (inputs and parameters) to differentiate.
        h: Finite-difference step.
        max_entries: Check at most this many randomly chosen entries per
            tensor; all entries when None.
        seed: Seed for the entry sampling.

    Returns:
        max |analytic - numeric| / max(1, |numeric|) over the checked entries.

    Raises:
        ValueError: If `h` is not positive.
        GradientCheckError: If two evaluations of `build` disagree.
    """
    if h <= 0:
        msg = f"finite-difference step must be positive, got {h}"
        raise ValueError(msg)

    loss = build()
    with no_grad():
        again = build().item()
    if loss.item() != again:
        msg = f"objective is not deterministic: {loss.item()!r} then {again!r}"
        raise GradientCheckError(msg)
    analytic = backward(loss, inputs)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, tensor in inputs.items():
        flat = tensor.data.reshape(-1)
        entries = np.arange(flat.size)
        if max_entries is not None and flat.size > max_entries:
            entries = np.sort(rng.choice(flat.size, size=max_entries, replace=False))
        grad = analytic[name].reshape(-1)
        for entry in entries:
            original = flat[entry]
            with no_grad():
                flat[entry] = original + h
                plus = build().item()
                flat[entry] = original - h
                minus = build().item()
            flat[entry] = original
            numeric = (plus - minus) / (2.0 * h)
            error = abs(grad[entry] - numeric) / max(1.0, abs(numeric))
            worst = max(worst, error)
    log.debug("Gradient check over %d tensors: max relative error %.3e", len(inputs), worst)
    return worst
