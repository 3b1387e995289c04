import math

import numpy as np
import pytest

from phishgan.autodiff.tensor import Tensor
from phishgan.errors import ShapeError
from phishgan.settings import LossWeights
from phishgan.tests.cases import load_cases
from phishgan.training.losses import (
    LossComponents,
    adv_loss_d,
    adv_loss_g,
    class_loss,
    rec_loss,
    total_loss,
)


def margin(case):
    return case.get("absolute_error_margin", 0)


@pytest.mark.parametrize("case", load_cases("losses.yaml", "adv_loss_d"))
def test_adv_loss_d(case):
    loss = adv_loss_d(case["input"]["real_scores"], case["input"]["fake_scores"])

    assert loss.item() == pytest.approx(case["output"]["loss"], abs=margin(case))


@pytest.mark.parametrize("case", load_cases("losses.yaml", "adv_loss_g"))
def test_adv_loss_g(case):
    loss = adv_loss_g(case["input"]["fake_scores"])

    assert loss.item() == pytest.approx(case["output"]["loss"], abs=margin(case))


@pytest.mark.parametrize("case", load_cases("losses.yaml", "class_loss"))
def test_class_loss(case):
    loss = class_loss(np.array(case["input"]["class_probs"], float), case["input"]["labels"])

    assert loss.item() == pytest.approx(case["output"]["loss"], abs=margin(case))


@pytest.mark.parametrize("case", load_cases("losses.yaml", "rec_loss"))
def test_rec_loss(case):
    loss = rec_loss(case["input"]["fake"], case["input"]["real"])

    assert loss.item() == pytest.approx(case["output"]["loss"], abs=margin(case))


@pytest.mark.parametrize("case", load_cases("losses.yaml", "total_loss"))
def test_total_loss(case):
    components = LossComponents(**case["input"]["components"])
    weights = LossWeights(**case["input"].get("weights", {}))

    total = total_loss(components, weights)

    assert total == pytest.approx(case["output"]["total"], abs=margin(case))


def test_losses_match_scalar_loops():
    rng = np.random.default_rng(8)
    for _ in range(50):
        n = int(rng.integers(1, 9))
        real = rng.normal(size=n)
        fake = rng.normal(size=n)
        logits = rng.normal(size=(n, 2))
        probs = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
        labels = rng.integers(0, 2, size=n)
        a = rng.uniform(size=(n, 3, 4))
        b = rng.uniform(size=(n, 3, 4))

        expected_d = sum((s - 1) ** 2 for s in real) / n + sum((s + 1) ** 2 for s in fake) / n
        expected_g = sum((s - 1) ** 2 for s in fake) / n
        expected_class = -sum(math.log(probs[i, labels[i]]) for i in range(n)) / n
        expected_rec = sum((x - y) ** 2 for x, y in zip(a.ravel(), b.ravel(), strict=True)) / a.size

        assert adv_loss_d(real, fake).item() == pytest.approx(expected_d, rel=1e-12)
        assert adv_loss_g(fake).item() == pytest.approx(expected_g, rel=1e-12)
        assert class_loss(probs, labels).item() == pytest.approx(expected_class, rel=1e-12)
        assert rec_loss(a, b).item() == pytest.approx(expected_rec, rel=1e-12)


def test_total_loss_of_tensors_is_a_tensor():
    adv = Tensor(0.5, requires_grad=True)

    total = total_loss(LossComponents(adv=adv, rec=0.25, cls=0.0))

    assert isinstance(total, Tensor)
    assert total.item() == pytest.approx(3.0)


def test_total_loss_is_linear_in_the_weights():
    components = LossComponents(adv=0.4, rec=0.03, cls=0.2)
    a = LossWeights(1, 10, 10)
    b = LossWeights(2, 1, 5)

    combined = total_loss(components, LossWeights(3, 11, 15))

    assert combined == pytest.approx(total_loss(components, a) + total_loss(components, b))


@pytest.mark.parametrize(
    "call",
    [
        lambda: adv_loss_d([], []),
        lambda: adv_loss_d([1.0], []),
        lambda: adv_loss_g([]),
        lambda: class_loss(np.empty((0, 2)), []),
    ],
    ids=["adv_d", "adv_d_fake", "adv_g", "class"],
)
def test_empty_batches_rejected(call):
    with pytest.raises(ValueError, match="empty"):
        call()


def test_class_rows_must_sum_to_one():
    with pytest.raises(ValueError, match="sum to"):
        class_loss(np.array([[0.5, 0.5], [0.6, 0.5]]), [0, 1])


def test_class_shape_mismatch_rejected():
    with pytest.raises(ShapeError):
        class_loss(np.array([[0.5, 0.5]]), [0, 1])


def test_rec_shape_mismatch_rejected():
    with pytest.raises(ShapeError):
        rec_loss(np.zeros((1, 67, 200)), np.zeros((1, 200, 67)))


def test_weights_must_be_nonnegative():
    with pytest.raises(ValueError, match="nonnegative"):
        LossWeights(lambda_adv=-1)
