import numpy as np
import pytest

from phishgan.networks.checkpoint import save_checkpoint
from phishgan.networks.model import build_model
from phishgan.settings import AdamConfig, TrainConfig
from phishgan.urls.codec import encode_urls, one_hot
from phishgan.urls.dataset import labels_of, synth_corpus


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def corpus():
    return synth_corpus(40, seed=3)


@pytest.fixture(scope="session")
def batch(corpus):
    """Eight encoded URLs, four of each class, with their labels."""
    records = [r for r in corpus if r.label == 0][:4] + [r for r in corpus if r.label == 1][:4]
    return one_hot(encode_urls(r.url for r in records)), labels_of(records)


@pytest.fixture(scope="session")
def model():
    return build_model(seed=0)


@pytest.fixture(scope="session")
def checkpoint_path(tmp_path_factory, model):
    path = tmp_path_factory.mktemp("model") / "model.ckpt"
    save_checkpoint(model, path)
    return path


@pytest.fixture
def tiny_config():
    """A schedule small enough for a few iterations per test."""
    return TrainConfig(
        epochs=1,
        batch_size=4,
        max_d_iter=1,
        generator_optimizer=AdamConfig(alpha=0.001),
        discriminator_optimizer=AdamConfig(alpha=0.001),
        seed=5,
    )
