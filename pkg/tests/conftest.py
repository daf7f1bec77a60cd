import numpy as np
import pytest

from config.experiment import ExperimentConfig
from src.data import build_vocab, encode_corpus, generate_synthetic_corpus
from src.utils.cache import dataset_cache


def pytest_addoption(parser):
    parser.addoption('--runslow', action='store_true', default=False, help='run slow desk-scale tests')


def pytest_collection_modifyitems(config, items):
    if config.getoption('--runslow'):
        return
    skip_slow = pytest.mark.skip(reason='needs --runslow')
    for item in items:
        if 'slow' in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope='session')
def small_corpus():
    return generate_synthetic_corpus(400, seed=7, label_noise=0.0)


@pytest.fixture(scope='session')
def small_dataset(small_corpus):
    vocab = build_vocab(small_corpus)
    return encode_corpus(small_corpus, vocab)


@pytest.fixture
def make_config(tmp_path):
    """Tiny experiments: a few hundred synthetic tweets, small batches, short runs"""

    def factory(**overrides) -> ExperimentConfig:
        values = dict(
            synthetic_records=600,
            cycles=2,
            batch_size=64,
            privacy_samples=30,
            privacy_epochs=2,
            out=str(tmp_path / 'metrics.csv'),
        )
        values.update(overrides)
        return ExperimentConfig(**values)

    return factory


@pytest.fixture(autouse=True)
def _fresh_dataset_cache():
    dataset_cache.clear()
    yield
    dataset_cache.clear()
