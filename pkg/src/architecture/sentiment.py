import copy
from typing import Optional

import numpy as np

from config import settings
from src.exceptions import ShapeError
from src.nn import Conv1D, Dense, Embedding, LSTM, MaxPool1D, Sequential, Sigmoid
from src.utils.seeding import derive_rng

EMBEDDING_ROWS = settings.VOCAB_SIZE + 1
PARAM_COUNT = 89_673
TRANSPORT_BYTES_PER_PARAM = 2


class SentimentModel(Sequential):
    """
    Embedding(10,001×8) → Conv1D(32, k=3, valid, ReLU) → MaxPool1D(2) → LSTM(32)
    → Dense(16, ReLU, L2) → Dense(1) → Sigmoid
    """

    @property
    def size_bytes_16bit(self) -> int:
        return self.param_count * TRANSPORT_BYTES_PER_PARAM

    def clone(self) -> 'SentimentModel':
        return copy.deepcopy(self)


def build_model(seed: int = 0, l2: float = settings.L2_COEFFICIENT,
                rng: Optional[np.random.Generator] = None) -> SentimentModel:
    rng = rng if rng is not None else derive_rng(seed, 'init')
    return SentimentModel([
        Embedding(EMBEDDING_ROWS, settings.EMBEDDING_DIM, rng=rng, init_range=settings.EMBEDDING_INIT_RANGE),
        Conv1D(settings.EMBEDDING_DIM, settings.CONV_FILTERS, settings.CONV_KERNEL, activation='relu', rng=rng),
        MaxPool1D(settings.POOL_SIZE),
        LSTM(settings.CONV_FILTERS, settings.LSTM_UNITS, rng=rng),
        Dense(settings.LSTM_UNITS, settings.DENSE_UNITS, activation='relu', l2=l2, rng=rng),
        Dense(settings.DENSE_UNITS, 1, rng=rng),
        Sigmoid(),
    ])


def flatten_params(model: Sequential) -> np.ndarray:
    """All parameters as one float32 vector, in Sequential.named_params order"""
    params = model.param_list()
    if not params:
        return np.zeros(0, dtype=np.float32)
    return np.concatenate([p.ravel() for p in params]).astype(np.float32)


def unflatten_params(model: Sequential, flat: np.ndarray) -> Sequential:
    flat = np.asarray(flat)
    if flat.ndim != 1 or flat.size != model.param_count:
        raise ShapeError(f"flat vector has {flat.size} values, model needs {model.param_count}")
    offset = 0
    for layer, name in model.named_params():
        target = layer.params[name]
        target[...] = flat[offset:offset + target.size].reshape(target.shape)
        offset += target.size
    return model
