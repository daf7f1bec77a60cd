from dataclasses import dataclass
from typing import Tuple

import numpy as np

from config import settings
from src.exceptions import ShapeError
from src.nn import Dense, Flatten, Reshape, Sequential
from src.utils.seeding import derive_rng
from .sentiment import SentimentModel


@dataclass
class CompressionCodec:
    """Linear encoder (user side) and decoder (server side), width ÷ 4"""

    encoder: Dense
    decoder: Dense

    @classmethod
    def build(cls, width: int, factor: int = settings.COMPRESSION_FACTOR,
              rng: np.random.Generator = None) -> 'CompressionCodec':
        if width % factor:
            raise ShapeError(f"cut width {width} is not divisible by the compression factor {factor}")
        return cls(encoder=Dense(width, width // factor, rng=rng), decoder=Dense(width // factor, width, rng=rng))

    @property
    def code_width(self) -> int:
        return self.encoder.out_features


class SplitModel:
    """
    SentimentModel cut after layer `cut_index` (3 = after pooling, output [14, 32]).
    user:   layers[:cut] → Flatten → encoder          (f_user, W_user)
    server: decoder → Reshape(cut shape) → layers[cut:] (f_server, W_server)
    Both halves share layer objects with `model`, so the combined stack is the
    monolithic model with the codec folded in.
    """

    def __init__(self, model: SentimentModel, cut_index: int = settings.SPLIT_CUT_INDEX,
                 codec: CompressionCodec = None, seed: int = 0, seq_len: int = settings.MAX_SEQUENCE_LENGTH):
        if not 1 <= cut_index < len(model.layers) - 1:
            raise ShapeError(f"cut index {cut_index} outside the model")
        self.model = model
        self.cut_index = cut_index
        self.cut_shape: Tuple[int, ...] = Sequential(model.layers[:cut_index]).output_shape((seq_len,))
        width = int(np.prod(self.cut_shape))
        self.codec = codec or CompressionCodec.build(width, rng=derive_rng(seed, 'init', 'codec'))
        self.user = Sequential(model.layers[:cut_index] + [Flatten(), self.codec.encoder])
        self.server = Sequential([self.codec.decoder, Reshape(self.cut_shape)] + model.layers[cut_index:])

    @property
    def combined(self) -> Sequential:
        return Sequential(self.user.layers + self.server.layers)

    @property
    def smashed_width(self) -> int:
        return self.codec.code_width


def user_forward(split: SplitModel, x: np.ndarray) -> np.ndarray:
    """Compressed smashed data S = f_user(x; W_user): ids [B, 30] → [B, 112]"""
    x = np.atleast_2d(np.asarray(x))
    return split.user.predict(x)


def server_forward(split: SplitModel, s_hat: np.ndarray) -> np.ndarray:
    """ŷ = f_server(Ŝ; W_server) ∈ (0, 1), one per sample"""
    s_hat = np.atleast_2d(np.asarray(s_hat, dtype=np.float32))
    if s_hat.shape[1] != split.smashed_width:
        raise ShapeError(f"server expects [B, {split.smashed_width}], got {s_hat.shape}")
    return split.server.predict(s_hat)[:, 0]
