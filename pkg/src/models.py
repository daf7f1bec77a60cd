import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Sequence, Tuple

import numpy as np

from src.exceptions import CodecError, ConfigError, DatasetError

Tensor = np.ndarray

VALID_BIT_WIDTHS = (4, 8, 16, 32)
SCALE_HEADER_BITS = 32
FADING_MODES = ('none', 'rayleigh')
FADING_NORMS = (1.0, 2.0)


@dataclass(frozen=True)
class Corpus:
    """Labelled tweets: 0 for negative sentiment, 1 for positive"""

    records: List[Tuple[int, str]]
    skipped: int = 0

    def __post_init__(self):
        bad = [label for label, _ in self.records if label not in (0, 1)]
        if bad:
            raise DatasetError(f"labels must be 0 or 1, got {sorted(set(bad))[:5]}")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def labels(self) -> np.ndarray:
        return np.array([label for label, _ in self.records], dtype=np.int64)

    @property
    def texts(self) -> List[str]:
        return [text for _, text in self.records]


@dataclass(frozen=True)
class Vocab:
    """Token → id map. Id 0 is reserved for padding and out-of-vocabulary tokens"""

    token_to_id: Dict[str, int]
    max_words: int = 10_000
    id_to_token: Dict[int, str] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'id_to_token', {i: t for t, i in self.token_to_id.items()})

    @property
    def size(self) -> int:
        """Number of ids including the reserved 0"""
        return len(self.token_to_id) + 1

    def lookup(self, token: str) -> int:
        return self.token_to_id.get(token, 0)


@dataclass(frozen=True)
class EncodedSample:
    ids: np.ndarray
    label: int


@dataclass
class EncodedDataset:
    """Padded id sequences [M, T] with their labels [M]"""

    ids: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.ids = np.asarray(self.ids, dtype=np.int64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.ids.ndim != 2 or len(self.ids) != len(self.labels):
            raise DatasetError(f"ids {self.ids.shape} and labels {self.labels.shape} do not align")

    def __len__(self) -> int:
        return len(self.labels)

    def __getitem__(self, index: int) -> EncodedSample:
        return EncodedSample(ids=self.ids[index], label=int(self.labels[index]))

    def __iter__(self) -> Iterator[EncodedSample]:
        return (self[i] for i in range(len(self)))

    @property
    def seq_len(self) -> int:
        return self.ids.shape[1]

    def subset(self, indices: Sequence[int]) -> 'EncodedDataset':
        indices = np.asarray(indices, dtype=np.int64)
        return EncodedDataset(self.ids[indices], self.labels[indices])


@dataclass(frozen=True)
class QuantizedBlock:
    """Signed b-bit integer codes sharing one scale factor"""

    q: np.ndarray
    scale: float
    bit_width: int

    def __post_init__(self):
        if self.bit_width not in VALID_BIT_WIDTHS:
            raise CodecError(f"bit width must be one of {VALID_BIT_WIDTHS}, got {self.bit_width}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise CodecError(f"scale must be positive and finite, got {self.scale}")
        lo, hi = code_range(self.bit_width)
        if self.q.size and (self.q.min() < lo or self.q.max() > hi):
            raise CodecError(f"codes outside [{lo}, {hi}] for {self.bit_width}-bit block")

    def __len__(self) -> int:
        return int(self.q.size)


def code_range(bit_width: int) -> Tuple[int, int]:
    """Inclusive signed range of a two's-complement b-bit code"""
    half = 1 << (bit_width - 1)
    return -half, half - 1


@dataclass(frozen=True)
class BitStream:
    """Ordered bits (uint8 0/1). The first `header_bits` are side information
    the channel never corrupts."""

    bits: np.ndarray
    header_bits: int = 0

    def __len__(self) -> int:
        return int(self.bits.size)

    @property
    def payload(self) -> np.ndarray:
        return self.bits[self.header_bits:]

    def to_bytes(self) -> bytes:
        """Big-endian bit order, zero-padded to a whole byte"""
        return np.packbits(self.bits, bitorder='big').tobytes()

    @classmethod
    def from_bytes(cls, data: bytes, n_bits: int, header_bits: int = 0) -> 'BitStream':
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8), bitorder='big')[:n_bits]
        return cls(bits=bits, header_bits=header_bits)

    @classmethod
    def concat(cls, streams: Sequence['BitStream']) -> 'BitStream':
        if any(s.header_bits for s in streams[1:]):
            raise CodecError("only the first stream of a concatenation may carry a header")
        header = streams[0].header_bits if streams else 0
        bits = np.concatenate([s.bits for s in streams]) if streams else np.zeros(0, np.uint8)
        return cls(bits=bits, header_bits=header)


@dataclass(frozen=True)
class ChannelConfig:
    """Wireless link parameters (100 kHz, 1 mW by default)"""

    snr_db: float = 20.0
    bandwidth_hz: float = 100_000.0
    power_w: float = 1e-3
    fading: str = 'rayleigh'
    fading_granularity: str = 'per_block'
    fading_norm: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.bandwidth_hz > 0:
            raise ConfigError('bandwidth_hz', f"must be > 0, got {self.bandwidth_hz}")
        if not self.power_w > 0:
            raise ConfigError('power_w', f"must be > 0, got {self.power_w}")
        if self.fading not in FADING_MODES:
            raise ConfigError('fading', f"must be one of {FADING_MODES}, got {self.fading!r}")
        if self.fading_granularity != 'per_block':
            raise ConfigError('fading_granularity', "only 'per_block' is supported")
        if self.fading_norm not in FADING_NORMS:
            raise ConfigError('fading_norm', f"must be one of {FADING_NORMS}, got {self.fading_norm}")
        if math.isnan(self.snr_db) or self.snr_db == -math.inf:
            raise ConfigError('snr_db', f"must be a number or +inf, got {self.snr_db}")

    @property
    def noiseless(self) -> bool:
        return math.isinf(self.snr_db)

    @property
    def snr_linear(self) -> float:
        return math.inf if self.noiseless else 10 ** (self.snr_db / 10)

    @property
    def noise_variance(self) -> float:
        """Per-symbol noise variance σ² = 1/(2γ) under unit symbol energy"""
        return 0.0 if self.noiseless else 1.0 / (2.0 * self.snr_linear)

    @property
    def mean_fading_power(self) -> float:
        return self.fading_norm if self.fading == 'rayleigh' else 1.0


@dataclass(frozen=True)
class FadingDraw:
    f: float

    def __post_init__(self):
        if not self.f >= 0:
            raise ValueError(f"fading magnitude must be >= 0, got {self.f}")

    @property
    def power(self) -> float:
        return self.f * self.f


@dataclass(frozen=True)
class EnergyReport:
    payload_bits: int
    capacity_bps: float
    energy_per_bit: float
    comm_energy_j: float
    compute_energy_j: float = 0.0
    co2_g: float = 0.0

    @property
    def total_energy_j(self) -> float:
        return self.comm_energy_j + self.compute_energy_j


@dataclass
class RoundReport:
    """One communication cycle of a learning scheme"""

    scheme: str
    cycle: int
    train_loss: float
    test_accuracy: float
    uplink_bits: int = 0
    downlink_bits: int = 0
    comm_energy_j: float = 0.0
    compute_energy_j: float = 0.0
    co2_g: float = 0.0
    users: int = 1
    wall_time_s: float = 0.0
    recon_error: float = math.nan

    @property
    def total_bits(self) -> int:
        return self.uplink_bits + self.downlink_bits


@dataclass(frozen=True)
class PrivacyReport:
    per_user_errors: Tuple[float, ...]

    @property
    def mean_error(self) -> float:
        """Arithmetic average across users"""
        return float(np.mean(self.per_user_errors)) if self.per_user_errors else math.nan
