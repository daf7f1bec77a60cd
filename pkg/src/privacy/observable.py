import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse

from src.exceptions import ContractViolation

SCHEMES = ('cl', 'fl', 'sl')


@dataclass(frozen=True)
class MinMaxStats:
    """Per-dimension training-set range used for normalization"""

    lo: np.ndarray
    hi: np.ndarray


def fit_minmax(x: np.ndarray) -> MinMaxStats:
    x = np.asarray(x, dtype=np.float64)
    return MinMaxStats(lo=x.min(axis=0), hi=x.max(axis=0))


def normalize(x: np.ndarray, stats: Optional[MinMaxStats] = None) -> np.ndarray:
    """Min-max scaling to [0, 1] per dimension; constant dimensions map to 0"""
    x = np.asarray(x, dtype=np.float64)
    stats = stats or fit_minmax(x)
    span = stats.hi - stats.lo
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (x - stats.lo) / safe, 0.0)


class RandomProjection:
    """
    Fixed seeded sparse ±1 projection from weight space to `out_dim`
    (density 1/√in_dim, scaled to preserve norms in expectation)
    """

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        density = min(1.0, 1.0 / math.sqrt(in_dim))
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.matrix = scipy.sparse.random(
            in_dim, out_dim, density=density, format='csr', random_state=rng,
            data_rvs=lambda n: rng.choice([-1.0, 1.0], size=n),
        ) * (1.0 / math.sqrt(density * out_dim))

    def __call__(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        if x.shape[1] != self.in_dim:
            raise ContractViolation(f"projection expects width {self.in_dim}, got {x.shape[1]}")
        return np.asarray(self.matrix.T @ x.T).T


@dataclass
class TransmittedArtifacts:
    """What the server (and an eavesdropper) actually received, one row per sample"""

    tokens: Optional[np.ndarray] = None
    activations: Optional[np.ndarray] = None
    weight_deltas: Optional[np.ndarray] = None
    projection: Optional[RandomProjection] = None


def observable(scheme: str, artifacts: TransmittedArtifacts) -> np.ndarray:
    """
    The adversary's view (before normalization):
    cl → received token ids, fl → projected received weight deltas,
    sl → received compressed activations
    """
    if scheme not in SCHEMES:
        raise ContractViolation(f"scheme must be one of {SCHEMES}, got {scheme!r}")
    if scheme == 'cl':
        return np.asarray(artifacts.tokens, dtype=np.float64)
    if scheme == 'sl':
        return np.asarray(artifacts.activations, dtype=np.float64)
    if artifacts.projection is None:
        raise ContractViolation("fl observable needs a projection")
    return artifacts.projection(artifacts.weight_deltas)
