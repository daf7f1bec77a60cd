import math

import numpy as np

from src.exceptions import ContractViolation
from src.models import FADING_NORMS, ChannelConfig, FadingDraw

NO_FADING = FadingDraw(f=1.0)


def draw_rayleigh(rng: np.random.Generator, norm: float = 1.0) -> FadingDraw:
    """f = √(X² + Y²) with X, Y ~ Normal(0, norm/2), so E[f²] = norm"""
    if norm not in FADING_NORMS:
        raise ContractViolation(f"fading power norm must be one of {FADING_NORMS}, got {norm}")
    x, y = rng.normal(0.0, math.sqrt(norm / 2.0), size=2)
    return FadingDraw(f=float(math.hypot(x, y)))


def draw_rayleigh_many(rng: np.random.Generator, count: int, norm: float = 1.0) -> np.ndarray:
    """Vectorised draw_rayleigh for Monte Carlo sweeps"""
    xy = rng.normal(0.0, math.sqrt(norm / 2.0), size=(count, 2))
    return np.hypot(xy[:, 0], xy[:, 1])


def draw_fading(cfg: ChannelConfig, rng: np.random.Generator) -> FadingDraw:
    """One block-fading draw; f ≡ 1 without fading"""
    if cfg.fading == 'none':
        return NO_FADING
    return draw_rayleigh(rng, cfg.fading_norm)
