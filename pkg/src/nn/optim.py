import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from src.exceptions import ContractViolation, NumericalError


@dataclass
class OptimizerState:
    """SGD with momentum: v ← μ·v + η·g, then w ← w − v"""

    learning_rate: float
    momentum: float
    velocity: List[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ContractViolation(f"learning rate must be > 0, got {self.learning_rate}")
        if not 0 <= self.momentum < 1:
            raise ContractViolation(f"momentum must satisfy 0 <= μ < 1, got {self.momentum}")

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray], learning_rate: float, momentum: float) -> 'OptimizerState':
        return cls(learning_rate, momentum, [np.zeros_like(p) for p in params])


def sgd_momentum_step(params: Sequence[np.ndarray], grads: Sequence[np.ndarray],
                      state: OptimizerState) -> Tuple[Sequence[np.ndarray], OptimizerState]:
    """In-place update of caller-owned params and velocities"""
    if len(params) != len(grads) or len(params) != len(state.velocity):
        raise ContractViolation(f"{len(params)} params, {len(grads)} grads, {len(state.velocity)} velocities")
    for g in grads:
        if not np.isfinite(g).all():
            raise NumericalError("non-finite gradient reached the optimizer")
    lr = np.asarray(state.learning_rate, dtype=params[0].dtype if params else np.float32)
    mu = np.asarray(state.momentum, dtype=lr.dtype)
    for w, g, v in zip(params, grads, state.velocity):
        if w.shape != g.shape or w.shape != v.shape:
            raise ContractViolation(f"shape mismatch: param {w.shape}, grad {g.shape}, velocity {v.shape}")
        v *= mu
        v += lr * g
        w -= v
    return params, state


def global_norm(grads: Sequence[np.ndarray]) -> float:
    return math.sqrt(sum(float(np.sum(np.square(g, dtype=np.float64))) for g in grads))


# Norms within this relative slack of τ count as "at or below τ", so clipping an
# already clipped gradient is a bitwise no-op despite float rounding.
_CLIP_SLACK = 1e-6


def clip_by_global_norm(grads: Sequence[np.ndarray], tau: float) -> List[np.ndarray]:
    if not tau > 0:
        raise ContractViolation(f"clip threshold must be > 0, got {tau}")
    norm = global_norm(grads)
    if norm <= tau * (1 + _CLIP_SLACK):
        return list(grads)
    scale = tau / norm
    return [(g * scale).astype(g.dtype) for g in grads]


def lr_schedule(initial_lr: float, epoch_index: int, decay: float = 0.9, step_epochs: int = 5) -> float:
    """Reduce by 10% every 5 epochs"""
    if epoch_index < 0:
        raise ContractViolation(f"epoch index must be >= 0, got {epoch_index}")
    return initial_lr * decay ** (epoch_index // step_epochs)
