from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from config import settings
from src.exceptions import PrivacyError
from src.models import PrivacyReport
from src.nn import Dense, OptimizerState, Sequential, clip_by_global_norm, mse_loss, sgd_momentum_step
from src.utils.logger import get_logger
from .observable import fit_minmax, normalize

logger = get_logger(__name__)


@dataclass
class PairSet:
    """(observable, raw input) rows granted to one user's adversary"""

    observables: np.ndarray
    targets: np.ndarray

    def __post_init__(self):
        if len(self.observables) != len(self.targets):
            raise PrivacyError(f"{len(self.observables)} observables vs {len(self.targets)} targets")

    def __len__(self) -> int:
        return len(self.targets)

    def subset(self, idx: np.ndarray) -> 'PairSet':
        return PairSet(self.observables[idx], self.targets[idx])


@dataclass
class Adversary:
    """Dense autoencoder-style decoder: observable → reconstructed normalized input"""

    stack: Sequential
    optimizer: OptimizerState
    epochs_trained: int = 0

    def reconstruct(self, observables: np.ndarray) -> np.ndarray:
        return self.stack.predict(np.asarray(observables, dtype=np.float32))


def build_adversary(input_dim: int, output_dim: int = settings.MAX_SEQUENCE_LENGTH,
                    hidden: Sequence[int] = settings.ADVERSARY_HIDDEN, rng: np.random.Generator = None,
                    lr: float = settings.LEARNING_RATE, momentum: float = settings.MOMENTUM) -> Adversary:
    widths = [input_dim, *hidden]
    layers = [Dense(a, b, activation='relu', rng=rng) for a, b in zip(widths[:-1], widths[1:])]
    layers.append(Dense(widths[-1], output_dim, rng=rng))
    stack = Sequential(layers)
    return Adversary(stack=stack, optimizer=OptimizerState.for_params(stack.param_list(), lr, momentum))


def split_pairs(pairs: PairSet, rng: np.random.Generator, eval_fraction: float = 0.10) -> Tuple[PairSet, PairSet]:
    """Seeded disjoint train/eval split (90/10 by default)"""
    if len(pairs) < 2:
        raise PrivacyError(f"need at least 2 pairs to split, got {len(pairs)}")
    order = rng.permutation(len(pairs))
    n_eval = max(1, int(round(len(pairs) * eval_fraction)))
    return pairs.subset(order[n_eval:]), pairs.subset(order[:n_eval])


def train_adversary(pairs: PairSet, epochs: int, rng: np.random.Generator,
                    batch_size: int = settings.PRIVACY_BATCH_SIZE, adversary: Adversary = None,
                    patience: int = settings.ADVERSARY_PATIENCE) -> Adversary:
    """
    Minimize the per-pair squared error between reconstruction and target on the
    training pairs. Runs up to `epochs` epochs and stops early once the epoch loss
    stalls for `patience` epochs.
    """
    if len(pairs) == 0:
        raise PrivacyError("cannot train an adversary without pairs")
    adversary = adversary or build_adversary(pairs.observables.shape[1], pairs.targets.shape[1], rng=rng)
    x = pairs.observables.astype(np.float32)
    y = pairs.targets.astype(np.float32)
    stack = adversary.stack
    best, stale = np.inf, 0
    for epoch in range(epochs):
        order = rng.permutation(len(pairs))
        losses = []
        for start in range(0, len(order), batch_size):
            idx = order[start:start + batch_size]
            stack.zero_grad()
            out, caches = stack.forward(x[idx])
            loss, grad = mse_loss(out, y[idx], per_sample_sum=True)
            stack.backward(grad, caches)
            grads = clip_by_global_norm(stack.grad_list(), settings.ADVERSARY_CLIP)
            sgd_momentum_step(stack.param_list(), grads, adversary.optimizer)
            losses.append(loss)
        adversary.epochs_trained += 1
        epoch_loss = float(np.mean(losses))
        logger.debug(f"adversary epoch {epoch + 1}/{epochs}: loss {epoch_loss:.5f}")
        if epoch_loss < best * (1 - settings.ADVERSARY_MIN_IMPROVEMENT):
            best, stale = epoch_loss, 0
        else:
            stale += 1
            if stale >= patience:
                logger.debug(f"adversary stopped after {epoch + 1} epochs (loss {best:.5f})")
                break
    return adversary


def pair_error(adversary: Adversary, pairs: PairSet) -> float:
    """Mean over pairs of the mean-squared elementwise error"""
    if len(pairs) == 0:
        raise PrivacyError("cannot evaluate an adversary without pairs")
    recon = adversary.reconstruct(pairs.observables).astype(np.float64)
    return float(np.mean(np.mean((pairs.targets - recon) ** 2, axis=1)))


def reconstruction_error(adversaries: Sequence[Adversary], pairs: Sequence[PairSet]) -> PrivacyReport:
    """One adversary per user, each scored on its own evaluation pairs"""
    if not pairs or len(adversaries) != len(pairs):
        raise PrivacyError(f"{len(adversaries)} adversaries for {len(pairs)} pair sets")
    return PrivacyReport(per_user_errors=tuple(pair_error(a, p) for a, p in zip(adversaries, pairs)))


def evaluate_privacy(per_user_pairs: Sequence[PairSet], epochs: int, rng: np.random.Generator,
                     batch_size: int = settings.PRIVACY_BATCH_SIZE) -> PrivacyReport:
    """
    Per user: 90/10 split, min-max normalization fitted on the training pairs,
    adversary trained on train pairs and scored on eval pairs
    """
    if not per_user_pairs:
        raise PrivacyError("no users to evaluate")
    adversaries: List[Adversary] = []
    eval_sets: List[PairSet] = []
    for user, pairs in enumerate(per_user_pairs):
        train, held_out = split_pairs(pairs, rng)
        obs_stats, tgt_stats = fit_minmax(train.observables), fit_minmax(train.targets)
        train = PairSet(normalize(train.observables, obs_stats), normalize(train.targets, tgt_stats))
        held_out = PairSet(normalize(held_out.observables, obs_stats), normalize(held_out.targets, tgt_stats))
        adversaries.append(train_adversary(train, epochs, rng, batch_size))
        eval_sets.append(held_out)
        logger.info(f"🕵️ Adversary for user {user} trained on {len(train)} pairs")
    report = reconstruction_error(adversaries, eval_sets)
    logger.info(f"🕵️ Reconstruction error {report.mean_error:.4f} (per user {report.per_user_errors})")
    return report
