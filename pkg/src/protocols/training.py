from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, TypeVar

import numpy as np
import psutil

from config.experiment import ExperimentConfig
from src.architecture import save_checkpoint
from src.channel import WirelessLink
from src.codec import decode_block, dequantize, encode_block, quantize
from src.data import PreparedData, prepare_data
from src.energy import EnergyPricer, compute_energy_proxy, training_flops
from src.exceptions import ContractViolation
from src.models import ChannelConfig, EncodedDataset
from src.nn import OptimizerState, Sequential, bce_loss, clip_by_global_norm, sgd_momentum_step
from src.utils.logger import get_logger
from src.utils.seeding import derive_rng

logger = get_logger(__name__)

T = TypeVar('T')

EVAL_BATCH_SIZE = 1024


@dataclass
class SchemeContext:
    """Everything a scheme needs besides its own state: config, data, channel and pricing"""

    cfg: ExperimentConfig
    data: PreparedData
    channel: ChannelConfig
    pricer: EnergyPricer

    @classmethod
    def from_config(cls, cfg: ExperimentConfig) -> 'SchemeContext':
        channel = cfg.channel
        return cls(cfg=cfg, data=prepare_data(cfg), channel=channel,
                   pricer=EnergyPricer(channel, cfg.energy_pricing))

    def rng(self, *keys) -> np.random.Generator:
        return derive_rng(self.cfg.seed, *keys)

    def link(self, name: str) -> WirelessLink:
        return WirelessLink(self.channel, self.pricer, name)

    def compute_energy(self, stack: Sequential, samples: int) -> float:
        flops = training_flops(stack, (self.data.test.seq_len,), samples)
        return compute_energy_proxy(flops, self.cfg.joules_per_flop)

    def co2(self, energy_j: float) -> float:
        return energy_j * self.cfg.grams_per_joule


def resolve_workers(cfg: ExperimentConfig) -> int:
    """0 means one worker per physical core"""
    if cfg.workers:
        return cfg.workers
    return psutil.cpu_count(logical=False) or 1


def run_per_user(task: Callable[[int], T], users: int, workers: int = 1) -> List[T]:
    """Run task(user) for every user; results come back in user order"""
    if workers <= 1 or users == 1:
        return [task(user) for user in range(users)]
    with ThreadPoolExecutor(max_workers=min(workers, users)) as pool:
        return list(pool.map(task, range(users)))


def log_memory(tag: str):
    rss = psutil.Process().memory_info().rss / 2 ** 20
    logger.debug(f"{tag}: resident memory {rss:.1f} MiB")


def train_step(model: Sequential, state: OptimizerState, ids: np.ndarray, labels: np.ndarray,
               clip: Optional[float] = None) -> float:
    """One minibatch of SGD-momentum on BCE (+ L2 on regularized layers); returns the data loss"""
    model.zero_grad()
    preds, caches = model.forward(ids)
    loss, grad = bce_loss(preds, labels)
    model.backward(grad, caches)
    model.apply_weight_decay()
    grads = model.grad_list()
    if clip is not None:
        grads = clip_by_global_norm(grads, clip)
    sgd_momentum_step(model.param_list(), grads, state)
    return loss


def train_epoch(model: Sequential, state: OptimizerState, data: EncodedDataset, batch_size: int,
                rng: np.random.Generator, clip: Optional[float] = None) -> float:
    """One shuffled pass over `data`; returns the sample-weighted mean loss"""
    if len(data) == 0:
        raise ContractViolation("cannot train on an empty dataset")
    order = rng.permutation(len(data))
    total = 0.0
    for start in range(0, len(order), batch_size):
        idx = order[start:start + batch_size]
        total += train_step(model, state, data.ids[idx], data.labels[idx], clip) * len(idx)
    return total / len(data)


def evaluate(model: Sequential, test: EncodedDataset, batch_size: int = EVAL_BATCH_SIZE) -> float:
    """Fraction of correct predictions; predict 1 iff ŷ ≥ 0.5"""
    if len(test) == 0:
        raise ContractViolation("cannot evaluate on an empty test set")
    correct = 0
    for start in range(0, len(test), batch_size):
        preds = model.predict(test.ids[start:start + batch_size]).reshape(-1)
        correct += int(np.count_nonzero((preds >= 0.5).astype(np.int64) == test.labels[start:start + batch_size]))
    return correct / len(test)


def transport_tensor(x: np.ndarray, bit_width: int, link: Optional[WirelessLink],
                     rng: np.random.Generator) -> Tuple[np.ndarray, int]:
    """
    quantize → pack → transmit → unpack → dequantize.
    Returns the received tensor (same shape, float32) and the bits pushed onto the link.
    A missing link means identity transport: no codec, no channel, no bits.
    """
    if link is None:
        return x, 0
    block = quantize(x, bit_width)
    stream = encode_block(block)
    received = link.send(stream, rng)
    x_hat = dequantize(decode_block(received, bit_width, x.size))
    return x_hat.reshape(x.shape).astype(np.float32), len(stream)


def save_final_model(cfg: ExperimentConfig, model: Sequential):
    if cfg.checkpoint:
        save_checkpoint(model, cfg.checkpoint)
