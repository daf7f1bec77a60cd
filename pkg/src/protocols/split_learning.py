import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from config.experiment import ExperimentConfig
from src.architecture import SplitModel, build_model
from src.channel import WirelessLink
from src.exceptions import ContractViolation
from src.models import EncodedDataset, RoundReport
from src.nn import OptimizerState, bce_loss, clip_by_global_norm, lr_schedule, sgd_momentum_step
from src.privacy import PairSet, TransmittedArtifacts, evaluate_privacy, observable
from src.utils.logger import get_logger
from .training import SchemeContext, evaluate, log_memory, save_final_model, transport_tensor

logger = get_logger(__name__)


@dataclass
class SLState:
    """User half (layers up to the cut + encoder) and server half (decoder + the rest), each with its own optimizer"""

    split: SplitModel
    user_optimizer: OptimizerState
    server_optimizer: OptimizerState
    tau: float = 0.5
    cycle: int = 0
    # user -> (pass number, position in that pass's permutation)
    cursors: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    @classmethod
    def initial(cls, cfg: ExperimentConfig, split: Optional[SplitModel] = None) -> 'SLState':
        split = split or SplitModel(build_model(cfg.seed, cfg.l2), cut_index=cfg.cut_index, seed=cfg.seed)
        return cls(
            split=split,
            user_optimizer=OptimizerState.for_params(split.user.param_list(), cfg.lr, cfg.momentum),
            server_optimizer=OptimizerState.for_params(split.server.param_list(), cfg.lr, cfg.momentum),
            tau=cfg.clip,
        )


@dataclass
class _Links:
    uplink: Optional[WirelessLink]
    downlink: Optional[WirelessLink]
    uplink_rng: np.random.Generator
    downlink_rng: np.random.Generator
    uplink_bits: int = 0
    downlink_bits: int = 0

    @property
    def energy_j(self) -> float:
        return sum(link.ledger.energy_j for link in (self.uplink, self.downlink) if link is not None)


def cycle_indices(state: SLState, shard: EncodedDataset, budget: int, ctx: SchemeContext, user: int) -> np.ndarray:
    """Next `budget` sample indices; a fresh seeded permutation starts whenever a pass is exhausted"""
    n_pass, position = state.cursors.get(user, (0, 0))
    taken = []
    remaining = budget
    while remaining > 0:
        order = ctx.rng('shuffle', user, 'pass', n_pass).permutation(len(shard))
        chunk = order[position:position + remaining]
        taken.append(chunk)
        remaining -= len(chunk)
        position += len(chunk)
        if position >= len(shard):
            n_pass, position = n_pass + 1, 0
    state.cursors[user] = (n_pass, position)
    return np.concatenate(taken)


def sl_step(state: SLState, ids: np.ndarray, labels: np.ndarray, links: _Links, bit_width: int) -> float:
    """One batch of split training; returns the server-side loss"""
    split = state.split
    split.user.zero_grad()
    split.server.zero_grad()

    smashed, user_caches = split.user.forward(ids)
    smashed_hat, bits = transport_tensor(smashed, bit_width, links.uplink, links.uplink_rng)
    links.uplink_bits += bits

    preds, server_caches = split.server.forward(smashed_hat)
    loss, grad = bce_loss(preds, labels)
    activation_grad = split.server.backward(grad, server_caches)
    split.server.apply_weight_decay()
    server_grads = clip_by_global_norm(split.server.grad_list(), state.tau)
    sgd_momentum_step(split.server.param_list(), server_grads, state.server_optimizer)

    (activation_grad,) = clip_by_global_norm([activation_grad], state.tau)
    grad_hat, bits = transport_tensor(activation_grad, bit_width, links.downlink, links.downlink_rng)
    links.downlink_bits += bits

    split.user.backward(grad_hat, user_caches)
    split.user.apply_weight_decay()
    user_grads = clip_by_global_norm(split.user.grad_list(), state.tau)
    sgd_momentum_step(split.user.param_list(), user_grads, state.user_optimizer)
    return loss


def sl_cycle(state: SLState, shard: Union[EncodedDataset, Sequence[EncodedDataset]],
             ctx: SchemeContext) -> Tuple[SLState, RoundReport]:
    """
    One pass over each user's per-cycle sample budget. With several shards the
    users take turns on the shared model halves.
    """
    shards = [shard] if isinstance(shard, EncodedDataset) else list(shard)
    if not shards:
        raise ContractViolation("no shards to train on")
    cfg = ctx.cfg
    started = time.perf_counter()
    lr = lr_schedule(cfg.lr, state.cycle, cfg.lr_decay, cfg.lr_step_epochs)
    state.user_optimizer.learning_rate = lr
    state.server_optimizer.learning_rate = lr

    losses, samples, uplink_bits, downlink_bits, comm = [], 0, 0, 0, 0.0
    for user, data in enumerate(shards):
        budget = max(1, int(round(cfg.sl_cycle_fraction * len(data))))
        indices = cycle_indices(state, data, budget, ctx, user)
        identity = cfg.identity_transport
        links = _Links(
            uplink=None if identity else ctx.link(f'sl-uplink-{user}'),
            downlink=None if identity else ctx.link(f'sl-downlink-{user}'),
            uplink_rng=ctx.rng('channel', user, state.cycle, 'uplink'),
            downlink_rng=ctx.rng('channel', user, state.cycle, 'downlink'),
        )
        for start in range(0, len(indices), cfg.batch_size):
            idx = indices[start:start + cfg.batch_size]
            loss = sl_step(state, data.ids[idx], data.labels[idx], links, cfg.sl_transport_bits)
            losses.append((loss, len(idx)))
        samples += len(indices)
        uplink_bits += links.uplink_bits
        downlink_bits += links.downlink_bits
        comm += links.energy_j

    compute = ctx.compute_energy(state.split.user, samples)
    report = RoundReport(
        scheme='sl',
        cycle=state.cycle + 1,
        train_loss=sum(loss * n for loss, n in losses) / samples,
        test_accuracy=evaluate(state.split.combined, ctx.data.test),
        uplink_bits=uplink_bits,
        downlink_bits=downlink_bits,
        comm_energy_j=comm,
        compute_energy_j=compute,
        co2_g=ctx.co2(comm + compute),
        users=len(shards),
        wall_time_s=time.perf_counter() - started,
    )
    state.cycle += 1
    return state, report


def sl_privacy_pairs(state: SLState, ctx: SchemeContext) -> List[PairSet]:
    """Per user: the compressed activations the server received for each attacked sample"""
    cfg = ctx.cfg
    pairs = []
    for user, shard in enumerate(ctx.data.shards):
        rng = ctx.rng('privacy', user)
        attacked = shard.subset(np.sort(rng.permutation(len(shard))[:cfg.privacy_samples]))
        link = None if cfg.identity_transport else ctx.link(f'sl-eavesdrop-{user}')
        channel_rng = ctx.rng('channel', user, 'privacy')
        rows = []
        for start in range(0, len(attacked), cfg.batch_size):
            smashed = state.split.user.predict(attacked.ids[start:start + cfg.batch_size])
            received, _ = transport_tensor(smashed, cfg.sl_transport_bits, link, channel_rng)
            rows.append(received)
        view = observable('sl', TransmittedArtifacts(activations=np.concatenate(rows)))
        pairs.append(PairSet(view, attacked.ids.astype(np.float64)))
    return pairs


def sl_train(cfg: ExperimentConfig, ctx: Optional[SchemeContext] = None) -> List[RoundReport]:
    ctx = ctx or SchemeContext.from_config(cfg)
    state = SLState.initial(cfg)
    logger.info(f"🚀 SL: {cfg.users} user(s), {cfg.cycles} cycles, cut after layer {cfg.cut_index} "
                f"({state.split.smashed_width} values/sample), {cfg.snr_db} dB, fading={cfg.fading}")
    reports = []
    for _ in range(cfg.cycles):
        state, report = sl_cycle(state, ctx.data.shards, ctx)
        logger.info(f"🔁 SL cycle {report.cycle}/{cfg.cycles}: loss {report.train_loss:.4f}, "
                    f"accuracy {report.test_accuracy:.4f}, uplink {report.uplink_bits} bits")
        log_memory(f"SL cycle {report.cycle}")
        reports.append(report)
    if cfg.privacy:
        privacy = evaluate_privacy(sl_privacy_pairs(state, ctx), cfg.privacy_epochs, ctx.rng('privacy', 'adversary'),
                                   cfg.privacy_batch_size)
        reports[-1].recon_error = privacy.mean_error
    save_final_model(cfg, state.split.combined)
    return reports
