import time
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config import settings
from config.experiment import ExperimentConfig
from src.architecture import SentimentModel, build_model, flatten_params, unflatten_params
from src.exceptions import ContractViolation
from src.models import EncodedDataset, RoundReport
from src.nn import OptimizerState, bce_loss, lr_schedule
from src.privacy import PairSet, RandomProjection, TransmittedArtifacts, evaluate_privacy, observable
from src.utils.logger import get_logger
from .training import (SchemeContext, evaluate, log_memory, resolve_workers, run_per_user, save_final_model,
                       train_epoch, transport_tensor)

logger = get_logger(__name__)


@dataclass
class FLState:
    """
    Global model W̄ (held in `model`) plus what the users last produced.
    At the start of a cycle every user copies W̄, or its own received copy
    of W̄ when the downlink is impaired.
    """

    model: SentimentModel
    users: int
    local_epochs: int
    bit_width: int
    cycle: int = 0
    user_params: Optional[List[np.ndarray]] = None
    user_start: Optional[List[np.ndarray]] = None

    @classmethod
    def initial(cls, cfg: ExperimentConfig, model: Optional[SentimentModel] = None) -> 'FLState':
        model = model or build_model(cfg.seed, cfg.l2)
        return cls(model=model, users=cfg.users, local_epochs=cfg.local_epochs, bit_width=cfg.quant_bits)

    @property
    def global_params(self) -> np.ndarray:
        return flatten_params(self.model)


@dataclass(frozen=True)
class LocalUpdate:
    params: np.ndarray
    received: np.ndarray
    loss: float
    samples: int
    uplink_bits: int
    uplink_energy_j: float


def fedavg(vectors: Sequence[np.ndarray]) -> np.ndarray:
    """Arithmetic mean of the users' dequantized weight vectors"""
    if not vectors:
        raise ContractViolation("nothing to aggregate")
    return np.mean(np.stack([np.asarray(v, dtype=np.float64) for v in vectors]), axis=0).astype(np.float32)


def local_training(state: FLState, start: np.ndarray, shard: EncodedDataset, ctx: SchemeContext,
                   user: int) -> Tuple[SentimentModel, float, int]:
    """J epochs of minibatch SGD-momentum from `start`; lr indexed by the global epoch count"""
    cfg = ctx.cfg
    model = unflatten_params(state.model.clone(), start)
    optimizer = OptimizerState.for_params(model.param_list(), cfg.lr, cfg.momentum)
    rng = ctx.rng('shuffle', user, state.cycle)
    loss = float('nan')
    for epoch in range(state.local_epochs):
        optimizer.learning_rate = lr_schedule(cfg.lr, state.cycle * state.local_epochs + epoch,
                                              cfg.lr_decay, cfg.lr_step_epochs)
        loss = train_epoch(model, optimizer, shard, cfg.batch_size, rng)
    return model, loss, state.local_epochs * len(shard)


def fl_round(state: FLState, shards: Sequence[EncodedDataset], ctx: SchemeContext) -> Tuple[FLState, RoundReport]:
    """
    One FedAvg cycle: local training, quantized uplink over the channel,
    server-side dequantization and averaging, then the broadcast.
    """
    if len(shards) != state.users:
        raise ContractViolation(f"{len(shards)} shards for {state.users} users")
    cfg = ctx.cfg
    started = time.perf_counter()
    global_params = state.global_params
    starts = state.user_start or [global_params] * state.users

    def run_user(user: int) -> LocalUpdate:
        model, loss, samples = local_training(state, starts[user], shards[user], ctx, user)
        params = flatten_params(model)
        link = None if cfg.identity_transport else ctx.link(f'fl-uplink-{user}')
        received, bits = transport_tensor(params, state.bit_width, link,
                                          ctx.rng('channel', user, state.cycle, 'uplink'))
        return LocalUpdate(params=params, received=received, loss=loss, samples=samples, uplink_bits=bits,
                           uplink_energy_j=link.ledger.energy_j if link else 0.0)

    updates = run_per_user(run_user, state.users, resolve_workers(cfg))
    new_global = fedavg([u.received for u in updates])
    unflatten_params(state.model, new_global)
    state.user_params = [u.params for u in updates]

    downlink_bits, downlink_energy = 0, 0.0
    if cfg.downlink == 'impaired' and not cfg.identity_transport:
        state.user_start = []
        for user in range(state.users):
            link = ctx.link(f'fl-downlink-{user}')
            received, bits = transport_tensor(new_global, state.bit_width, link,
                                              ctx.rng('channel', user, state.cycle, 'downlink'))
            state.user_start.append(received)
            downlink_bits += bits
            downlink_energy += link.ledger.energy_j
    else:
        state.user_start = None

    comm = sum(u.uplink_energy_j for u in updates) + downlink_energy
    compute = sum(ctx.compute_energy(state.model, u.samples) for u in updates)
    report = RoundReport(
        scheme='fl',
        cycle=state.cycle + 1,
        train_loss=float(np.mean([u.loss for u in updates])),
        test_accuracy=evaluate(state.model, ctx.data.test),
        uplink_bits=sum(u.uplink_bits for u in updates),
        downlink_bits=downlink_bits,
        comm_energy_j=comm,
        compute_energy_j=compute,
        co2_g=ctx.co2(comm + compute),
        users=state.users,
        wall_time_s=time.perf_counter() - started,
    )
    state.cycle += 1
    return state, report


def fl_privacy_pairs(state: FLState, ctx: SchemeContext) -> List[PairSet]:
    """
    Per user: for each attacked sample, the single-step update −η·∇ℓ at W̄ as the
    server would receive it (quantized and sent over the uplink), projected to a
    fixed lower dimension.
    """
    cfg = ctx.cfg
    model = state.model
    projection = RandomProjection(model.param_count, settings.FL_PROJECTION_DIM, ctx.rng('projection'))
    pairs = []
    for user, shard in enumerate(ctx.data.shards):
        rng = ctx.rng('privacy', user)
        attacked = shard.subset(np.sort(rng.permutation(len(shard))[:cfg.privacy_samples]))
        link = None if cfg.identity_transport else ctx.link(f'fl-eavesdrop-{user}')
        channel_rng = ctx.rng('channel', user, 'privacy')
        rows = []
        for i in range(len(attacked)):
            model.zero_grad()
            preds, caches = model.forward(attacked.ids[i:i + 1])
            _, grad = bce_loss(preds, attacked.labels[i:i + 1])
            model.backward(grad, caches)
            model.apply_weight_decay()
            # per-sample single-step delta stands in for W_i − W̄ so each view pairs with one input
            delta = -cfg.lr * np.concatenate([g.ravel() for g in model.grad_list()])
            received, _ = transport_tensor(delta.astype(np.float32), state.bit_width, link, channel_rng)
            artifacts = TransmittedArtifacts(weight_deltas=received[None], projection=projection)
            rows.append(observable('fl', artifacts)[0])
        model.zero_grad()
        pairs.append(PairSet(np.stack(rows), attacked.ids.astype(np.float64)))
    return pairs


def fl_train(cfg: ExperimentConfig, ctx: Optional[SchemeContext] = None) -> List[RoundReport]:
    """K cycles of fl_round, each evaluated on the shared test set"""
    ctx = ctx or SchemeContext.from_config(cfg)
    state = FLState.initial(cfg)
    logger.info(f"🚀 FL: {cfg.users} users, {cfg.cycles} cycles × {cfg.local_epochs} epochs, "
                f"Q{cfg.quant_bits}, {cfg.snr_db} dB, fading={cfg.fading}")
    reports = []
    for _ in range(cfg.cycles):
        state, report = fl_round(state, ctx.data.shards, ctx)
        logger.info(f"🔁 FL cycle {report.cycle}/{cfg.cycles}: loss {report.train_loss:.4f}, "
                    f"accuracy {report.test_accuracy:.4f}, uplink {report.uplink_bits} bits")
        log_memory(f"FL cycle {report.cycle}")
        reports.append(report)
    if cfg.privacy:
        privacy = evaluate_privacy(fl_privacy_pairs(state, ctx), cfg.privacy_epochs, ctx.rng('privacy', 'adversary'),
                                   cfg.privacy_batch_size)
        reports[-1].recon_error = privacy.mean_error
    save_final_model(cfg, state.model)
    return reports
