import time
from typing import List, Optional, Tuple

import numpy as np

from config import settings
from config.experiment import ExperimentConfig
from src.architecture import build_model
from src.channel import WirelessLink
from src.codec import pack_bits, unpack_bits
from src.models import BitStream, EncodedDataset, RoundReport
from src.nn import OptimizerState, lr_schedule
from src.privacy import PairSet, TransmittedArtifacts, evaluate_privacy, observable
from src.utils.logger import get_logger
from .training import (SchemeContext, evaluate, log_memory, resolve_workers, run_per_user, save_final_model,
                       train_epoch)

logger = get_logger(__name__)

TOKEN_BITS = 16
LABEL_BITS = settings.CL_LABEL_BITS
MAX_TOKEN_ID = settings.VOCAB_SIZE


def sample_bits(seq_len: int = settings.MAX_SEQUENCE_LENGTH) -> int:
    """Raw payload per sample: 16-bit token ids plus the repeated label field"""
    return seq_len * TOKEN_BITS + LABEL_BITS


def encode_samples(data: EncodedDataset) -> BitStream:
    """Per sample: token ids (16-bit, MSB first) followed by the label repeated LABEL_BITS times"""
    n, seq_len = data.ids.shape
    token_bits = pack_bits(data.ids, TOKEN_BITS).bits.reshape(n, seq_len * TOKEN_BITS)
    label_bits = np.repeat(data.labels.astype(np.uint8)[:, None], LABEL_BITS, axis=1)
    return BitStream(bits=np.concatenate([token_bits, label_bits], axis=1).ravel())


def decode_samples(stream: BitStream, n: int, seq_len: int = settings.MAX_SEQUENCE_LENGTH) -> EncodedDataset:
    """
    Inverse of encode_samples on possibly corrupted bits. Ids outside
    [0, MAX_TOKEN_ID] clamp to 0; a split label field decodes to its first bit.
    """
    rows = stream.bits.reshape(n, seq_len * TOKEN_BITS + LABEL_BITS)
    token_stream = BitStream(bits=rows[:, :seq_len * TOKEN_BITS].ravel())
    ids, _ = unpack_bits(token_stream, TOKEN_BITS, n * seq_len)
    ids = ids.reshape(n, seq_len)
    ids = np.where((ids < 0) | (ids > MAX_TOKEN_ID), 0, ids)
    label_field = rows[:, seq_len * TOKEN_BITS:]
    # two agreeing bits decode to that bit; a tie falls back to the first
    labels = label_field[:, 0].astype(np.int64)
    return EncodedDataset(ids, labels)


def upload_shard(shard: EncodedDataset, link: Optional[WirelessLink], rng: np.random.Generator,
                 batch_size: int) -> Tuple[EncodedDataset, int]:
    """Send a user's raw samples once, one transmission per batch; returns what the server received"""
    if link is None:
        return shard, 0
    received, bits = [], 0
    for start in range(0, len(shard), batch_size):
        chunk = shard.subset(np.arange(start, min(start + batch_size, len(shard))))
        stream = encode_samples(chunk)
        received.append(decode_samples(link.send(stream, rng), len(chunk), chunk.seq_len))
        bits += len(stream)
    return EncodedDataset(np.concatenate([r.ids for r in received]),
                          np.concatenate([r.labels for r in received])), bits


def cl_privacy_pairs(shards: List[EncodedDataset], received: List[EncodedDataset],
                     ctx: SchemeContext) -> List[PairSet]:
    """Per user: the token ids the server received for each attacked sample"""
    pairs = []
    for user, (sent, got) in enumerate(zip(shards, received)):
        rng = ctx.rng('privacy', user)
        attacked = np.sort(rng.permutation(len(sent))[:ctx.cfg.privacy_samples])
        view = observable('cl', TransmittedArtifacts(tokens=got.ids[attacked]))
        pairs.append(PairSet(view, sent.ids[attacked].astype(np.float64)))
    return pairs


def cl_train(cfg: ExperimentConfig, ctx: Optional[SchemeContext] = None) -> List[RoundReport]:
    """
    Users upload their raw encoded samples once; the server then trains the
    full model for K epochs on whatever arrived.
    """
    ctx = ctx or SchemeContext.from_config(cfg)
    shards = ctx.data.shards
    logger.info(f"🚀 CL: {len(shards)} users upload {sample_bits()} bits/sample, {cfg.cycles} cycles, "
                f"{cfg.snr_db} dB, fading={cfg.fading}")

    def upload(user: int) -> Tuple[EncodedDataset, int, float]:
        link = None if cfg.identity_transport else ctx.link(f'cl-uplink-{user}')
        data, bits = upload_shard(shards[user], link, ctx.rng('channel', user, 0, 'uplink'), cfg.batch_size)
        return data, bits, link.ledger.energy_j if link else 0.0

    uploads = run_per_user(upload, len(shards), resolve_workers(cfg))
    received = [u[0] for u in uploads]
    server_data = EncodedDataset(np.concatenate([r.ids for r in received]),
                                 np.concatenate([r.labels for r in received]))
    changed = int(np.count_nonzero((server_data.ids != np.concatenate([s.ids for s in shards])).any(axis=1)))
    logger.info(f"📡 CL upload done: {sum(u[1] for u in uploads)} bits, {changed} samples corrupted")

    model = build_model(cfg.seed, cfg.l2)
    optimizer = OptimizerState.for_params(model.param_list(), cfg.lr, cfg.momentum)
    reports = []
    server_compute = 0.0
    for k in range(cfg.cycles):
        started = time.perf_counter()
        optimizer.learning_rate = lr_schedule(cfg.lr, k, cfg.lr_decay, cfg.lr_step_epochs)
        loss = train_epoch(model, optimizer, server_data, cfg.batch_size, ctx.rng('shuffle', 'server', k))
        server_compute += ctx.compute_energy(model, len(server_data))
        comm = sum(u[2] for u in uploads) if k == 0 else 0.0
        report = RoundReport(
            scheme='cl',
            cycle=k + 1,
            train_loss=loss,
            test_accuracy=evaluate(model, ctx.data.test),
            uplink_bits=sum(u[1] for u in uploads) if k == 0 else 0,
            comm_energy_j=comm,
            co2_g=ctx.co2(comm),
            users=len(shards),
            wall_time_s=time.perf_counter() - started,
        )
        logger.info(f"🔁 CL cycle {report.cycle}/{cfg.cycles}: loss {loss:.4f}, accuracy {report.test_accuracy:.4f}")
        log_memory(f"CL cycle {report.cycle}")
        reports.append(report)
    logger.info(f"🖥️ CL server-side compute {server_compute:.4e} J (not counted as user energy)")

    if cfg.privacy:
        privacy = evaluate_privacy(cl_privacy_pairs(shards, received, ctx), cfg.privacy_epochs,
                                   ctx.rng('privacy', 'adversary'), cfg.privacy_batch_size)
        reports[-1].recon_error = privacy.mean_error
    save_final_model(cfg, model)
    return reports
