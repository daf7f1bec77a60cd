from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from src.exceptions import ContractViolation
from src.models import BitStream, ChannelConfig, FadingDraw
from src.utils.logger import get_logger
from .bpsk import demodulate_bpsk, modulate_bpsk
from .fading import draw_fading, draw_rayleigh_many

logger = get_logger(__name__)

MIN_BER_BITS = 100_000


def transmit(payload: BitStream, cfg: ChannelConfig, rng: np.random.Generator,
             fading: Optional[FadingDraw] = None) -> BitStream:
    """
    y = f·z + n over BPSK with one fading draw for the whole stream (block fading),
    n ~ Normal(0, 1/(2γ)). Header bits are side information and pass untouched.
    The fading draw is taken from rng unless supplied.
    """
    if fading is None:
        fading = draw_fading(cfg, rng)
    body = payload.payload
    if cfg.noiseless or body.size == 0:
        return BitStream(bits=payload.bits.copy(), header_bits=payload.header_bits)
    symbols = modulate_bpsk(body)
    noise = rng.normal(0.0, np.sqrt(cfg.noise_variance), size=body.size)
    received = demodulate_bpsk(fading.f * symbols + noise, fading.f)
    bits = np.concatenate([payload.bits[:payload.header_bits], received])
    return BitStream(bits=bits, header_bits=payload.header_bits)


def estimate_ber(cfg: ChannelConfig, n_bits: int, rng: Optional[np.random.Generator] = None,
                 block_bits: int = 8) -> float:
    """
    Empirical bit error rate over a random payload. With Rayleigh fading the
    payload is cut into blocks of `block_bits`, each with its own fading draw,
    so the estimate averages over the fading distribution.
    """
    if n_bits < MIN_BER_BITS:
        raise ContractViolation(f"BER estimation needs at least {MIN_BER_BITS} bits, got {n_bits}")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    bits = rng.integers(0, 2, size=n_bits, dtype=np.uint8)
    if cfg.noiseless:
        return 0.0
    if cfg.fading == 'none':
        f = np.ones(n_bits)
    else:
        n_blocks = -(-n_bits // block_bits)
        f = np.repeat(draw_rayleigh_many(rng, n_blocks, cfg.fading_norm), block_bits)[:n_bits]
    noise = rng.normal(0.0, np.sqrt(cfg.noise_variance), size=n_bits)
    received = demodulate_bpsk(f * modulate_bpsk(bits) + noise, f)
    return float(np.count_nonzero(received != bits)) / n_bits


@dataclass
class LinkLedger:
    """Running totals for one direction of one link"""

    transmissions: int = 0
    bits: int = 0
    bit_errors: int = 0
    energy_j: float = 0.0
    fading_draws: list = field(default_factory=list)


class WirelessLink:
    """
    One user↔server direction: draws the block fading, pushes the stream through
    transmit() and prices it with the energy model.
    """

    def __init__(self, cfg: ChannelConfig, pricer=None, name: str = 'link'):
        self.cfg = cfg
        self.pricer = pricer
        self.name = name
        self.ledger = LinkLedger()

    def send(self, payload: BitStream, rng: np.random.Generator) -> BitStream:
        fading = draw_fading(self.cfg, rng)
        received = transmit(payload, self.cfg, rng, fading=fading)
        self.ledger.transmissions += 1
        self.ledger.bits += len(payload)
        self.ledger.bit_errors += int(np.count_nonzero(received.bits != payload.bits))
        self.ledger.fading_draws.append(fading.f)
        if self.pricer is not None:
            self.ledger.energy_j += self.pricer(len(payload), fading)
        logger.debug(f"📡 {self.name}: {len(payload)} bits, f={fading.f:.3f}, "
                     f"errors so far {self.ledger.bit_errors}")
        return received
