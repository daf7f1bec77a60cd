import math

from src.exceptions import ContractViolation, EnergyError
from src.models import ChannelConfig, EnergyReport, FadingDraw


def channel_capacity(cfg: ChannelConfig, f: float) -> float:
    """Shannon capacity C = B·log₂(1 + |f|²·SNR) in bit/s"""
    if f < 0:
        raise ContractViolation(f"fading magnitude must be >= 0, got {f}")
    if cfg.noiseless:
        return math.inf if f > 0 else 0.0
    return cfg.bandwidth_hz * math.log2(1.0 + f * f * cfg.snr_linear)


def energy_per_bit(cfg: ChannelConfig, f: float) -> float:
    """P / C in J/bit"""
    capacity = channel_capacity(cfg, f)
    if capacity <= 0:
        raise EnergyError(f"zero capacity (f={f}, snr_db={cfg.snr_db}); energy per bit undefined")
    return cfg.power_w / capacity


def comm_energy(payload_bits: int, cfg: ChannelConfig, f: float) -> float:
    """(P / C) × payload bits"""
    if payload_bits == 0:
        return 0.0
    return energy_per_bit(cfg, f) * payload_bits


def compute_energy_proxy(flops: float, joules_per_flop: float) -> float:
    if flops < 0 or joules_per_flop < 0:
        raise ContractViolation("FLOPs and joules per FLOP must be >= 0")
    return flops * joules_per_flop


def co2_proxy(energy_j: float, grams_per_joule: float) -> float:
    if energy_j < 0 or grams_per_joule < 0:
        raise ContractViolation("energy and carbon intensity must be >= 0")
    return energy_j * grams_per_joule


class EnergyPricer:
    """
    Prices each transmission: at the block's own fading draw ('per_block') or at
    the mean fading power E[f²] ('mean')
    """

    def __init__(self, cfg: ChannelConfig, pricing: str = 'per_block'):
        if pricing not in ('per_block', 'mean'):
            raise ContractViolation(f"unknown energy pricing {pricing!r}")
        self.cfg = cfg
        self.pricing = pricing

    def price_fading(self, fading: FadingDraw) -> float:
        return fading.f if self.pricing == 'per_block' else math.sqrt(self.cfg.mean_fading_power)

    def __call__(self, payload_bits: int, fading: FadingDraw) -> float:
        return comm_energy(payload_bits, self.cfg, self.price_fading(fading))

    def report(self, payload_bits: int, fading: FadingDraw, compute_energy_j: float = 0.0,
               grams_per_joule: float = 0.0) -> EnergyReport:
        f = self.price_fading(fading)
        capacity = channel_capacity(self.cfg, f)
        comm = comm_energy(payload_bits, self.cfg, f)
        return EnergyReport(
            payload_bits=payload_bits,
            capacity_bps=capacity,
            energy_per_bit=energy_per_bit(self.cfg, f),
            comm_energy_j=comm,
            compute_energy_j=compute_energy_j,
            co2_g=co2_proxy(comm + compute_energy_j, grams_per_joule),
        )
