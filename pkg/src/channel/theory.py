import math

import numpy as np
from scipy.special import erfc


def q_function(x):
    """Gaussian tail probability Q(x)"""
    return 0.5 * erfc(np.asarray(x, dtype=np.float64) / math.sqrt(2.0))


def ber_awgn_bpsk(snr_db):
    """Q(√(2γ)) = ½·erfc(√γ)"""
    gamma = 10 ** (np.asarray(snr_db, dtype=np.float64) / 10)
    return 0.5 * erfc(np.sqrt(gamma))


def ber_rayleigh_bpsk(snr_db, fading_norm: float = 1.0):
    """Average BPSK error over Rayleigh fading: ½(1 − √(γ̄/(1+γ̄))), γ̄ = E[f²]·γ"""
    gamma = fading_norm * 10 ** (np.asarray(snr_db, dtype=np.float64) / 10)
    return 0.5 * (1.0 - np.sqrt(gamma / (1.0 + gamma)))
