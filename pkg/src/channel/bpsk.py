import numpy as np

from src.exceptions import ChannelError


def modulate_bpsk(bits: np.ndarray) -> np.ndarray:
    """bit 1 → +1, bit 0 → −1 (unit symbol energy)"""
    return 2.0 * np.asarray(bits, dtype=np.float64) - 1.0


def demodulate_bpsk(received: np.ndarray, f) -> np.ndarray:
    """Coherent detection with known fading: threshold received/f at 0, ties → 1"""
    f = np.asarray(f, dtype=np.float64)
    if np.any(f == 0):
        raise ChannelError("cannot equalize a zero fading magnitude")
    return (np.asarray(received, dtype=np.float64) / f >= 0).astype(np.uint8)
