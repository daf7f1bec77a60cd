import numpy as np

from src.exceptions import CodecError, NumericalError
from src.models import VALID_BIT_WIDTHS, QuantizedBlock, code_range

# Scale used for an all-zero block (max|W| == 0)
ZERO_BLOCK_SCALE = 1.0

# Ratios this many ulps from an integer are treated as that integer before ceil
_SNAP_ULPS = 64


def max_code(bit_width: int) -> int:
    return (1 << (bit_width - 1)) - 1


def _ceil_codes(ratio: np.ndarray) -> np.ndarray:
    """ceil that absorbs float rounding, so already-quantized values keep their codes"""
    nearest = np.round(ratio)
    tol = _SNAP_ULPS * np.finfo(np.float64).eps * np.maximum(np.abs(ratio), 1.0)
    return np.where(np.abs(ratio - nearest) <= tol, nearest, np.ceil(ratio))


def quantize(weights: np.ndarray, bit_width: int) -> QuantizedBlock:
    """
    Ceil-based symmetric quantization: S = max|W| / (2^(b-1) - 1), q = ceil(W / S).
    Computed in float64; codes are clipped into the signed b-bit range.
    """
    if bit_width not in VALID_BIT_WIDTHS:
        raise CodecError(f"bit width must be one of {VALID_BIT_WIDTHS}, got {bit_width}")
    w = np.asarray(weights, dtype=np.float64).ravel()
    if not np.isfinite(w).all():
        raise NumericalError("cannot quantize non-finite weights")
    peak = float(np.max(np.abs(w))) if w.size else 0.0
    if peak == 0.0:
        return QuantizedBlock(q=np.zeros(w.size, dtype=np.int64), scale=ZERO_BLOCK_SCALE, bit_width=bit_width)
    scale = peak / max_code(bit_width)
    lo, hi = code_range(bit_width)
    q = np.clip(_ceil_codes(w / scale), lo, hi).astype(np.int64)
    return QuantizedBlock(q=q, scale=scale, bit_width=bit_width)


def dequantize(block: QuantizedBlock) -> np.ndarray:
    """Ŵ = q · S in float64"""
    return block.q.astype(np.float64) * block.scale
