from typing import Optional, Tuple

import numpy as np

from src.exceptions import CodecError
from src.models import SCALE_HEADER_BITS, VALID_BIT_WIDTHS, BitStream, QuantizedBlock, code_range


def payload_bits(count: int, bit_width: int, header: bool = True) -> int:
    """bits(n, b) = n·b (+ 32 for the scale field)"""
    return count * bit_width + (SCALE_HEADER_BITS if header else 0)


def _int_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    unsigned = values.astype(np.int64).astype(np.uint64) & np.uint64((1 << width) - 1)
    return ((unsigned[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()


def _bits_to_uint(bits: np.ndarray, width: int) -> np.ndarray:
    weights = (np.uint64(1) << np.arange(width - 1, -1, -1, dtype=np.uint64))
    return (bits.reshape(-1, width).astype(np.uint64) * weights).sum(axis=1, dtype=np.uint64)


def pack_bits(values: np.ndarray, bit_width: int, scale: Optional[float] = None) -> BitStream:
    """
    Two's-complement codes, most significant bit first. When `scale` is given it
    is prefixed as a 32-bit IEEE-754 field the channel treats as side information.
    """
    if not 1 <= bit_width <= 32:
        raise CodecError(f"bit width must be in [1, 32], got {bit_width}")
    values = np.asarray(values).ravel()
    lo, hi = code_range(bit_width)
    if values.size and (values.min() < lo or values.max() > hi):
        raise CodecError(f"values outside the signed {bit_width}-bit range [{lo}, {hi}]")
    body = _int_to_bits(values, bit_width)
    if scale is None:
        return BitStream(bits=body, header_bits=0)
    scale_word = np.array([np.float32(scale)]).view(np.uint32).astype(np.int64)
    header = _int_to_bits(scale_word, SCALE_HEADER_BITS)
    return BitStream(bits=np.concatenate([header, body]), header_bits=SCALE_HEADER_BITS)


def unpack_bits(stream: BitStream, bit_width: int, count: int) -> Tuple[np.ndarray, Optional[float]]:
    """Inverse of pack_bits: (values, scale or None)"""
    if len(stream.payload) != count * bit_width:
        raise CodecError(f"stream carries {len(stream.payload)} payload bits, expected {count * bit_width}")
    scale = None
    if stream.header_bits:
        word = _bits_to_uint(stream.bits[:SCALE_HEADER_BITS], SCALE_HEADER_BITS).astype(np.uint32)
        scale = float(word.view(np.float32)[0])
    unsigned = _bits_to_uint(stream.payload, bit_width).astype(np.int64)
    half = 1 << (bit_width - 1)
    values = np.where(unsigned >= half, unsigned - (1 << bit_width), unsigned)
    return values, scale


def encode_block(block: QuantizedBlock) -> BitStream:
    return pack_bits(block.q, block.bit_width, scale=block.scale)


def decode_block(stream: BitStream, bit_width: int, count: int) -> QuantizedBlock:
    if bit_width not in VALID_BIT_WIDTHS:
        raise CodecError(f"bit width must be one of {VALID_BIT_WIDTHS}, got {bit_width}")
    q, scale = unpack_bits(stream, bit_width, count)
    if scale is None:
        raise CodecError("stream carries no scale header")
    return QuantizedBlock(q=q, scale=scale, bit_width=bit_width)
