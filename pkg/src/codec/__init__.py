from .bitstream import decode_block, encode_block, pack_bits, payload_bits, unpack_bits
from .quantizer import ZERO_BLOCK_SCALE, dequantize, max_code, quantize

__all__ = ['decode_block', 'encode_block', 'pack_bits', 'payload_bits', 'unpack_bits', 'ZERO_BLOCK_SCALE',
           'dequantize', 'max_code', 'quantize']
