import numpy as np
import pytest

from src.codec import (ZERO_BLOCK_SCALE, decode_block, dequantize, encode_block, pack_bits, payload_bits, quantize,
                       unpack_bits)
from src.exceptions import CodecError, NumericalError
from src.models import BitStream, QuantizedBlock

BIT_WIDTHS = (4, 8, 16, 32)


class TestQuantize:
    def test_hand_example(self):
        block = quantize(np.array([0.5, -1.0, 0.25]), 8)
        assert block.scale == pytest.approx(1 / 127)
        np.testing.assert_array_equal(block.q, [64, -127, 32])

    def test_dequantize_hand_example(self):
        block = QuantizedBlock(q=np.array([64, -127, 32]), scale=1 / 127, bit_width=8)
        np.testing.assert_allclose(dequantize(block), [0.50394, -1.0, 0.25197], atol=1e-5)

    def test_all_zero_block(self):
        block = quantize(np.zeros(5), 8)
        assert block.scale == ZERO_BLOCK_SCALE
        np.testing.assert_array_equal(dequantize(block), np.zeros(5))

    @pytest.mark.parametrize('bits', BIT_WIDTHS)
    def test_ceil_error_bound(self, bits, rng):
        w = rng.normal(size=100_000)
        block = quantize(w, bits)
        error = dequantize(block) - w
        slack = 1e-12 * np.abs(w).max()
        assert np.all(error >= -slack)
        assert np.all(error < block.scale + slack)

    @pytest.mark.parametrize('bits', BIT_WIDTHS)
    def test_codes_in_range(self, bits, rng):
        block = quantize(rng.uniform(-3, 3, size=1000), bits)
        half = 1 << (bits - 1)
        assert block.q.min() >= -half and block.q.max() <= half - 1

    @pytest.mark.parametrize('bits', BIT_WIDTHS)
    def test_requantize_is_stable(self, bits, rng):
        block = quantize(rng.normal(size=500), bits)
        again = quantize(dequantize(block), bits)
        np.testing.assert_array_equal(again.q, block.q)

    def test_grid_values_keep_their_codes(self):
        codes = np.arange(-127, 128)
        block = quantize(codes * 0.1, 8)
        np.testing.assert_array_equal(block.q, codes)

    @pytest.mark.parametrize('bits', BIT_WIDTHS)
    def test_requantize_twice_is_stable(self, bits, rng):
        first = quantize(rng.uniform(-2, 2, size=2000) * 1e-3, bits)
        second = quantize(dequantize(first), bits)
        third = quantize(dequantize(second), bits)
        np.testing.assert_array_equal(second.q, first.q)
        np.testing.assert_array_equal(third.q, first.q)

    def test_32bit_precision(self, rng):
        w = rng.uniform(-1, 1, size=10_000)
        np.testing.assert_allclose(dequantize(quantize(w, 32)), w, rtol=1e-6, atol=1e-9)

    def test_fidelity_improves_with_width(self, rng):
        wins = 0
        for _ in range(100):
            w = rng.normal(size=256)
            errors = [np.mean((dequantize(quantize(w, b)) - w) ** 2) for b in BIT_WIDTHS]
            wins += all(a >= b for a, b in zip(errors, errors[1:]))
        assert wins >= 99

    def test_rejects_bad_width(self):
        with pytest.raises(CodecError):
            quantize(np.ones(3), 3)

    def test_rejects_non_finite(self):
        with pytest.raises(NumericalError):
            quantize(np.array([1.0, np.nan]), 8)


class TestPacking:
    def test_minus_one_four_bits(self):
        stream = pack_bits(np.array([-1]), 4)
        np.testing.assert_array_equal(stream.bits, [1, 1, 1, 1])

    def test_msb_first(self):
        np.testing.assert_array_equal(pack_bits(np.array([5]), 4).bits, [0, 1, 0, 1])

    @pytest.mark.parametrize('bits', BIT_WIDTHS)
    def test_unpack_inverts_pack(self, bits, rng):
        half = 1 << (bits - 1)
        values = rng.integers(-half, half, size=300)
        out, scale = unpack_bits(pack_bits(values, bits), bits, 300)
        np.testing.assert_array_equal(out, values)
        assert scale is None

    def test_out_of_range(self):
        with pytest.raises(CodecError):
            pack_bits(np.array([8]), 4)

    def test_scale_header(self):
        stream = pack_bits(np.array([1, -2]), 8, scale=0.125)
        assert len(stream) == 2 * 8 + 32
        assert stream.header_bits == 32
        _, scale = unpack_bits(stream, 8, 2)
        assert scale == 0.125

    def test_block_roundtrip(self, rng):
        block = quantize(rng.normal(size=64), 16)
        decoded = decode_block(encode_block(block), 16, 64)
        np.testing.assert_array_equal(decoded.q, block.q)
        assert decoded.scale == pytest.approx(block.scale, rel=1e-7)

    def test_full_model_payload(self):
        assert payload_bits(89_673, 8, header=False) == 717_384
        assert payload_bits(89_673, 8) == 717_416

    def test_wrong_length_rejected(self):
        with pytest.raises(CodecError):
            unpack_bits(pack_bits(np.array([1, 2, 3]), 8), 8, 4)

    def test_bytes_big_endian(self):
        stream = BitStream(bits=np.array([1, 0, 0, 0, 0, 0, 0, 1, 1], dtype=np.uint8))
        assert stream.to_bytes() == bytes([0x81, 0x80])
        np.testing.assert_array_equal(BitStream.from_bytes(stream.to_bytes(), 9).bits, stream.bits)

    def test_concat_keeps_leading_header(self):
        head = pack_bits(np.array([1]), 8, scale=1.0)
        tail = pack_bits(np.array([2]), 8)
        joined = BitStream.concat([head, tail])
        assert joined.header_bits == 32 and len(joined) == 48
        with pytest.raises(CodecError):
            BitStream.concat([tail, head])
