import math

import numpy as np
import pytest

from src.channel import (WirelessLink, ber_awgn_bpsk, ber_rayleigh_bpsk, demodulate_bpsk, draw_fading,
                         draw_rayleigh, draw_rayleigh_many, estimate_ber, modulate_bpsk, transmit)
from src.codec import pack_bits
from src.exceptions import ChannelError, ContractViolation
from src.models import BitStream, ChannelConfig, FadingDraw


def random_stream(rng, n, header=0):
    return BitStream(bits=rng.integers(0, 2, size=n, dtype=np.uint8), header_bits=header)


class TestFading:
    @pytest.mark.parametrize('norm', [1.0, 2.0])
    def test_mean_power(self, norm, rng):
        f = draw_rayleigh_many(rng, 1_000_000, norm)
        assert np.mean(f ** 2) == pytest.approx(norm, rel=0.01)

    def test_single_draw_nonnegative(self, rng):
        assert all(draw_rayleigh(rng).f >= 0 for _ in range(100))

    def test_unknown_norm(self, rng):
        with pytest.raises(ContractViolation):
            draw_rayleigh(rng, 3.0)

    def test_no_fading_is_unity(self, rng):
        assert draw_fading(ChannelConfig(fading='none'), rng).f == 1.0


class TestBPSK:
    def test_mapping(self):
        np.testing.assert_array_equal(modulate_bpsk(np.array([1, 0, 1])), [1.0, -1.0, 1.0])

    def test_tie_decodes_to_one(self):
        np.testing.assert_array_equal(demodulate_bpsk(np.array([0.0, -0.2, 0.3]), 1.0), [1, 0, 1])

    def test_zero_fading_rejected(self):
        with pytest.raises(ChannelError):
            demodulate_bpsk(np.array([1.0]), 0.0)


class TestTransmit:
    def test_noiseless_identity(self, rng):
        stream = random_stream(rng, 5_000, header=32)
        out = transmit(stream, ChannelConfig(snr_db=math.inf), rng)
        np.testing.assert_array_equal(out.bits, stream.bits)
        assert out.header_bits == 32

    def test_header_never_corrupted(self, rng):
        stream = pack_bits(rng.integers(-128, 128, size=4_000), 8, scale=0.37)
        cfg = ChannelConfig(snr_db=-5.0, fading='none')
        for _ in range(20):
            out = transmit(stream, cfg, rng)
            np.testing.assert_array_equal(out.bits[:32], stream.bits[:32])
        assert np.count_nonzero(out.bits != stream.bits) > 0

    def test_seeded(self):
        stream = random_stream(np.random.default_rng(0), 10_000)
        cfg = ChannelConfig(snr_db=3.0)
        a = transmit(stream, cfg, np.random.default_rng(11))
        b = transmit(stream, cfg, np.random.default_rng(11))
        np.testing.assert_array_equal(a.bits, b.bits)

    def test_supplied_fading_used(self, rng):
        stream = random_stream(rng, 2_000)
        deep = transmit(stream, ChannelConfig(snr_db=10.0), rng, fading=FadingDraw(f=0.01))
        assert np.mean(deep.bits != stream.bits) > 0.3

    def test_empty_payload(self, rng):
        out = transmit(BitStream(bits=np.zeros(0, dtype=np.uint8)), ChannelConfig(snr_db=0.0), rng)
        assert len(out) == 0


class TestBitErrorRate:
    @pytest.mark.parametrize('snr_db', [0.0, 5.0])
    def test_awgn_matches_closed_form(self, snr_db):
        cfg = ChannelConfig(snr_db=snr_db, fading='none')
        empirical = estimate_ber(cfg, 2_000_000, np.random.default_rng(21))
        assert empirical == pytest.approx(float(ber_awgn_bpsk(snr_db)), rel=0.05)

    @pytest.mark.parametrize('snr_db', [10.0, 20.0])
    def test_rayleigh_matches_closed_form(self, snr_db):
        cfg = ChannelConfig(snr_db=snr_db, fading='rayleigh')
        empirical = estimate_ber(cfg, 4_000_000, np.random.default_rng(22), block_bits=8)
        assert empirical == pytest.approx(float(ber_rayleigh_bpsk(snr_db)), rel=0.05)

    def test_closed_forms(self):
        assert float(ber_awgn_bpsk(0.0)) == pytest.approx(0.078650, rel=1e-4)
        assert float(ber_rayleigh_bpsk(10.0)) == pytest.approx(0.023269, rel=1e-3)
        assert float(ber_rayleigh_bpsk(20.0)) == pytest.approx(0.0024814, rel=1e-3)

    def test_monotone_in_snr(self):
        cfg = [ChannelConfig(snr_db=s, fading='none') for s in (0.0, 2.0, 4.0, 6.0)]
        rates = [estimate_ber(c, 200_000, np.random.default_rng(5)) for c in cfg]
        assert rates == sorted(rates, reverse=True)

    def test_noiseless_is_zero(self):
        assert estimate_ber(ChannelConfig(snr_db=math.inf), 100_000) == 0.0

    def test_too_few_bits(self):
        with pytest.raises(ContractViolation):
            estimate_ber(ChannelConfig(), 99_999)


class TestWirelessLink:
    def test_ledger_accumulates(self, rng):
        link = WirelessLink(ChannelConfig(snr_db=20.0), pricer=lambda bits, fading: 1e-9 * bits, name='up')
        stream = random_stream(rng, 1_000, header=32)
        link.send(stream, rng)
        link.send(stream, rng)
        assert link.ledger.transmissions == 2
        assert link.ledger.bits == 2_000
        assert len(link.ledger.fading_draws) == 2
        assert link.ledger.energy_j == pytest.approx(2e-6)

    def test_without_pricer(self, rng):
        link = WirelessLink(ChannelConfig(snr_db=math.inf))
        out = link.send(random_stream(rng, 100), rng)
        assert link.ledger.energy_j == 0.0
        assert link.ledger.bit_errors == 0
        assert len(out) == 100
