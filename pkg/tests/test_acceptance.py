"""
Desk-scale learning and privacy behaviour (20k synthetic tweets). Minutes each;
run with `pytest tests/ --runslow`.
"""
import math

import numpy as np
import pytest

from src.protocols import cl_train, fl_train, sl_train

# 20 dB block Rayleigh, small batches; SL sees a fifth of its shard per cycle
DESK = dict(synthetic_records=20_000, batch_size=64, snr_db=20.0, fading='rayleigh', sl_cycle_fraction=0.2)


def final_accuracy(reports) -> float:
    return reports[-1].test_accuracy


@pytest.mark.slow
class TestLearning:
    def test_all_schemes_learn_and_agree(self, make_config):
        cl = final_accuracy(cl_train(make_config(scheme='cl', cycles=10, **DESK)))
        fl = final_accuracy(fl_train(make_config(scheme='fl', cycles=7, quant_bits=8, **DESK)))
        sl = final_accuracy(sl_train(make_config(scheme='sl', cycles=50, **DESK)))
        assert min(cl, fl, sl) >= 0.70
        assert max(cl, fl, sl) - min(cl, fl, sl) <= 0.03

    def test_quantization_ablation(self, make_config):
        matched = dict(DESK, fading='none')
        accuracy = {bits: final_accuracy(fl_train(make_config(scheme='fl', cycles=7, quant_bits=bits, **matched)))
                    for bits in (4, 8, 16)}
        assert accuracy[8] - accuracy[4] >= 0.15
        assert abs(accuracy[16] - accuracy[8]) <= 0.02

    def test_snr_sweep_shape(self, make_config):
        levels = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)
        means = []
        for snr_db in levels:
            point = dict(DESK, snr_db=snr_db)
            runs = [final_accuracy(cl_train(make_config(scheme='cl', cycles=5, seed=seed, **point)))
                    for seed in range(3)]
            means.append(float(np.mean(runs)))
        assert all(b >= a for a, b in zip(means[:-2], means[1:-1]))
        assert means[-1] - means[-2] <= 0.02

    def test_fading_costs_little_at_20db(self, make_config):
        clean = final_accuracy(cl_train(make_config(scheme='cl', cycles=5, **dict(DESK, snr_db=math.inf))))
        faded = final_accuracy(cl_train(make_config(scheme='cl', cycles=5, **DESK)))
        assert clean - faded <= 0.03


@pytest.mark.slow
class TestPrivacy:
    ATTACK = dict(synthetic_records=6_000, batch_size=64, privacy=True, privacy_samples=500, privacy_epochs=300)

    def test_noiseless_tokens_are_fully_recovered(self, make_config):
        cfg = make_config(scheme='cl', cycles=1, snr_db=math.inf, **dict(self.ATTACK, privacy_samples=1000))
        assert cl_train(cfg)[-1].recon_error <= 1e-3

    def test_ordering_across_seeds(self, make_config):
        errors = {'cl': [], 'fl': [], 'sl': []}
        for seed in range(10):
            errors['cl'].append(cl_train(make_config(scheme='cl', cycles=1, seed=seed, **self.ATTACK))[-1].recon_error)
            errors['fl'].append(fl_train(make_config(scheme='fl', cycles=1, local_epochs=1, seed=seed,
                                                     **self.ATTACK))[-1].recon_error)
            errors['sl'].append(sl_train(make_config(scheme='sl', cycles=10, seed=seed,
                                                     **self.ATTACK))[-1].recon_error)
        ordered = sum(sl > fl > cl for cl, fl, sl in zip(errors['cl'], errors['fl'], errors['sl']))
        assert ordered >= 8
        assert np.median(errors['sl']) >= 2 * np.median(errors['fl'])
