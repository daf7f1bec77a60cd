from .adversary import (Adversary, PairSet, build_adversary, evaluate_privacy, pair_error, reconstruction_error,
                        split_pairs, train_adversary)
from .observable import MinMaxStats, RandomProjection, TransmittedArtifacts, fit_minmax, normalize, observable

__all__ = ['Adversary', 'PairSet', 'build_adversary', 'evaluate_privacy', 'pair_error', 'reconstruction_error',
           'split_pairs', 'train_adversary', 'MinMaxStats', 'RandomProjection', 'TransmittedArtifacts',
           'fit_minmax', 'normalize', 'observable']
