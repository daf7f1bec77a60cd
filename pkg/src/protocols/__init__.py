from .centralized import cl_privacy_pairs, cl_train, decode_samples, encode_samples, sample_bits, upload_shard
from .federated import FLState, LocalUpdate, fedavg, fl_privacy_pairs, fl_round, fl_train, local_training
from .split_learning import SLState, cycle_indices, sl_cycle, sl_privacy_pairs, sl_step, sl_train
from .training import (SchemeContext, evaluate, resolve_workers, run_per_user, train_epoch, train_step,
                       transport_tensor)

__all__ = ['cl_privacy_pairs', 'cl_train', 'decode_samples', 'encode_samples', 'sample_bits', 'upload_shard',
           'FLState', 'LocalUpdate', 'fedavg', 'fl_privacy_pairs', 'fl_round', 'fl_train', 'local_training',
           'SLState', 'cycle_indices', 'sl_cycle', 'sl_privacy_pairs', 'sl_step', 'sl_train', 'SchemeContext',
           'evaluate', 'resolve_workers', 'run_per_user', 'train_epoch', 'train_step', 'transport_tensor']
