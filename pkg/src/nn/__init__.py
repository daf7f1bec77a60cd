from .base import ForwardCache, Layer
from .layers import (Conv1D, Dense, Embedding, Flatten, LSTM, MaxPool1D, Reshape, Sigmoid, layer_backward,
                     layer_forward)
from .losses import bce_loss, mse_loss
from .optim import OptimizerState, clip_by_global_norm, global_norm, lr_schedule, sgd_momentum_step
from .sequential import Sequential

__all__ = [
    'ForwardCache', 'Layer', 'Conv1D', 'Dense', 'Embedding', 'Flatten', 'LSTM', 'MaxPool1D', 'Reshape', 'Sigmoid',
    'layer_forward', 'layer_backward', 'bce_loss', 'mse_loss', 'OptimizerState', 'clip_by_global_norm',
    'global_norm', 'lr_schedule', 'sgd_momentum_step', 'Sequential',
]
