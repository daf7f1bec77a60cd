from typing import Tuple

from src.nn import Sequential

# Backward pass ≈ twice the forward cost
TRAINING_FLOP_MULTIPLIER = 3


def forward_flops(stack: Sequential, input_shape: Tuple[int, ...]) -> int:
    """Analytic forward FLOPs for one sample"""
    return stack.forward_flops(input_shape)


def training_flops(stack: Sequential, input_shape: Tuple[int, ...], samples: int) -> int:
    """Forward + backward FLOPs for `samples` training examples"""
    return TRAINING_FLOP_MULTIPLIER * forward_flops(stack, input_shape) * samples
