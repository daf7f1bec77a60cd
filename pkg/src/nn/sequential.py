from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from src.exceptions import NumericalError
from .base import ForwardCache, Layer


class Sequential:
    """Ordered stack of layers sharing one forward/backward pass"""

    def __init__(self, layers: Sequence[Layer]):
        self.layers: List[Layer] = list(layers)

    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, List[ForwardCache]]:
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x)
            if not np.isfinite(x).all():
                raise NumericalError(f"non-finite activations after {layer.kind}")
            caches.append(cache)
        return x, caches

    def predict(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, upstream: np.ndarray, caches: Sequence[ForwardCache]) -> Optional[np.ndarray]:
        grad = upstream
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            grad = layer.backward(grad, cache)
        return grad

    def zero_grad(self):
        for layer in self.layers:
            layer.zero_grad()

    def named_params(self) -> Iterator[Tuple[Layer, str]]:
        """Fixed traversal order: layer order, then each layer's parameter order"""
        for layer in self.layers:
            for name in layer.params:
                yield layer, name

    def param_list(self) -> List[np.ndarray]:
        return [layer.params[name] for layer, name in self.named_params()]

    def grad_list(self) -> List[np.ndarray]:
        return [layer.grads[name] for layer, name in self.named_params()]

    def apply_weight_decay(self):
        """Adds the L2 term's gradient 2·λ·W to every regularized weight matrix"""
        for layer in self.layers:
            if layer.l2 > 0 and 'W' in layer.params:
                layer.grads['W'] += (2 * layer.l2) * layer.params['W']

    def regularization_loss(self) -> float:
        return float(sum(layer.l2 * np.sum(layer.params['W'].astype(np.float64) ** 2)
                         for layer in self.layers if layer.l2 > 0 and 'W' in layer.params))

    def output_shape(self, input_shape: Tuple[int, ...]) -> Tuple[int, ...]:
        for layer in self.layers:
            input_shape = layer.output_shape(input_shape)
        return tuple(input_shape)

    def forward_flops(self, input_shape: Tuple[int, ...]) -> int:
        total = 0
        for layer in self.layers:
            total += layer.flops(input_shape)
            input_shape = layer.output_shape(input_shape)
        return total

    @property
    def param_count(self) -> int:
        return sum(layer.param_count for layer in self.layers)

    def __len__(self) -> int:
        return len(self.layers)

    def __repr__(self) -> str:
        return f"Sequential({', '.join(layer.kind for layer in self.layers)})"
