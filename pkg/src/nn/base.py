from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from src.exceptions import ContractViolation, ShapeError


@dataclass
class ForwardCache:
    """What one forward call leaves behind for its backward call"""

    owner: int
    out_shape: Tuple[int, ...]
    values: Dict[str, Any] = field(default_factory=dict)
    consumed: bool = False


class Layer(ABC):
    """
    Base class for every layer kind
    forward() returns (output, cache); backward() consumes that cache exactly once,
    accumulates parameter gradients into self.grads and returns the input gradient.
    Tensors carry a leading batch dimension.
    """

    kind: str = ''

    def __init__(self):
        self.params: Dict[str, np.ndarray] = {}
        self.grads: Dict[str, np.ndarray] = {}
        self.l2: float = 0.0

    @abstractmethod
    def forward(self, x: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
        pass

    @abstractmethod
    def backward(self, upstream: np.ndarray, cache: ForwardCache) -> Optional[np.ndarray]:
        pass

    @abstractmethod
    def output_shape(self, input_shape: Tuple[int, ...]) -> Tuple[int, ...]:
        """Per-sample output shape (no batch dimension)"""
        pass

    def flops(self, input_shape: Tuple[int, ...]) -> int:
        """Forward FLOPs for one sample (multiply-add counts as 2)"""
        return 0

    @property
    def param_count(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def zero_grad(self):
        for name, p in self.params.items():
            self.grads[name] = np.zeros_like(p)

    def astype(self, dtype) -> 'Layer':
        for name in self.params:
            self.params[name] = self.params[name].astype(dtype)
        self.zero_grad()
        return self

    def _new_cache(self, out: np.ndarray, **values) -> ForwardCache:
        return ForwardCache(owner=id(self), out_shape=out.shape, values=values)

    def _open_cache(self, upstream: np.ndarray, cache: Optional[ForwardCache]) -> Dict[str, Any]:
        if cache is None or cache.owner != id(self):
            raise ContractViolation(f"{self.kind}: missing forward cache or cache from another layer")
        if cache.consumed:
            raise ContractViolation(f"{self.kind}: stale forward cache (already used by a backward call)")
        if upstream.shape != cache.out_shape:
            raise ShapeError(f"{self.kind}: upstream shape {upstream.shape} != output shape {cache.out_shape}")
        cache.consumed = True
        return cache.values

    def _accumulate(self, name: str, grad: np.ndarray):
        if name not in self.grads:
            self.grads[name] = np.zeros_like(self.params[name])
        self.grads[name] += grad

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.param_count} params)"
