import math
from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.special import expit

from src.exceptions import ContractViolation, ShapeError
from .base import ForwardCache, Layer

DTYPE = np.float32
ACTIVATIONS = ('linear', 'relu')


def glorot_uniform(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, fan_out: int) -> np.ndarray:
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(DTYPE)


def he_uniform(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int) -> np.ndarray:
    """Fan-in scaled uniform for ReLU layers (keeps activation variance through the stack)"""
    limit = math.sqrt(6.0 / fan_in)
    return rng.uniform(-limit, limit, size=shape).astype(DTYPE)


def orthogonal(rng: np.random.Generator, size: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(size, size)))
    return (q * np.sign(np.diag(r))).astype(DTYPE)


def fan_scaled(rng: np.random.Generator, shape: Tuple[int, ...], fan_in: int, fan_out: int,
               activation: str) -> np.ndarray:
    if activation == 'relu':
        return he_uniform(rng, shape, fan_in)
    return glorot_uniform(rng, shape, fan_in, fan_out)


def _rng(rng: Optional[np.random.Generator]) -> np.random.Generator:
    return rng if rng is not None else np.random.default_rng(0)


def _check_activation(activation: str):
    if activation not in ACTIVATIONS:
        raise ContractViolation(f"activation must be one of {ACTIVATIONS}, got {activation!r}")


class Embedding(Layer):
    """Token ids [B, T] → dense vectors [B, T, dim]"""

    kind = 'Embedding'

    def __init__(self, rows: int, dim: int, rng: Optional[np.random.Generator] = None, init_range: float = 0.05):
        super().__init__()
        self.rows = rows
        self.dim = dim
        self.params['W'] = _rng(rng).uniform(-init_range, init_range, size=(rows, dim)).astype(DTYPE)
        self.zero_grad()

    def forward(self, x):
        if x.ndim != 2 or not np.issubdtype(x.dtype, np.integer):
            raise ShapeError(f"Embedding expects integer ids [B, T], got {x.dtype} {x.shape}")
        if x.size and (x.min() < 0 or x.max() >= self.rows):
            raise ShapeError(f"Embedding ids must lie in [0, {self.rows - 1}]")
        out = self.params['W'][x]
        return out, self._new_cache(out, ids=x)

    def backward(self, upstream, cache):
        ids = self._open_cache(upstream, cache)['ids']
        grad = np.zeros_like(self.params['W'])
        np.add.at(grad, ids, upstream)
        self._accumulate('W', grad)
        return None

    def output_shape(self, input_shape):
        return tuple(input_shape) + (self.dim,)


class Conv1D(Layer):
    """Valid (unpadded) 1-D convolution over time: [B, T, C] → [B, T-K+1, F]"""

    kind = 'Conv1D'

    def __init__(self, in_channels: int, filters: int, kernel: int, activation: str = 'linear',
                 rng: Optional[np.random.Generator] = None):
        super().__init__()
        _check_activation(activation)
        self.in_channels = in_channels
        self.filters = filters
        self.kernel = kernel
        self.activation = activation
        self.params['W'] = fan_scaled(_rng(rng), (kernel, in_channels, filters),
                                      kernel * in_channels, kernel * filters, activation)
        self.params['b'] = np.zeros(filters, dtype=DTYPE)
        self.zero_grad()

    def forward(self, x):
        if x.ndim != 3 or x.shape[2] != self.in_channels or x.shape[1] < self.kernel:
            raise ShapeError(f"Conv1D expects [B, T>={self.kernel}, {self.in_channels}], got {x.shape}")
        windows = sliding_window_view(x, self.kernel, axis=1)  # [B, T', C, K]
        W = self.params['W']
        z = np.tensordot(windows, W.transpose(1, 0, 2), axes=([2, 3], [0, 1])) + self.params['b']
        out = np.maximum(z, 0) if self.activation == 'relu' else z
        return out, self._new_cache(out, x=x, windows=windows, z=z)

    def backward(self, upstream, cache):
        values = self._open_cache(upstream, cache)
        x, windows, z = values['x'], values['windows'], values['z']
        dz = upstream * (z > 0) if self.activation == 'relu' else upstream
        W = self.params['W']
        self._accumulate('W', np.tensordot(windows, dz, axes=([0, 1], [0, 1])).transpose(1, 0, 2))
        self._accumulate('b', dz.sum(axis=(0, 1)))
        dx = np.zeros_like(x)
        t_out = dz.shape[1]
        for k in range(self.kernel):
            dx[:, k:k + t_out, :] += dz @ W[k].T
        return dx

    def output_shape(self, input_shape):
        t, _ = input_shape
        return (t - self.kernel + 1, self.filters)

    def flops(self, input_shape):
        t_out, f = self.output_shape(input_shape)
        return 2 * self.kernel * self.in_channels * f * t_out + 2 * f * t_out


class MaxPool1D(Layer):
    """Non-overlapping max pooling over time; trailing odd step dropped"""

    kind = 'MaxPool1D'

    def __init__(self, pool: int = 2):
        super().__init__()
        self.pool = pool

    def forward(self, x):
        if x.ndim != 3 or x.shape[1] < self.pool:
            raise ShapeError(f"MaxPool1D expects [B, T>={self.pool}, C], got {x.shape}")
        b, t, c = x.shape
        t_out = t // self.pool
        windows = x[:, :t_out * self.pool].reshape(b, t_out, self.pool, c)
        idx = windows.argmax(axis=2)[:, :, None, :]
        out = np.take_along_axis(windows, idx, axis=2)[:, :, 0, :]
        return out, self._new_cache(out, in_shape=x.shape, idx=idx)

    def backward(self, upstream, cache):
        values = self._open_cache(upstream, cache)
        b, t, c = values['in_shape']
        t_out = upstream.shape[1]
        dwin = np.zeros((b, t_out, self.pool, c), dtype=upstream.dtype)
        np.put_along_axis(dwin, values['idx'], upstream[:, :, None, :], axis=2)
        dx = np.zeros((b, t, c), dtype=upstream.dtype)
        dx[:, :t_out * self.pool] = dwin.reshape(b, t_out * self.pool, c)
        return dx

    def output_shape(self, input_shape):
        t, c = input_shape
        return (t // self.pool, c)

    def flops(self, input_shape):
        t_out, c = self.output_shape(input_shape)
        return t_out * c * (self.pool - 1)


class LSTM(Layer):
    """
    Standard LSTM returning the final hidden state: [B, T, D] → [B, H]
    Gates i, f, g, o in that order; sigmoid gates, tanh candidate and output.
    """

    kind = 'LSTM'

    def __init__(self, input_dim: int, units: int, rng: Optional[np.random.Generator] = None,
                 forget_bias: float = 1.0):
        super().__init__()
        self.input_dim = input_dim
        self.units = units
        rng = _rng(rng)
        h4 = 4 * units
        # one fan-scaled block per gate; recurrent blocks orthogonal
        self.params['Wx'] = np.concatenate(
            [glorot_uniform(rng, (input_dim, units), input_dim, units) for _ in range(4)], axis=1)
        self.params['Wh'] = np.concatenate([orthogonal(rng, units) for _ in range(4)], axis=1)
        b = np.zeros(h4, dtype=DTYPE)
        b[units:2 * units] = forget_bias
        self.params['b'] = b
        self.zero_grad()

    def forward(self, x):
        if x.ndim != 3 or x.shape[2] != self.input_dim:
            raise ShapeError(f"LSTM expects [B, T, {self.input_dim}], got {x.shape}")
        batch, steps, _ = x.shape
        H = self.units
        Wh = self.params['Wh']
        xz = x @ self.params['Wx'] + self.params['b']  # [B, T, 4H]
        h = np.zeros((batch, H), dtype=x.dtype)
        c = np.zeros((batch, H), dtype=x.dtype)
        hs, cs, gates = [h], [c], []
        for t in range(steps):
            z = xz[:, t] + h @ Wh
            i = expit(z[:, :H])
            f = expit(z[:, H:2 * H])
            g = np.tanh(z[:, 2 * H:3 * H])
            o = expit(z[:, 3 * H:])
            c = f * c + i * g
            h = o * np.tanh(c)
            gates.append((i, f, g, o))
            hs.append(h)
            cs.append(c)
        return h, self._new_cache(h, x=x, hs=hs, cs=cs, gates=gates)

    def backward(self, upstream, cache):
        values = self._open_cache(upstream, cache)
        x, hs, cs, gates = values['x'], values['hs'], values['cs'], values['gates']
        batch, steps, _ = x.shape
        Wh = self.params['Wh']
        dz_all = np.zeros((batch, steps, 4 * self.units), dtype=upstream.dtype)
        dWh = np.zeros_like(Wh)
        dh = upstream
        dc = np.zeros_like(upstream)
        for t in reversed(range(steps)):
            i, f, g, o = gates[t]
            tanh_c = np.tanh(cs[t + 1])
            do = dh * tanh_c
            dct = dc + dh * o * (1 - tanh_c ** 2)
            di = dct * g
            dg = dct * i
            df = dct * cs[t]
            dc = dct * f
            dz = np.concatenate([di * i * (1 - i), df * f * (1 - f), dg * (1 - g ** 2), do * o * (1 - o)], axis=1)
            dz_all[:, t] = dz
            dWh += hs[t].T @ dz
            dh = dz @ Wh.T
        flat_dz = dz_all.reshape(-1, 4 * self.units)
        self._accumulate('Wx', x.reshape(-1, self.input_dim).T @ flat_dz)
        self._accumulate('Wh', dWh)
        self._accumulate('b', flat_dz.sum(axis=0))
        return dz_all @ self.params['Wx'].T

    def output_shape(self, input_shape):
        return (self.units,)

    def flops(self, input_shape):
        t, d = input_shape
        h = self.units
        return t * (2 * (d + h) * 4 * h + 4 * h + 17 * h)


class Dense(Layer):
    """y = act(x W + b): [B, in] → [B, out]"""

    kind = 'Dense'

    def __init__(self, in_features: int, out_features: int, activation: str = 'linear', l2: float = 0.0,
                 rng: Optional[np.random.Generator] = None):
        super().__init__()
        _check_activation(activation)
        self.in_features = in_features
        self.out_features = out_features
        self.activation = activation
        self.l2 = l2
        self.params['W'] = fan_scaled(_rng(rng), (in_features, out_features), in_features, out_features,
                                      activation)
        self.params['b'] = np.zeros(out_features, dtype=DTYPE)
        self.zero_grad()

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.in_features:
            raise ShapeError(f"Dense expects [B, {self.in_features}], got {x.shape}")
        z = x @ self.params['W'] + self.params['b']
        out = np.maximum(z, 0) if self.activation == 'relu' else z
        return out, self._new_cache(out, x=x, z=z)

    def backward(self, upstream, cache):
        values = self._open_cache(upstream, cache)
        x, z = values['x'], values['z']
        dz = upstream * (z > 0) if self.activation == 'relu' else upstream
        self._accumulate('W', x.T @ dz)
        self._accumulate('b', dz.sum(axis=0))
        return dz @ self.params['W'].T

    def output_shape(self, input_shape):
        return (self.out_features,)

    def flops(self, input_shape):
        return 2 * self.in_features * self.out_features + 2 * self.out_features


class Sigmoid(Layer):
    kind = 'Sigmoid'

    def forward(self, x):
        out = expit(x)
        return out, self._new_cache(out, y=out)

    def backward(self, upstream, cache):
        y = self._open_cache(upstream, cache)['y']
        return upstream * y * (1 - y)

    def output_shape(self, input_shape):
        return tuple(input_shape)

    def flops(self, input_shape):
        return 4 * int(np.prod(input_shape))


class Flatten(Layer):
    kind = 'Flatten'

    def forward(self, x):
        out = x.reshape(x.shape[0], -1)
        return out, self._new_cache(out, in_shape=x.shape)

    def backward(self, upstream, cache):
        return upstream.reshape(self._open_cache(upstream, cache)['in_shape'])

    def output_shape(self, input_shape):
        return (int(np.prod(input_shape)),)


class Reshape(Layer):
    kind = 'Reshape'

    def __init__(self, shape: Tuple[int, ...]):
        super().__init__()
        self.shape = tuple(shape)

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != int(np.prod(self.shape)):
            raise ShapeError(f"Reshape expects [B, {int(np.prod(self.shape))}], got {x.shape}")
        out = x.reshape((x.shape[0],) + self.shape)
        return out, self._new_cache(out, in_shape=x.shape)

    def backward(self, upstream, cache):
        return upstream.reshape(self._open_cache(upstream, cache)['in_shape'])

    def output_shape(self, input_shape):
        return self.shape


def layer_forward(layer: Layer, x: np.ndarray) -> Tuple[np.ndarray, ForwardCache]:
    return layer.forward(x)


def layer_backward(layer: Layer, upstream: np.ndarray, cache: ForwardCache):
    """Returns (input_grad, param_grads); param_grads are the layer's accumulated grads"""
    input_grad = layer.backward(upstream, cache)
    return input_grad, layer.grads
