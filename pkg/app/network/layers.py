"""
Feed-forward building blocks with explicit forward and backward passes.

Sequences are batched arrays shaped (N, T, C): N samples, T timesteps,
C channels. Every ``*_forward`` returns its output plus a cache that the
matching ``*_backward`` consumes.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.exceptions import ParameterError, ShapeError
from core.numerics import activate, activation_backward


@dataclass
class Conv1DParams:
    """Kernels shaped (K, Cin, F) and one bias per filter."""
    kernel: np.ndarray
    bias: np.ndarray

    @property
    def kernel_size(self):
        return self.kernel.shape[0]


@dataclass
class DenseParams:
    """Weight shaped (units, inputs) and bias shaped (units,)."""
    weight: np.ndarray
    bias: np.ndarray


@dataclass
class ConvCache:
    windows: np.ndarray
    pre_activation: np.ndarray
    output: np.ndarray
    params: Conv1DParams
    activation: str
    input_shape: tuple


@dataclass
class PoolCache:
    """Argmax offset (inside its window) for every pooled cell."""
    argmax: np.ndarray
    pool: int
    input_shape: tuple


@dataclass
class DenseCache:
    x: np.ndarray
    pre_activation: np.ndarray
    output: np.ndarray
    params: DenseParams
    activation: str


def as_sequence(x):
    """Promote a single (T, C) sequence to a batch of one."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 2:
        x = x[np.newaxis]
    if x.ndim != 3 or x.shape[1] < 1:
        raise ShapeError(f'expected a (N, T, C) sequence, got {x.shape}')
    return x


def conv1d_forward(x, params, activation='relu'):
    """Valid, stride-1 convolution followed by ``activation``."""
    x = as_sequence(x)
    k, c_in, _ = params.kernel.shape
    if x.shape[2] != c_in:
        raise ShapeError(
            f'conv1d expects {c_in} input channels, got {x.shape[2]}'
        )
    if x.shape[1] < k:
        raise ShapeError(
            f'conv1d needs at least {k} timesteps, got {x.shape[1]}'
        )
    # (N, T-K+1, C, K)
    windows = np.lib.stride_tricks.sliding_window_view(x, k, axis=1)
    z = np.einsum('ntck,kcf->ntf', windows, params.kernel) + params.bias
    out = activate(z, activation)
    cache = ConvCache(windows, z, out, params, activation, x.shape)
    return out, cache


def conv1d_backward(d_out, cache):
    """Return (parameter gradients, input gradient)."""
    if d_out.shape != cache.output.shape:
        raise ShapeError(
            f'conv1d upstream {d_out.shape} does not match output '
            f'{cache.output.shape}'
        )
    dz = activation_backward(
        d_out, cache.pre_activation, cache.output, cache.activation
    )
    kernel = cache.params.kernel
    d_kernel = np.einsum('ntck,ntf->kcf', cache.windows, dz)
    d_bias = dz.sum(axis=(0, 1))
    dx = np.zeros(cache.input_shape)
    steps = dz.shape[1]
    for offset in range(kernel.shape[0]):
        dx[:, offset:offset + steps, :] += dz @ kernel[offset].T
    return Conv1DParams(d_kernel, d_bias), dx


def maxpool1d_forward(x, pool):
    """Non-overlapping max pooling; a trailing partial window is dropped."""
    if pool < 1:
        raise ParameterError(f'pool size must be >= 1, got {pool}')
    x = as_sequence(x)
    n, t, c = x.shape
    t_out = t // pool
    if t_out < 1:
        raise ShapeError(f'cannot pool {t} timesteps with window {pool}')
    blocks = x[:, :t_out * pool].reshape(n, t_out, pool, c)
    argmax = np.argmax(blocks, axis=2)
    out = np.take_along_axis(blocks, argmax[:, :, np.newaxis], axis=2)
    return out[:, :, 0, :], PoolCache(argmax, pool, x.shape)


def maxpool1d_backward(d_out, cache):
    """Route the upstream gradient to the argmax positions only."""
    n, t, c = cache.input_shape
    t_out = t // cache.pool
    if d_out.shape != (n, t_out, c):
        raise ShapeError(
            f'maxpool upstream {d_out.shape} does not match {(n, t_out, c)}'
        )
    blocks = np.zeros((n, t_out, cache.pool, c))
    np.put_along_axis(
        blocks, cache.argmax[:, :, np.newaxis], d_out[:, :, np.newaxis],
        axis=2,
    )
    dx = np.zeros(cache.input_shape)
    dx[:, :t_out * cache.pool] = blocks.reshape(n, t_out * cache.pool, c)
    return dx


def dense_forward(x, params, activation='identity'):
    """``activation(x W^T + b)`` for a batch of row vectors."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis]
    if x.shape[-1] != params.weight.shape[1]:
        raise ShapeError(
            f'dense layer expects width {params.weight.shape[1]}, '
            f'got {x.shape[-1]}'
        )
    z = x @ params.weight.T + params.bias
    out = activate(z, activation)
    return out, DenseCache(x, z, out, params, activation)


def dense_backward(d_out, cache, pre_activation_grad=False):
    """Return (parameter gradients, input gradient).

    With ``pre_activation_grad`` the upstream is already the gradient w.r.t.
    the pre-activation (the softmax/cross-entropy pairing hands in dLogits).
    """
    if d_out.shape != cache.output.shape:
        raise ShapeError(
            f'dense upstream {d_out.shape} does not match output '
            f'{cache.output.shape}'
        )
    if pre_activation_grad:
        dz = d_out
    else:
        dz = activation_backward(
            d_out, cache.pre_activation, cache.output, cache.activation
        )
    grads = DenseParams(dz.T @ cache.x, dz.sum(axis=0))
    return grads, dz @ cache.params.weight


def dropout_forward(x, rate, training, rng=None):
    """Inverted dropout. Returns (output, mask); mask is None when inactive.

    The mask already carries the 1/(1-rate) scale of the survivors.
    """
    if not 0.0 <= rate < 1.0:
        raise ParameterError(f'dropout rate must be in [0, 1), got {rate}')
    if not training or rate == 0.0:
        return x, None
    keep = rng.uniform(size=np.shape(x)) >= rate
    mask = keep / (1.0 - rate)
    return x * mask, mask


def dropout_backward(d_out, mask: Optional[np.ndarray]):
    if mask is None:
        return d_out
    if mask.shape != d_out.shape:
        raise ShapeError(
            f'dropout mask {mask.shape} does not match {d_out.shape}'
        )
    return d_out * mask
