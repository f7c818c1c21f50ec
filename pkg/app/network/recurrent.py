"""
LSTM cell and bidirectional LSTM with backpropagation through time.

Gate blocks are stacked in the order input, forget, cell, output along the
first axis of every weight matrix. Sequences are (N, T, D) arrays.
"""
from dataclasses import dataclass
from typing import List

import numpy as np

from core.exceptions import ShapeError
from core.numerics import sigmoid
from network.layers import as_sequence


@dataclass
class LstmParams:
    """One direction: w_input (4U, D), w_hidden (4U, U), bias (4U,)."""
    w_input: np.ndarray
    w_hidden: np.ndarray
    bias: np.ndarray

    @property
    def units(self):
        return self.w_hidden.shape[1]

    @property
    def input_size(self):
        return self.w_input.shape[1]


@dataclass
class BiLstmParams:
    forward: LstmParams
    backward: LstmParams

    @property
    def units(self):
        return self.forward.units

    @property
    def input_size(self):
        return self.forward.input_size


@dataclass
class GateCache:
    x: np.ndarray
    h_prev: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    tanh_c: np.ndarray


@dataclass
class BpttCache:
    """Per-timestep gate caches, indexed by time, for both directions."""
    forward: List[GateCache]
    backward: List[GateCache]
    input_shape: tuple


def _as_rows(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[np.newaxis]
    if x.ndim != 2:
        raise ShapeError(f'expected a vector or (N, D) batch, got {x.shape}')
    return x


def lstm_cell_forward(x_t, h_prev, c_prev, params):
    """One LSTM step. Vectors are treated as a batch of one.

    Returns (h_t, c_t, GateCache) with (N, U) states.
    """
    x_t, h_prev, c_prev = _as_rows(x_t), _as_rows(h_prev), _as_rows(c_prev)
    units = params.units
    if not x_t.shape[0] == h_prev.shape[0] == c_prev.shape[0]:
        raise ShapeError(
            f'lstm cell batch sizes disagree: {x_t.shape[0]}, '
            f'{h_prev.shape[0]}, {c_prev.shape[0]}'
        )
    if (x_t.shape[-1] != params.input_size
            or h_prev.shape[-1] != units or c_prev.shape[-1] != units):
        raise ShapeError(
            f'lstm cell expects input {params.input_size} and state {units}, '
            f'got {x_t.shape[-1]}, {h_prev.shape[-1]}, {c_prev.shape[-1]}'
        )
    a = x_t @ params.w_input.T + h_prev @ params.w_hidden.T + params.bias
    i = sigmoid(a[:, :units])
    f = sigmoid(a[:, units:2 * units])
    g = np.tanh(a[:, 2 * units:3 * units])
    o = sigmoid(a[:, 3 * units:])
    c_t = f * c_prev + i * g
    tanh_c = np.tanh(c_t)
    h_t = o * tanh_c
    return h_t, c_t, GateCache(x_t, h_prev, c_prev, i, f, g, o, tanh_c)


def lstm_cell_backward(dh, dc, cache, params, grads):
    """Reverse one step, accumulating into ``grads``.

    Returns (dx_t, dh_prev, dc_prev).
    """
    do = dh * cache.tanh_c
    dc_total = dc + dh * cache.o * (1.0 - cache.tanh_c ** 2)
    di = dc_total * cache.g
    dg = dc_total * cache.i
    df = dc_total * cache.c_prev
    dc_prev = dc_total * cache.f
    da = np.concatenate([
        di * cache.i * (1.0 - cache.i),
        df * cache.f * (1.0 - cache.f),
        dg * (1.0 - cache.g ** 2),
        do * cache.o * (1.0 - cache.o),
    ], axis=1)
    grads.w_input += da.T @ cache.x
    grads.w_hidden += da.T @ cache.h_prev
    grads.bias += da.sum(axis=0)
    return da @ params.w_input, da @ params.w_hidden, dc_prev


def lstm_forward(x, params, reverse=False):
    """Run one direction from zero states. Returns (H, caches by time)."""
    n, steps, _ = x.shape
    h = np.zeros((n, params.units))
    c = np.zeros((n, params.units))
    out = np.zeros((n, steps, params.units))
    caches = [None] * steps
    order = range(steps - 1, -1, -1) if reverse else range(steps)
    for t in order:
        h, c, caches[t] = lstm_cell_forward(x[:, t, :], h, c, params)
        out[:, t, :] = h
    return out, caches


def lstm_backward(d_out, caches, params, reverse=False):
    """BPTT for one direction. Returns (LstmParams gradients, dx)."""
    n, steps, _ = d_out.shape
    grads = LstmParams(
        np.zeros_like(params.w_input),
        np.zeros_like(params.w_hidden),
        np.zeros_like(params.bias),
    )
    dx = np.zeros((n, steps, params.input_size))
    dh = np.zeros((n, params.units))
    dc = np.zeros((n, params.units))
    order = range(steps) if reverse else range(steps - 1, -1, -1)
    for t in order:
        dx[:, t, :], dh, dc = lstm_cell_backward(
            d_out[:, t, :] + dh, dc, caches[t], params, grads
        )
    return grads, dx


def bilstm_forward(x, params):
    """Concatenate forward and time-reversed passes: (N, T, 2U).

    A single (T, D) sequence is run as a batch of one.
    """
    x = as_sequence(x)
    if x.shape[2] != params.input_size:
        raise ShapeError(
            f'bilstm expects {params.input_size} input channels, '
            f'got {x.shape[2]}'
        )
    if (params.backward.units != params.units
            or params.backward.input_size != params.input_size):
        raise ShapeError('bilstm directions disagree on units or input size')
    h_fwd, fwd_caches = lstm_forward(x, params.forward)
    h_bwd, bwd_caches = lstm_forward(x, params.backward, reverse=True)
    out = np.concatenate([h_fwd, h_bwd], axis=2)
    return out, BpttCache(fwd_caches, bwd_caches, x.shape)


def bilstm_backward(d_out, cache, params):
    """Return (BiLstmParams gradients, input gradient)."""
    n, steps, _ = cache.input_shape
    units = params.units
    if d_out.shape != (n, steps, 2 * units):
        raise ShapeError(
            f'bilstm upstream {d_out.shape} does not match '
            f'{(n, steps, 2 * units)}'
        )
    g_fwd, dx_fwd = lstm_backward(
        d_out[:, :, :units], cache.forward, params.forward
    )
    g_bwd, dx_bwd = lstm_backward(
        d_out[:, :, units:], cache.backward, params.backward, reverse=True
    )
    return BiLstmParams(g_fwd, g_bwd), dx_fwd + dx_bwd
