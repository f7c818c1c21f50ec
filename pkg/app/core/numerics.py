"""
Deterministic random generation, initializers and the dense primitives the
network layers are built on. All arrays are float64.
"""
import math

import numpy as np

from core.exceptions import ShapeError


_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _mix(z):
    """SplitMix64 finalizer over an array of uint64 states."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


class Rng:
    """SplitMix64 generator.

    The stream depends only on the seed, so runs are bit-reproducible on any
    platform. Draws are vectorized: the k-th output is a pure function of
    ``seed + k * gamma``.
    """

    def __init__(self, seed=0):
        self._state = int(seed) & _MASK64

    @property
    def state(self):
        return self._state

    def next_uint64(self, size=None):
        """Return ``size`` raw 64-bit draws (a Python int if size is None)."""
        n = 1 if size is None else int(np.prod(size, dtype=np.int64))
        steps = np.arange(1, n + 1, dtype=np.uint64)
        z = _mix(steps * np.uint64(_GAMMA) + np.uint64(self._state))
        self._state = (self._state + n * _GAMMA) & _MASK64
        if size is None:
            return int(z[0])
        return z.reshape(size)

    def uniform(self, low=0.0, high=1.0, size=None):
        """Uniform draws on [low, high)."""
        bits = self.next_uint64(1 if size is None else size)
        unit = (bits >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
        out = low + (high - low) * unit
        return float(out.reshape(-1)[0]) if size is None else out

    def normal(self, loc=0.0, scale=1.0, size=None):
        """Gaussian draws by the Box-Muller transform."""
        shape = 1 if size is None else size
        u1 = 1.0 - self.uniform(size=shape)
        u2 = self.uniform(size=shape)
        z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
        out = loc + scale * z
        return float(out.reshape(-1)[0]) if size is None else out

    def permutation(self, n):
        """Random ordering of ``range(n)``."""
        return np.argsort(self.uniform(size=n), kind='stable')

    def fork(self):
        """Independent child generator seeded from this stream."""
        return Rng(self.next_uint64())


def check_finite(array, name='array'):
    """Raise ShapeError if ``array`` holds NaN or Inf."""
    if not np.all(np.isfinite(array)):
        raise ShapeError(f'{name} contains non-finite values')
    return array


def matmul(a, b):
    """Matrix product of two 2-D float64 arrays."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(
            f'cannot multiply {a.shape[0]}x{a.shape[-1]} by '
            f'{b.shape[0]}x{b.shape[-1]}'
            if a.ndim == 2 and b.ndim == 2
            else f'matmul expects 2-D operands, got {a.shape} and {b.shape}'
        )
    return check_finite(a @ b, 'matmul output')


def glorot_uniform(rows, cols, rng):
    """Glorot-uniform matrix with entries on +-sqrt(6 / (rows + cols))."""
    if rows < 1 or cols < 1:
        raise ShapeError(f'glorot_uniform needs positive dims, got '
                         f'{rows}x{cols}')
    limit = math.sqrt(6.0 / (rows + cols))
    return rng.uniform(-limit, limit, size=(rows, cols))


def stable_softmax(v, axis=-1):
    """Softmax with max subtraction; normalizes along ``axis``."""
    v = np.asarray(v, dtype=np.float64)
    if v.size == 0 or v.shape[axis] == 0:
        raise ShapeError('softmax of an empty input')
    shifted = np.exp(v - np.max(v, axis=axis, keepdims=True))
    return shifted / np.sum(shifted, axis=axis, keepdims=True)


def softmax_backward(d_out, probs, axis=-1):
    """Contract ``d_out`` with the softmax Jacobian diag(p) - p p^T."""
    inner = np.sum(d_out * probs, axis=axis, keepdims=True)
    return probs * (d_out - inner)


def sigmoid(x):
    """Logistic function, stable for large |x|."""
    out = np.empty_like(x, dtype=np.float64)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


ACTIVATIONS = ('relu', 'tanh', 'identity', 'softmax')


def activate(z, activation):
    if activation == 'relu':
        return np.maximum(z, 0.0)
    if activation == 'tanh':
        return np.tanh(z)
    if activation == 'identity':
        return z
    if activation == 'softmax':
        return stable_softmax(z, axis=-1)
    raise ShapeError(f'unknown activation {activation!r}')


def activation_backward(d_out, z, out, activation):
    """Gradient w.r.t. the pre-activation ``z`` given ``out = act(z)``."""
    if activation == 'relu':
        return d_out * (z > 0)
    if activation == 'tanh':
        return d_out * (1.0 - out * out)
    if activation == 'identity':
        return d_out
    if activation == 'softmax':
        return softmax_backward(d_out, out, axis=-1)
    raise ShapeError(f'unknown activation {activation!r}')
