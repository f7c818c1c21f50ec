"""
The attention-enhanced CNN-BiLSTM severity classifier.

Pipeline for a batch of feature vectors (N, F)::

    reshape (N, F, 1) -> Conv1D + ReLU -> MaxPooling1D -> BiLSTM
    -> dropout -> additive attention -> BiLSTM
    -> concat(flatten(conv output), flatten(second BiLSTM output))
    -> Dense + ReLU -> dropout -> Dense + softmax
"""
import logging
from dataclasses import asdict, dataclass, field, fields, is_dataclass

import numpy as np

from core.exceptions import DataError, ParameterError, ShapeError
from core.numerics import Rng, glorot_uniform
from network.attention import (
    MODES,
    AttentionParams,
    attention_backward,
    attention_forward,
    merge_query_gradient,
)
from network.layers import (
    Conv1DParams,
    DenseParams,
    conv1d_backward,
    conv1d_forward,
    dense_backward,
    dense_forward,
    dropout_backward,
    dropout_forward,
    maxpool1d_backward,
    maxpool1d_forward,
)
from network.recurrent import (
    BiLstmParams,
    LstmParams,
    bilstm_backward,
    bilstm_forward,
)


logger = logging.getLogger(__name__)

PROBABILITY_FLOOR = 1e-12
FORGET_BIAS = 1.0


@dataclass
class ModelConfig:
    """Architecture hyperparameters."""
    input_features: int = 57
    num_classes: int = 5
    conv_filters: int = 64
    kernel_size: int = 3
    pool_size: int = 2
    bilstm_units_per_direction: int = 32
    attention_width: int = 64
    attention_mode: str = 'final'
    dense_units: int = 250
    dropout_rate: float = 0.2
    seed: int = 0

    @property
    def conv_steps(self):
        return self.input_features - self.kernel_size + 1

    @property
    def pooled_steps(self):
        return self.conv_steps // self.pool_size

    @property
    def state_width(self):
        return 2 * self.bilstm_units_per_direction

    @property
    def query_count(self):
        return 1 if self.attention_mode == 'final' else self.pooled_steps

    @property
    def combined_width(self):
        return (self.conv_steps * self.conv_filters
                + self.query_count * self.state_width)

    def validate(self):
        counts = (
            'input_features', 'num_classes', 'conv_filters', 'kernel_size',
            'pool_size', 'bilstm_units_per_direction', 'attention_width',
            'dense_units',
        )
        for name in counts:
            if int(getattr(self, name)) < 1:
                raise ParameterError(f'{name} must be >= 1')
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ParameterError('dropout_rate must be in [0, 1)')
        if self.input_features < self.kernel_size:
            raise ParameterError('input_features must be >= kernel_size')
        if self.pooled_steps < 1:
            raise ParameterError(
                f'pool_size {self.pool_size} leaves no timesteps after '
                f'a {self.conv_steps}-step convolution'
            )
        if self.attention_mode not in MODES:
            raise ParameterError(
                f'attention_mode must be one of {MODES}'
            )
        return self

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ParameterError(
                f'unknown model config keys: {sorted(unknown)}'
            )
        return cls(**data)


@dataclass
class ModelParams:
    """Every learnable array of the network, grouped by layer.

    Gradients use the same structure, so each gradient array has the shape
    of the parameter it belongs to.
    """
    conv: Conv1DParams
    bilstm1: BiLstmParams
    attn: AttentionParams
    bilstm2: BiLstmParams
    dense_hidden: DenseParams
    dense_out: DenseParams
    config: ModelConfig = field(compare=False)

    def named_arrays(self):
        """(dotted name, array) pairs in the fixed checkpoint order."""
        return list(_iter_arrays(self))

    def zeros_like(self):
        return map_arrays(np.zeros_like, self)

    def copy(self):
        return map_arrays(np.copy, self)


def _iter_arrays(obj, prefix=''):
    for f in fields(obj):
        value = getattr(obj, f.name)
        name = f'{prefix}{f.name}'
        if isinstance(value, np.ndarray):
            yield name, value
        elif is_dataclass(value) and not isinstance(value, ModelConfig):
            yield from _iter_arrays(value, f'{name}.')


def map_arrays(fn, first, *others):
    """Rebuild a parameter structure applying ``fn`` leaf-wise."""
    values = {}
    for f in fields(first):
        value = getattr(first, f.name)
        rest = [getattr(other, f.name) for other in others]
        if isinstance(value, np.ndarray):
            values[f.name] = fn(value, *rest)
        elif is_dataclass(value) and not isinstance(value, ModelConfig):
            values[f.name] = map_arrays(fn, value, *rest)
        else:
            values[f.name] = value
    return type(first)(**values)


@dataclass
class ForwardCache:
    params: ModelParams
    conv: object
    pool: object
    bilstm1: object
    dropout1: object
    attention: object
    bilstm2: object
    conv_output_shape: tuple
    bilstm2_output_shape: tuple
    dense_hidden: object
    dropout2: object
    dense_out: object
    attention_weights: np.ndarray = None


def _lstm_direction(input_size, units, rng):
    bias = np.zeros(4 * units)
    bias[units:2 * units] = FORGET_BIAS
    return LstmParams(
        glorot_uniform(4 * units, input_size, rng),
        glorot_uniform(4 * units, units, rng),
        bias,
    )


def _bilstm(input_size, units, rng):
    return BiLstmParams(
        _lstm_direction(input_size, units, rng),
        _lstm_direction(input_size, units, rng),
    )


def build(config):
    """Initialize every parameter deterministically from ``config.seed``."""
    config.validate()
    rng = Rng(config.seed)
    k, filters = config.kernel_size, config.conv_filters
    units = config.bilstm_units_per_direction
    state = config.state_width

    conv = Conv1DParams(
        glorot_uniform(k, filters, rng).reshape(k, 1, filters),
        np.zeros(filters),
    )
    bilstm1 = _bilstm(filters, units, rng)
    attn = AttentionParams(
        glorot_uniform(config.attention_width, state, rng),
        glorot_uniform(config.attention_width, state, rng),
        glorot_uniform(1, config.attention_width, rng),
    )
    bilstm2 = _bilstm(state, units, rng)
    dense_hidden = DenseParams(
        glorot_uniform(config.dense_units, config.combined_width, rng),
        np.zeros(config.dense_units),
    )
    dense_out = DenseParams(
        glorot_uniform(config.num_classes, config.dense_units, rng),
        np.zeros(config.num_classes),
    )
    params = ModelParams(
        conv, bilstm1, attn, bilstm2, dense_hidden, dense_out, config
    )
    logger.debug('Built model with %d parameters',
                 sum(a.size for _, a in params.named_arrays()))
    return params


def _as_batch(features, config):
    batch = np.asarray(features, dtype=np.float64)
    if batch.ndim == 1:
        batch = batch[np.newaxis]
    if batch.ndim != 2 or batch.shape[1] != config.input_features:
        raise ShapeError(
            f'model expects {config.input_features} features per row, '
            f'got shape {batch.shape}'
        )
    return batch


def forward(params, batch, training=False, rng=None):
    """Class probabilities (N, num_classes) and the cache for ``backward``."""
    config = params.config
    batch = _as_batch(batch, config)
    rate = config.dropout_rate
    if training and rate > 0 and rng is None:
        rng = Rng(config.seed)

    conv_out, conv_cache = conv1d_forward(
        batch[:, :, np.newaxis], params.conv, 'relu'
    )
    pooled, pool_cache = maxpool1d_forward(conv_out, config.pool_size)
    states, bptt1 = bilstm_forward(pooled, params.bilstm1)
    states, mask1 = dropout_forward(states, rate, training, rng)
    attended, attn_cache = attention_forward(
        states, params.attn, config.attention_mode
    )
    higher, bptt2 = bilstm_forward(attended.contexts, params.bilstm2)

    n = batch.shape[0]
    combined = np.concatenate(
        [conv_out.reshape(n, -1), higher.reshape(n, -1)], axis=1
    )
    hidden, hidden_cache = dense_forward(
        combined, params.dense_hidden, 'relu'
    )
    hidden, mask2 = dropout_forward(hidden, rate, training, rng)
    probs, out_cache = dense_forward(hidden, params.dense_out, 'softmax')

    cache = ForwardCache(
        params=params,
        conv=conv_cache,
        pool=pool_cache,
        bilstm1=bptt1,
        dropout1=mask1,
        attention=attn_cache,
        bilstm2=bptt2,
        conv_output_shape=conv_out.shape,
        bilstm2_output_shape=higher.shape,
        dense_hidden=hidden_cache,
        dropout2=mask2,
        dense_out=out_cache,
        attention_weights=attended.weights,
    )
    return probs, cache


def sparse_categorical_crossentropy(probs, labels):
    """Mean negative log-likelihood and its gradient w.r.t. the logits."""
    probs = np.asarray(probs, dtype=np.float64)
    labels = np.asarray(labels)
    n, classes = probs.shape
    if labels.shape != (n,):
        raise ShapeError(f'{labels.shape[0]} labels for {n} rows')
    bad = np.flatnonzero((labels < 0) | (labels >= classes))
    if bad.size:
        row = int(bad[0])
        raise DataError(
            f'label {labels[row]} at row {row} is outside [0, {classes})'
        )
    labels = labels.astype(np.int64)
    rows = np.arange(n)
    picked = np.maximum(probs[rows, labels], PROBABILITY_FLOOR)
    loss = float(-np.mean(np.log(picked)))
    d_logits = probs.copy()
    d_logits[rows, labels] -= 1.0
    return loss, d_logits / n


def backward(cache, d_logits):
    """Gradients for every parameter, in the ModelParams structure."""
    params = cache.params
    config = params.config
    if d_logits.shape != cache.dense_out.output.shape:
        raise ShapeError(
            f'upstream {d_logits.shape} does not match model output '
            f'{cache.dense_out.output.shape}'
        )
    g_out, d_hidden = dense_backward(
        d_logits, cache.dense_out, pre_activation_grad=True
    )
    d_hidden = dropout_backward(d_hidden, cache.dropout2)
    g_hidden, d_combined = dense_backward(d_hidden, cache.dense_hidden)

    conv_width = int(np.prod(cache.conv_output_shape[1:]))
    d_conv = d_combined[:, :conv_width].reshape(cache.conv_output_shape)
    d_higher = d_combined[:, conv_width:].reshape(cache.bilstm2_output_shape)

    g_bilstm2, d_contexts = bilstm_backward(
        d_higher, cache.bilstm2, params.bilstm2
    )
    g_attn, d_states, d_queries = attention_backward(
        d_contexts, cache.attention, params.attn
    )
    d_states = merge_query_gradient(
        d_states, d_queries, config.attention_mode
    )
    d_states = dropout_backward(d_states, cache.dropout1)
    g_bilstm1, d_pooled = bilstm_backward(
        d_states, cache.bilstm1, params.bilstm1
    )
    d_conv = d_conv + maxpool1d_backward(d_pooled, cache.pool)
    g_conv, _ = conv1d_backward(d_conv, cache.conv)
    return ModelParams(
        g_conv, g_bilstm1, g_attn, g_bilstm2, g_hidden, g_out, config
    )


def argmax_classes(probs):
    """Most probable class per row; ties go to the lower class id."""
    return np.argmax(np.atleast_2d(probs), axis=1)


def predict(params, features):
    """Inference-mode prediction.

    A single vector returns (class id, probability vector); a matrix returns
    (class ids, probability rows).
    """
    single = np.ndim(features) == 1
    batch = _as_batch(features, params.config)
    if batch.shape[0] == 0:
        return (np.zeros(0, dtype=np.int64),
                np.zeros((0, params.config.num_classes)))
    probs, _ = forward(params, batch, training=False)
    classes = argmax_classes(probs)
    if single:
        return int(classes[0]), probs[0]
    return classes, probs
