"""Whole-model central-difference gradient check."""
import logging
from dataclasses import dataclass, field, replace
from typing import Dict, Optional

import numpy as np

from core.numerics import Rng
from network.model import (
    ModelConfig,
    backward,
    build,
    forward,
    sparse_categorical_crossentropy,
)


logger = logging.getLogger(__name__)

TOLERANCE = 1e-4
DEFAULT_EPSILON = 1e-5


def tiny_config(attention_mode='final', seed=0):
    """A configuration small enough to difference every parameter."""
    return ModelConfig(
        input_features=6,
        num_classes=3,
        conv_filters=2,
        kernel_size=3,
        pool_size=2,
        bilstm_units_per_direction=2,
        attention_width=4,
        attention_mode=attention_mode,
        dense_units=4,
        seed=seed,
    )


def tiny_batch(config, size=4, seed=0):
    rng = Rng(seed + 1)
    features = rng.normal(size=(size, config.input_features))
    labels = np.arange(size) % config.num_classes
    return features, labels


@dataclass
class GradientCheckReport:
    """Worst relative error per parameter array."""
    errors: Dict[str, float] = field(default_factory=dict)
    epsilon: float = DEFAULT_EPSILON
    tolerance: float = TOLERANCE

    @property
    def worst(self):
        return max(self.errors.values(), default=0.0)

    @property
    def failed(self):
        return [name for name, err in self.errors.items()
                if err > self.tolerance]

    @property
    def passed(self):
        return not self.failed


def _loss(params, features, labels):
    probs, _ = forward(params, features, training=False)
    return sparse_categorical_crossentropy(probs, labels)[0]


def gradient_check(model_config, features, labels,
                   epsilon=DEFAULT_EPSILON, fault: Optional[str] = None):
    """Compare analytic gradients with (f(p+e) - f(p-e)) / 2e for every
    parameter entry, dropout disabled.

    ``fault`` names a parameter array, or a layer prefix such as ``conv``,
    whose analytic gradient is doubled before comparison.
    """
    config = replace(model_config, dropout_rate=0.0)
    params = build(config)
    probs, cache = forward(params, features, training=False)
    _, d_logits = sparse_categorical_crossentropy(probs, labels)
    analytic = dict(backward(cache, d_logits).named_arrays())

    report = GradientCheckReport(epsilon=epsilon)
    for name, array in params.named_arrays():
        grad = analytic[name]
        if fault and (name == fault or name.startswith(f'{fault}.')):
            grad = 2.0 * grad
        numeric = np.zeros_like(array)
        flat = array.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + epsilon
            plus = _loss(params, features, labels)
            flat[i] = original - epsilon
            minus = _loss(params, features, labels)
            flat[i] = original
            numeric.reshape(-1)[i] = (plus - minus) / (2.0 * epsilon)
        error = np.abs(grad - numeric) / np.maximum(1.0, np.abs(numeric))
        report.errors[name] = float(error.max()) if error.size else 0.0
        logger.debug('%s worst relative error %.3e', name,
                     report.errors[name])
    return report


def render_gradient_check(report, title=''):
    lines = [f'{title}worst relative error {report.worst:.3e} '
             f'(epsilon {report.epsilon:g}, tolerance {report.tolerance:g})']
    for name, err in report.errors.items():
        flag = '  FAIL' if err > report.tolerance else ''
        lines.append(f'  {name:<28}{err:.3e}{flag}')
    return '\n'.join(lines) + '\n'
