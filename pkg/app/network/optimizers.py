"""Adam with bias-corrected moment estimates."""
from dataclasses import dataclass, replace

import numpy as np

from core.exceptions import ShapeError
from network.model import map_arrays


@dataclass
class AdamState:
    """Moment accumulators mirror the parameter structure."""
    m: object
    v: object
    t: int = 0
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8


def adam_init(params, learning_rate=1e-3):
    return AdamState(
        m=params.zeros_like(),
        v=params.zeros_like(),
        learning_rate=learning_rate,
    )


def _check_shapes(params, grads, state):
    for (name, p), (_, g), (_, m) in zip(
            params.named_arrays(), grads.named_arrays(),
            state.m.named_arrays()):
        if p.shape != g.shape or p.shape != m.shape:
            raise ShapeError(
                f'{name}: parameter {p.shape}, gradient {g.shape}, '
                f'moment {m.shape}'
            )


def adam_step(params, grads, state):
    """One update. Returns new (params, state); inputs are left untouched."""
    _check_shapes(params, grads, state)
    t = state.t + 1
    b1, b2 = state.beta1, state.beta2
    m = map_arrays(lambda m, g: b1 * m + (1.0 - b1) * g, state.m, grads)
    v = map_arrays(lambda v, g: b2 * v + (1.0 - b2) * (g * g), state.v, grads)
    step_size = state.learning_rate / (1.0 - b1 ** t)
    correction = 1.0 / (1.0 - b2 ** t)

    def update(p, m_hat, v_hat):
        denom = np.sqrt(v_hat * correction) + state.epsilon
        return p - step_size * m_hat / denom

    new_params = map_arrays(update, params, m, v)
    return new_params, replace(state, m=m, v=v, t=t)
