"""
Additive attention over BiLSTM states.

For states ``h_i`` (keys) and queries ``q_j``::

    score(j, i) = V . tanh(W1 h_i + W2 q_j)
    alpha[j]    = softmax over i of score(j, i)
    c_j         = sum_i alpha[j, i] h_i

Scores and weights are laid out (N, J, T): one row per query, one column per
timestep, so every weight row sums to one.
"""
from dataclasses import dataclass

import numpy as np

from core.exceptions import ParameterError, ShapeError
from core.numerics import softmax_backward, stable_softmax
from network.layers import as_sequence


MODES = ('final', 'all')


@dataclass
class AttentionParams:
    """w1 (A, H), w2 (A, H), v (1, A)."""
    w1: np.ndarray
    w2: np.ndarray
    v: np.ndarray

    @property
    def width(self):
        return self.w1.shape[0]


@dataclass
class AttentionOutput:
    weights: np.ndarray
    contexts: np.ndarray


@dataclass
class ScoreCache:
    states: np.ndarray
    queries: np.ndarray
    activations: np.ndarray


@dataclass
class AttentionCache:
    scores: ScoreCache
    weights: np.ndarray
    mode: str


def select_queries(states, mode):
    """Queries for a mode: the last state (``final``) or every state."""
    if mode == 'final':
        return states[:, -1:, :]
    if mode == 'all':
        return states
    raise ParameterError(
        f'attention mode must be one of {MODES}, got {mode!r}'
    )


def attention_scores(states, queries, params):
    """Score every (query, timestep) pair. Returns ((N, J, T), ScoreCache).

    Single (T, H) states and (J, H) queries are scored as a batch of one.
    """
    states, queries = as_sequence(states), as_sequence(queries)
    if states.shape[0] != queries.shape[0]:
        raise ShapeError(
            f'{states.shape[0]} state sequences but '
            f'{queries.shape[0]} query sets'
        )
    width = params.w1.shape[1]
    if (states.shape[-1] != width or queries.shape[-1] != width
            or params.w2.shape != params.w1.shape
            or params.v.shape != (1, params.width)):
        raise ShapeError(
            f'attention expects state width {width}, got keys '
            f'{states.shape[-1]} and queries {queries.shape[-1]}'
        )
    keys = states @ params.w1.T
    projected = queries @ params.w2.T
    # (N, J, T, A)
    activations = np.tanh(
        keys[:, np.newaxis, :, :] + projected[:, :, np.newaxis, :]
    )
    scores = activations @ params.v[0]
    return scores, ScoreCache(states, queries, activations)


def attention_weights(scores):
    """Per-query softmax over the timestep axis."""
    return stable_softmax(scores, axis=-1)


def context_vectors(weights, states):
    """``c_j = sum_i alpha[j, i] h_i`` for every query."""
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim == 2:
        weights = weights[np.newaxis]
    states = as_sequence(states)
    if weights.ndim != 3 or weights.shape[0] != states.shape[0]:
        raise ShapeError(
            f'weights {weights.shape} do not pair with states {states.shape}'
        )
    if weights.shape[-1] != states.shape[1]:
        raise ShapeError(
            f'{weights.shape[-1]} attention weights per query for '
            f'{states.shape[1]} timesteps'
        )
    return weights @ states


def attention_forward(states, params, mode='final'):
    """Full chain. Returns (AttentionOutput, AttentionCache)."""
    states = as_sequence(states)
    queries = select_queries(states, mode)
    scores, score_cache = attention_scores(states, queries, params)
    weights = attention_weights(scores)
    contexts = context_vectors(weights, states)
    return (
        AttentionOutput(weights, contexts),
        AttentionCache(score_cache, weights, mode),
    )


def attention_backward(d_contexts, cache, params):
    """Return (AttentionParams gradients, dStates, dQueries).

    dStates covers only the key/value role of the states; callers that drew
    queries from the same states add dQueries back in.
    """
    states = cache.scores.states
    queries = cache.scores.queries
    act = cache.scores.activations
    weights = cache.weights
    expected = (states.shape[0], queries.shape[1], states.shape[2])
    if d_contexts.shape != expected:
        raise ShapeError(
            f'attention upstream {d_contexts.shape} does not match {expected}'
        )
    d_weights = d_contexts @ np.swapaxes(states, 1, 2)
    d_states = np.swapaxes(weights, 1, 2) @ d_contexts
    d_scores = softmax_backward(d_weights, weights, axis=-1)

    d_v = np.einsum('nji,njia->a', d_scores, act)[np.newaxis, :]
    d_pre = d_scores[..., np.newaxis] * params.v[0] * (1.0 - act ** 2)
    d_keys = d_pre.sum(axis=1)
    d_projected = d_pre.sum(axis=2)

    d_w1 = np.einsum('nta,nth->ah', d_keys, states)
    d_w2 = np.einsum('nja,njh->ah', d_projected, queries)
    d_states = d_states + d_keys @ params.w1
    d_queries = d_projected @ params.w2
    return AttentionParams(d_w1, d_w2, d_v), d_states, d_queries


def merge_query_gradient(d_states, d_queries, mode):
    """Fold the query gradient back onto the states it was drawn from."""
    d_states = d_states.copy()
    if mode == 'final':
        d_states[:, -1:, :] += d_queries
    else:
        d_states += d_queries
    return d_states
