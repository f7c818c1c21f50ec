"""Mini-batch training loop."""
import logging
import time
from dataclasses import dataclass, field
from typing import List

import numpy as np

from core.exceptions import DataError, ParameterError
from core.numerics import Rng
from network.model import (
    argmax_classes,
    backward,
    build,
    forward,
    sparse_categorical_crossentropy,
)
from network.optimizers import adam_init, adam_step
from tapping.dataset import stratified_split


logger = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    epochs: int = 100
    batch_size: int = 32
    learning_rate: float = 1e-3
    validation_fraction: float = 0.1
    seed: int = 0

    def validate(self):
        if self.epochs < 1:
            raise ParameterError('epochs must be >= 1')
        if self.batch_size < 1:
            raise ParameterError('batch_size must be >= 1')
        if self.learning_rate <= 0:
            raise ParameterError('learning_rate must be positive')
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ParameterError('validation_fraction must be in [0, 1)')
        return self


@dataclass
class TrainHistory:
    """One entry per completed epoch. Validation entries are NaN when the
    run has no validation split."""
    train_loss: List[float] = field(default_factory=list)
    train_accuracy: List[float] = field(default_factory=list)
    val_loss: List[float] = field(default_factory=list)
    val_accuracy: List[float] = field(default_factory=list)

    def __len__(self):
        return len(self.train_loss)

    def append(self, train_loss, train_accuracy, val_loss, val_accuracy):
        self.train_loss.append(float(train_loss))
        self.train_accuracy.append(float(train_accuracy))
        self.val_loss.append(float(val_loss))
        self.val_accuracy.append(float(val_accuracy))


def evaluate_batch(params, features, labels):
    """Inference-mode (loss, accuracy) over a whole labeled matrix."""
    probs, _ = forward(params, features, training=False)
    loss, _ = sparse_categorical_crossentropy(probs, labels)
    accuracy = float(np.mean(argmax_classes(probs) == labels))
    return loss, accuracy


def train_step(params, state, features, labels, rng):
    """Forward, backward and one Adam update on a single mini-batch.

    Returns (params, state, loss, number of correct predictions).
    """
    probs, cache = forward(params, features, training=True, rng=rng)
    loss, d_logits = sparse_categorical_crossentropy(probs, labels)
    grads = backward(cache, d_logits)
    params, state = adam_step(params, grads, state)
    correct = int(np.sum(argmax_classes(probs) == labels))
    return params, state, loss, correct


def _validation_split(dataset, fraction, seed):
    if fraction == 0.0:
        return dataset, None
    try:
        return stratified_split(dataset, fraction, seed)
    except DataError as exc:
        logger.warning('No validation split: %s', exc)
        return dataset, None


def train(dataset, model_config, train_config):
    """Train from scratch. Returns (ModelParams, TrainHistory)."""
    train_config.validate()
    if dataset.labels is None or len(dataset) == 0:
        raise DataError('training needs a non-empty labeled dataset')
    if np.any((dataset.labels < 0)
              | (dataset.labels >= model_config.num_classes)):
        raise DataError(
            f'labels must lie in [0, {model_config.num_classes})'
        )

    fit_set, val_set = _validation_split(
        dataset, train_config.validation_fraction, train_config.seed
    )
    params = build(model_config)
    state = adam_init(params, train_config.learning_rate)
    rng = Rng(train_config.seed)
    shuffle_rng, dropout_rng = rng.fork(), rng.fork()
    history = TrainHistory()
    n = len(fit_set)
    started = time.perf_counter()
    logger.info(
        'Training on %d samples (%d validation) for %d epochs',
        n, 0 if val_set is None else len(val_set), train_config.epochs,
    )

    for epoch in range(1, train_config.epochs + 1):
        order = shuffle_rng.permutation(n)
        total_loss = 0.0
        total_correct = 0
        for start in range(0, n, train_config.batch_size):
            idx = order[start:start + train_config.batch_size]
            params, state, loss, correct = train_step(
                params, state, fit_set.features[idx], fit_set.labels[idx],
                dropout_rng,
            )
            total_loss += loss * idx.size
            total_correct += correct
        if val_set is None:
            val_loss, val_accuracy = float('nan'), float('nan')
        else:
            val_loss, val_accuracy = evaluate_batch(
                params, val_set.features, val_set.labels
            )
        history.append(
            total_loss / n, total_correct / n, val_loss, val_accuracy
        )
        logger.info(
            'Epoch %d/%d loss=%.4f acc=%.4f val_loss=%.4f val_acc=%.4f',
            epoch, train_config.epochs, history.train_loss[-1],
            history.train_accuracy[-1], val_loss, val_accuracy,
        )

    logger.info('Training finished in %.2f s',
                time.perf_counter() - started)
    return params, history
