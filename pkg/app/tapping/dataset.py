"""
Labeled feature matrices: CSV ingestion, z-score normalization, stratified
splitting and the synthetic Gaussian stand-in dataset.
"""
import logging
import os
import tempfile
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import pandas as pd

from core.exceptions import DataError, ParameterError
from core.numerics import Rng


logger = logging.getLogger(__name__)

LABEL_COLUMN = 'label'
NUM_CLASSES = 5
STD_FLOOR = 1e-12


@dataclass
class NormStats:
    mean: np.ndarray
    std: np.ndarray


@dataclass
class Dataset:
    """Feature rows (N, F) with optional integer labels."""
    features: np.ndarray
    labels: Optional[np.ndarray] = None
    stats: Optional[NormStats] = None
    provenance: str = ''

    def __post_init__(self):
        if self.labels is not None and len(self.labels) != len(self.features):
            raise DataError(
                f'{len(self.features)} feature rows but '
                f'{len(self.labels)} labels'
            )

    def __len__(self):
        return self.features.shape[0]

    @property
    def width(self):
        return self.features.shape[1]

    def subset(self, idx, tag):
        return replace(
            self,
            features=self.features[idx],
            labels=None if self.labels is None else self.labels[idx],
            provenance=f'{self.provenance}[{tag}]',
        )


def feature_header(width):
    return [f'f{i}' for i in range(width)]


def _looks_numeric(value):
    try:
        float(value)
    except ValueError:
        return False
    return True


def load_feature_csv(path, num_classes=NUM_CLASSES):
    """Read a feature CSV; a trailing ``label`` column is optional.

    Row numbers in error messages count data rows from 1.
    """
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, skip_blank_lines=True,
        )
    except pd.errors.EmptyDataError:
        raise DataError(f'{path}: file is empty, a header row is required')
    except pd.errors.ParserError as exc:
        raise DataError(f'{path}: ragged rows: {exc}')
    except ValueError as exc:
        raise DataError(f'{path}: not a readable CSV file: {exc}')

    columns = [str(c) for c in frame.columns]
    if any(_looks_numeric(c) for c in columns):
        raise DataError(f'{path}: missing header row')
    if LABEL_COLUMN in columns[:-1]:
        raise DataError(f'{path}: "{LABEL_COLUMN}" must be the last column')
    has_labels = bool(columns) and columns[-1] == LABEL_COLUMN
    feature_columns = columns[:-1] if has_labels else columns
    if not feature_columns:
        raise DataError(f'{path}: no feature columns')

    ragged = frame.isna().any(axis=1).to_numpy()
    if ragged.any():
        row = int(np.flatnonzero(ragged)[0]) + 1
        raise DataError(f'{path}: row {row} has too few fields')

    features = np.empty((len(frame), len(feature_columns)))
    for j, name in enumerate(feature_columns):
        parsed = pd.to_numeric(frame[name], errors='coerce').to_numpy(float)
        bad = np.flatnonzero(~np.isfinite(parsed))
        if bad.size:
            row = int(bad[0])
            raise DataError(
                f'{path}: row {row + 1}, column {name}: invalid value '
                f'{frame[name].iloc[row]!r} (finite number required)'
            )
        features[:, j] = parsed

    labels = None
    if has_labels:
        raw = pd.to_numeric(frame[LABEL_COLUMN], errors='coerce')
        raw = raw.to_numpy(float)
        bad = np.flatnonzero(
            ~np.isfinite(raw) | (raw != np.round(raw))
            | (raw < 0) | (raw >= num_classes)
        )
        if bad.size:
            row = int(bad[0])
            raise DataError(
                f'{path}: row {row + 1}: label '
                f'{frame[LABEL_COLUMN].iloc[row]!r} is not an integer in '
                f'[0, {num_classes})'
            )
        labels = raw.astype(np.int64)

    logger.info('Loaded %d rows x %d features from %s',
                features.shape[0], features.shape[1], path)
    return Dataset(features, labels, provenance=os.fspath(path))


def atomic_write(path, write):
    """Call ``write(tmp_path)`` and move the result over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix='.tmp')
    os.close(fd)
    try:
        write(tmp)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.remove(tmp)


def write_feature_csv(dataset, path):
    """Write ``f0..f{F-1}[,label]`` with round-trip float formatting."""
    frame = pd.DataFrame(dataset.features, columns=feature_header(
        dataset.width))
    if dataset.labels is not None:
        frame[LABEL_COLUMN] = dataset.labels.astype(np.int64)
    atomic_write(path, lambda tmp: frame.to_csv(tmp, index=False))


def zscore_fit(train):
    """Per-column mean and (population) standard deviation."""
    if len(train) == 0:
        raise DataError('cannot fit normalization on an empty dataset')
    return NormStats(train.features.mean(axis=0), train.features.std(axis=0))


def zscore_apply(stats, dataset):
    """``(x - mean) / std``; columns with std below the floor map to zero."""
    if stats.mean.shape[0] != dataset.width:
        raise DataError(
            f'normalization fitted on {stats.mean.shape[0]} columns, '
            f'dataset has {dataset.width}'
        )
    constant = stats.std <= STD_FLOOR
    scale = np.where(constant, 1.0, stats.std)
    normalized = (dataset.features - stats.mean) / scale
    normalized[:, constant] = 0.0
    return replace(dataset, features=normalized, stats=stats)


def stratified_split(dataset, test_fraction, seed):
    """Per-class random split. Returns (train, test) with original order."""
    if not 0.0 < test_fraction < 1.0:
        raise ParameterError('test_fraction must be in (0, 1)')
    if dataset.labels is None:
        raise DataError('stratified split needs labels')
    rng = Rng(seed)
    test_idx = []
    for label in np.unique(dataset.labels):
        members = np.flatnonzero(dataset.labels == label)
        if members.size < 2:
            raise DataError(
                f'class {label} has {members.size} sample(s); '
                'a stratified split needs at least 2'
            )
        n_test = int(round(members.size * test_fraction))
        n_test = min(max(n_test, 1), members.size - 1)
        test_idx.append(members[rng.permutation(members.size)[:n_test]])
    test_idx = np.sort(np.concatenate(test_idx))
    train_mask = np.ones(len(dataset), dtype=bool)
    train_mask[test_idx] = False
    return (
        dataset.subset(np.flatnonzero(train_mask), 'train'),
        dataset.subset(test_idx, 'test'),
    )


def synth_generate(n_per_class, separation, seed, n_features=57,
                   num_classes=NUM_CLASSES):
    """Gaussian clusters whose means sit ``separation`` unit-variance
    standard deviations out along random orthonormal directions."""
    if n_per_class < 1:
        raise ParameterError('n_per_class must be >= 1')
    if separation < 0:
        raise ParameterError('separation must be >= 0')
    if num_classes > n_features:
        raise ParameterError('need at least as many features as classes')
    rng = Rng(seed)
    directions, _ = np.linalg.qr(
        rng.normal(size=(n_features, num_classes))
    )
    labels = np.repeat(np.arange(num_classes), n_per_class)
    means = separation * directions.T[labels]
    features = means + rng.normal(size=(labels.size, n_features))
    return Dataset(
        features, labels,
        provenance=f'synth(n={n_per_class},sep={separation},seed={seed})',
    )
