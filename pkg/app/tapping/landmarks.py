"""
Hand-landmark time series and the thumb/index angle signal derived from them.

Landmarks follow the 21-point hand topology of the upstream tracker; only
the wrist, thumb tip and index fingertip are used here.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd

from core.exceptions import DataError
from tapping.dataset import atomic_write


logger = logging.getLogger(__name__)

NUM_LANDMARKS = 21
WRIST = 0
THUMB_TIP = 4
INDEX_FINGER_TIP = 8
RAY_EPSILON = 1e-12

LANDMARK_COLUMNS = (
    ['t']
    + [f'{axis}{i}' for i in range(NUM_LANDMARKS) for axis in ('x', 'y')]
    + ['valid']
)


@dataclass
class LandmarkSequence:
    """timestamps (T,), coords (T, 21, 2), valid (T,) bool."""
    timestamps: np.ndarray
    coords: np.ndarray
    valid: np.ndarray

    def __post_init__(self):
        if np.any(np.diff(self.timestamps) <= 0):
            raise DataError('landmark timestamps must be strictly increasing')

    def __len__(self):
        return self.timestamps.shape[0]


@dataclass
class AngleSignal:
    """Per-frame thumb/index angle in degrees (NaN where invalid)."""
    timestamps: np.ndarray
    angles: np.ndarray
    valid: np.ndarray
    wrist: np.ndarray
    rate: float
    filled: int = 0

    def __len__(self):
        return self.timestamps.shape[0]

    @property
    def duration(self):
        return float(self.timestamps[-1] - self.timestamps[0])


def load_landmark_csv(path):
    """Read ``t,x0,y0,...,x20,y20,valid`` rows.

    Frames flagged valid but carrying non-finite coordinates are demoted to
    invalid.
    """
    try:
        frame = pd.read_csv(path)
    except pd.errors.EmptyDataError:
        raise DataError(f'{path}: file is empty')
    except pd.errors.ParserError as exc:
        raise DataError(f'{path}: ragged rows: {exc}')
    except ValueError as exc:
        raise DataError(f'{path}: not a readable CSV file: {exc}')
    missing = [c for c in LANDMARK_COLUMNS if c not in frame.columns]
    if missing:
        raise DataError(f'{path}: missing columns {missing[:3]}...'
                        if len(missing) > 3
                        else f'{path}: missing columns {missing}')
    if frame.empty:
        raise DataError(f'{path}: no frames')

    values = frame[LANDMARK_COLUMNS].apply(pd.to_numeric, errors='coerce')
    timestamps = values['t'].to_numpy(float)
    if not np.all(np.isfinite(timestamps)):
        raise DataError(f'{path}: non-numeric timestamp')
    coords = values[LANDMARK_COLUMNS[1:-1]].to_numpy(float).reshape(
        -1, NUM_LANDMARKS, 2
    )
    valid = values['valid'].fillna(0).to_numpy(float) != 0
    broken = valid & ~np.all(np.isfinite(coords), axis=(1, 2))
    if broken.any():
        logger.debug('%s: %d valid frames with non-finite coordinates '
                     'marked invalid', path, int(broken.sum()))
        valid &= ~broken
    try:
        return LandmarkSequence(timestamps, coords, valid)
    except DataError as exc:
        raise DataError(f'{path}: {exc}')


def write_landmark_csv(seq, path):
    data = np.column_stack([
        seq.timestamps,
        seq.coords.reshape(len(seq), -1),
        seq.valid.astype(np.int64),
    ])
    frame = pd.DataFrame(data, columns=LANDMARK_COLUMNS)
    frame['valid'] = frame['valid'].astype(np.int64)
    atomic_write(path, lambda tmp: frame.to_csv(tmp, index=False))


def synthesize_recording(angle_fn, duration=10.0, rate=30.0,
                         wrist_fn=None, ray_length=0.1):
    """Landmarks whose thumb/index angle follows ``angle_fn(t)`` degrees.

    The thumb ray points along +x from the wrist; the index ray is rotated
    by the requested angle. ``wrist_fn(t)`` gives the wrist position
    (stationary at the image center by default).
    """
    timestamps = np.arange(int(round(duration * rate))) / rate
    theta = np.radians(angle_fn(timestamps))
    if wrist_fn is None:
        wrist = np.full((timestamps.size, 2), 0.5)
    else:
        wrist = np.asarray(wrist_fn(timestamps), dtype=float)
    coords = np.repeat(wrist[:, np.newaxis, :], NUM_LANDMARKS, axis=1)
    coords[:, THUMB_TIP, 0] += ray_length
    coords[:, INDEX_FINGER_TIP, 0] += ray_length * np.cos(theta)
    coords[:, INDEX_FINGER_TIP, 1] += ray_length * np.sin(theta)
    return LandmarkSequence(
        timestamps, coords, np.ones(timestamps.size, dtype=bool)
    )


def compute_angle_signal(seq):
    """Angle between the wrist->thumb-tip and wrist->index-tip rays."""
    if int(np.sum(seq.valid)) < 2:
        raise DataError('angle signal needs at least 2 valid frames')
    wrist = seq.coords[:, WRIST, :]
    thumb = seq.coords[:, THUMB_TIP, :] - wrist
    index = seq.coords[:, INDEX_FINGER_TIP, :] - wrist
    norms = np.linalg.norm(thumb, axis=1) * np.linalg.norm(index, axis=1)
    with np.errstate(invalid='ignore'):
        degenerate = ~(norms > RAY_EPSILON * RAY_EPSILON)
    valid = seq.valid & ~degenerate
    if degenerate[seq.valid].any():
        logger.debug('%d frames with a degenerate ray marked invalid',
                     int(np.sum(degenerate & seq.valid)))

    angles = np.full(len(seq), np.nan)
    cosine = np.sum(thumb[valid] * index[valid], axis=1) / norms[valid]
    angles[valid] = np.degrees(np.arccos(np.clip(cosine, -1.0, 1.0)))

    steps = np.diff(seq.timestamps)
    rate = 1.0 / float(np.median(steps)) if steps.size else math.nan
    return AngleSignal(seq.timestamps, angles, valid, wrist.copy(), rate)


def interpolate_gaps(sig, max_gap_frames):
    """Fill short invalid runs linearly; split at longer ones.

    Returns the clean segments in time order. Leading and trailing invalid
    frames are dropped.
    """
    valid_idx = np.flatnonzero(sig.valid)
    if valid_idx.size == 0:
        raise DataError('signal has no valid frames')
    gaps = np.diff(valid_idx) - 1
    cuts = np.flatnonzero(gaps > max_gap_frames)
    starts = np.concatenate([[0], cuts + 1])
    stops = np.concatenate([cuts, [valid_idx.size - 1]])

    segments = []
    for first, last in zip(starts, stops):
        known = valid_idx[first:last + 1]
        span = np.arange(known[0], known[-1] + 1)
        t = sig.timestamps[span]
        angles = np.interp(t, sig.timestamps[known], sig.angles[known])
        wrist = np.column_stack([
            np.interp(t, sig.timestamps[known], sig.wrist[known, axis])
            for axis in range(2)
        ])
        segments.append(AngleSignal(
            timestamps=t,
            angles=angles,
            valid=np.ones(span.size, dtype=bool),
            wrist=wrist,
            rate=sig.rate,
            filled=int(span.size - known.size),
        ))
    logger.debug('Split signal into %d clean segments', len(segments))
    return segments
