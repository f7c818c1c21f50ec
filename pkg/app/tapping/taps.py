"""Tap segmentation of a clean angle segment into peaks and valleys."""
from dataclasses import dataclass

import numpy as np
from scipy.signal import find_peaks

from core.exceptions import DataError


PROMINENCE_FRACTION = 0.2
MIN_PEAK_SPACING_S = 0.1
MIN_SEGMENT_S = 1.0


@dataclass
class TapEvents:
    """Alternating extrema of one segment.

    ``amplitudes`` holds one value per peak (peak angle minus the mean of its
    neighboring valleys); ``periods`` the peak-to-peak intervals in seconds.
    """
    peaks: np.ndarray
    valleys: np.ndarray
    amplitudes: np.ndarray
    periods: np.ndarray

    @property
    def tap_count(self):
        return int(self.peaks.size)


def _alternate(angles, peaks, valleys):
    """Drop the lesser of two consecutive same-type extrema."""
    events = sorted(
        [(int(i), 'peak') for i in peaks]
        + [(int(i), 'valley') for i in valleys]
    )
    kept = []
    for index, kind in events:
        if kept and kept[-1][1] == kind:
            previous = kept[-1][0]
            if kind == 'peak':
                better = angles[index] > angles[previous]
            else:
                better = angles[index] < angles[previous]
            if better:
                kept[-1] = (index, kind)
            continue
        kept.append((index, kind))
    return kept


def detect_taps(sig):
    """Peaks/valleys with prominence >= 20% of the segment range and at
    least 0.1 s between same-type extrema."""
    frames = len(sig)
    if frames < 2 or frames < int(round(MIN_SEGMENT_S * sig.rate)):
        raise DataError(
            f'segment of {frames} frames is shorter than {MIN_SEGMENT_S} s'
        )
    angles = sig.angles
    span = float(np.max(angles) - np.min(angles))
    if span <= 0.0:
        raise DataError('insufficient taps: constant signal')
    spacing = max(1, int(round(MIN_PEAK_SPACING_S * sig.rate)))
    prominence = PROMINENCE_FRACTION * span
    peaks, _ = find_peaks(angles, prominence=prominence, distance=spacing)
    valleys, _ = find_peaks(-angles, prominence=prominence, distance=spacing)

    kept = _alternate(angles, peaks, valleys)
    peaks = np.array([i for i, kind in kept if kind == 'peak'], dtype=int)
    valleys = np.array([i for i, kind in kept if kind == 'valley'], dtype=int)
    if peaks.size < 2:
        raise DataError(f'insufficient taps: {peaks.size} peak(s) found')

    amplitudes = []
    for position, (index, kind) in enumerate(kept):
        if kind != 'peak':
            continue
        neighbors = [
            angles[kept[p][0]] for p in (position - 1, position + 1)
            if 0 <= p < len(kept)
        ]
        if neighbors:
            amplitudes.append(angles[index] - np.mean(neighbors))
    periods = np.diff(sig.timestamps[peaks])
    return TapEvents(peaks, valleys, np.array(amplitudes), periods)
