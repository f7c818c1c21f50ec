"""
The 57-slot tapping feature vector.

Slots 0-47 are six families times eight summary statistics, family-major:

    families:   speed, acceleration, frequency, period, amplitude,
                wrist_displacement
    statistics: mean, std, median, min, max, cv, slope, iqr

Speed and acceleration are magnitudes: the absolute first and second
differences of the angle signal scaled by the frame rate and its square.

Slots 48-55 hold whole-recording measures and slot 56 the tap count; see
``FEATURE_SCHEMA`` for the exact names.
"""
import numpy as np
from scipy import stats

from core.exceptions import DataError


FAMILIES = (
    'speed', 'acceleration', 'frequency', 'period', 'amplitude',
    'wrist_displacement',
)
STATISTICS = ('mean', 'std', 'median', 'min', 'max', 'cv', 'slope', 'iqr')
RECORDING_MEASURES = (
    'tap_rate', 'duration', 'amplitude_decrement', 'speed_decrement',
    'rhythm_drift', 'hesitation_count', 'interpolated_fraction',
    'valley_angle_mean', 'tap_count',
)
FEATURE_SCHEMA = tuple(
    f'{family}_{stat}' for family in FAMILIES for stat in STATISTICS
) + RECORDING_MEASURES
DEFAULT_WIDTH = len(FEATURE_SCHEMA)
HESITATION_FACTOR = 1.5


def summarize(series):
    """The eight summary statistics of one family, in schema order."""
    series = np.asarray(series, dtype=np.float64)
    if series.size == 0:
        raise DataError('cannot summarize an empty family')
    mean = float(np.mean(series))
    std = float(np.std(series))
    if series.size > 1 and np.ptp(series) > 0:
        slope = stats.linregress(np.arange(series.size), series).slope
    else:
        slope = 0.0
    return [
        mean,
        std,
        float(np.median(series)),
        float(np.min(series)),
        float(np.max(series)),
        std / abs(mean) if mean != 0 else 0.0,
        float(slope),
        float(stats.iqr(series)),
    ]


def _late_over_early(series):
    third = len(series) // 3
    if third == 0:
        return 1.0
    early = float(np.mean(series[:third]))
    late = float(np.mean(series[-third:]))
    return late / early if early != 0 else 1.0


def family_series(sig, wrist_track, events):
    """Per-frame or per-tap series for every family, keyed by name."""
    angles = sig.angles
    periods = events.periods
    return {
        'speed': np.abs(np.diff(angles)) * sig.rate,
        'acceleration': np.abs(np.diff(angles, n=2)) * sig.rate ** 2,
        'frequency': 1.0 / periods,
        'period': periods,
        'amplitude': events.amplitudes,
        'wrist_displacement': np.linalg.norm(
            np.diff(wrist_track, axis=0), axis=1
        ),
    }


def extract_features(sig, wrist_track=None, events=None,
                     width=DEFAULT_WIDTH):
    """Feature vector of one clean segment, padded or truncated to
    ``width``."""
    if events is None:
        raise DataError('feature extraction needs detected tap events')
    if wrist_track is None:
        wrist_track = sig.wrist
    series = family_series(sig, wrist_track, events)
    values = []
    for family in FAMILIES:
        if series[family].size == 0:
            raise DataError(f'feature family {family} is empty')
        values.extend(summarize(series[family]))

    periods = events.periods
    amplitudes = events.amplitudes
    per_tap_speed = amplitudes[:periods.size] / periods[:amplitudes.size]
    duration = sig.duration
    values.extend([
        events.tap_count / duration if duration > 0 else 0.0,
        duration,
        _late_over_early(amplitudes),
        _late_over_early(per_tap_speed),
        _late_over_early(periods),
        float(np.sum(periods > HESITATION_FACTOR * np.median(periods))),
        sig.filled / len(sig),
        float(np.mean(sig.angles[events.valleys]))
        if events.valleys.size else 0.0,
        float(events.tap_count),
    ])

    vector = np.zeros(width)
    count = min(width, len(values))
    vector[:count] = values[:count]
    return vector
