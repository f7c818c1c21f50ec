"""Landmark recording -> feature vector."""
import logging
from concurrent.futures import ThreadPoolExecutor

from core.exceptions import DataError
from tapping.features import DEFAULT_WIDTH, extract_features
from tapping.landmarks import (
    compute_angle_signal,
    interpolate_gaps,
    load_landmark_csv,
)
from tapping.taps import MIN_SEGMENT_S, detect_taps


logger = logging.getLogger(__name__)

DEFAULT_MAX_GAP_FRAMES = 5


def longest_clean_segment(segments):
    """The longest segment spanning at least the minimum tap-analysis
    duration."""
    usable = [
        s for s in segments
        if len(s) >= 2 and len(s) >= round(MIN_SEGMENT_S * s.rate)
    ]
    if not usable:
        raise DataError(
            f'no clean segment of at least {MIN_SEGMENT_S} s'
        )
    return max(usable, key=len)


def features_from_sequence(seq, max_gap_frames=DEFAULT_MAX_GAP_FRAMES,
                           width=DEFAULT_WIDTH):
    signal = compute_angle_signal(seq)
    segment = longest_clean_segment(interpolate_gaps(signal, max_gap_frames))
    logger.debug('Using segment of %d frames (%d interpolated)',
                 len(segment), segment.filled)
    events = detect_taps(segment)
    return extract_features(segment, segment.wrist, events, width=width)


def extract_recording(path, max_gap_frames=DEFAULT_MAX_GAP_FRAMES,
                      width=DEFAULT_WIDTH):
    """Feature vector for one landmark CSV file."""
    seq = load_landmark_csv(path)
    try:
        return features_from_sequence(seq, max_gap_frames, width)
    except DataError as exc:
        raise DataError(f'{path}: {exc}') from exc


def extract_many(paths, max_gap_frames=DEFAULT_MAX_GAP_FRAMES,
                 width=DEFAULT_WIDTH, workers=1):
    """Extract every file independently.

    Returns a list of (path, vector or None, error message or None) in
    input order.
    """
    def run(path):
        try:
            return path, extract_recording(path, max_gap_frames, width), None
        except (DataError, OSError) as exc:
            logger.warning('Feature extraction failed: %s', exc)
            return path, None, str(exc)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(run, paths))
