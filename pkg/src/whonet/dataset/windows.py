from __future__ import annotations

import logging
from typing import Dict, Iterable, List, Sequence

import numpy as np

from ..deadreckon import V_MAX, check_timestamps, integrate_displacement
from ..errors import ConfigError
from ..geodesy import GNSS_ACCURACY_M, gnss_displacement, label_error
from ..models import SAMPLE_RATE_HZ, Calibration, OutageSequence, TrainingWindow, WheelRecord
from .io import split_segments

log = logging.getLogger(__name__)

OUTAGE_LENGTHS = (10, 30, 60, 120, 180)
MIN_SEGMENT = 2 * SAMPLE_RATE_HZ


def build_windows(segment: Sequence[WheelRecord], cal: Calibration, segment_id: int = 0,
                  stride: int = SAMPLE_RATE_HZ, v_max: float = V_MAX,
                  stationary_bound: float = GNSS_ACCURACY_M) -> List[TrainingWindow]:
    """One labeled window per second of a gap-free segment.

    The first second only provides the prior GNSS fix, so a segment of ``n``
    records yields ``n // 10 - 1`` windows at the default stride. A smaller
    ``stride`` gives overlapping windows (training only). Windows with the
    rear wheels at rest should carry GNSS jitter alone; those whose label
    exceeds ``stationary_bound`` meters are flagged implausible.
    """
    if len(segment) < MIN_SEGMENT:
        log.warning('segment %d has %d records, need %d; skipped', segment_id, len(segment), MIN_SEGMENT)
        return []
    if stride < 1:
        raise ConfigError(f'window stride must be >= 1, got {stride}')
    if not stationary_bound > 0:
        raise ConfigError(f'stationary bound must be > 0, got {stationary_bound}')
    check_timestamps(segment)

    wheels = np.array([r.wheels.as_tuple() for r in segment], dtype=np.float64)
    windows: List[TrainingWindow] = []
    for start in range(SAMPLE_RATE_HZ, len(segment) - SAMPLE_RATE_HZ + 1, stride):
        recs = segment[start:start + SAMPLE_RATE_HZ]
        prior, last = segment[start - 1], recs[-1]
        disp = integrate_displacement([r.wheels for r in recs], cal, v_max=v_max)
        x_gnss = gnss_displacement(prior.fix, last.fix)
        y = label_error(disp.x_whr, x_gnss)
        plausible = disp.plausible
        if not plausible:
            log.warning('window ending t=%.1f exceeds v_max (x_whr=%.2f m)', last.t, disp.x_whr)
        elif disp.x_whr == 0.0 and abs(y.epsilon) >= stationary_bound:
            log.warning('stationary window ending t=%.1f has |y|=%.2f m >= %.2f m', last.t, abs(y.epsilon),
                        stationary_bound)
            plausible = False
        windows.append(TrainingWindow(
            x=wheels[start:start + SAMPLE_RATE_HZ].T.reshape(-1),
            y=y,
            x_whr=disp.x_whr,
            x_gnss=x_gnss,
            t_end=last.t,
            yaw=last.yaw,
            segment=segment_id,
            fix_start=prior.fix,
            fix_end=last.fix,
            plausible=plausible,
        ))
    return windows


def build_corpus(streams: Iterable[Sequence[WheelRecord]], cal: Calibration, stride: int = SAMPLE_RATE_HZ,
                 stationary_bound: float = GNSS_ACCURACY_M) -> List[TrainingWindow]:
    """Windows for several record streams with segment ids unique across streams."""
    windows: List[TrainingWindow] = []
    seg_id = 0
    for records in streams:
        for segment in split_segments(records):
            windows.extend(build_windows(segment, cal, segment_id=seg_id, stride=stride,
                                         stationary_bound=stationary_bound))
            seg_id += 1
    return windows


def _on_second_grid(windows: Sequence[TrainingWindow]) -> List[TrainingWindow]:
    # overlapping windows: keep those a whole number of seconds after each segment's first
    anchors: Dict[int, float] = {}
    kept = []
    for w in windows:
        offset = w.t_end - anchors.setdefault(w.segment, w.t_end)
        if abs(offset - round(offset)) < 0.05:
            kept.append(w)
    if len(kept) < len(windows):
        log.debug('dropped %d overlapping windows before splitting outages', len(windows) - len(kept))
    return kept


def _contiguous_runs(windows: Sequence[TrainingWindow]) -> List[List[TrainingWindow]]:
    runs: List[List[TrainingWindow]] = []
    for w in windows:
        if runs:
            prev = runs[-1][-1]
            if prev.segment == w.segment and abs(w.t_end - prev.t_end - 1.0) < 0.05:
                runs[-1].append(w)
                continue
        runs.append([w])
    return runs


def split_outage_sequences(windows: Sequence[TrainingWindow], length_s: int) -> List[OutageSequence]:
    """Maximal non-overlapping outage sequences of ``length_s`` seconds.

    Sequences never cross a segment break; leftovers shorter than
    ``length_s`` at the end of each run are dropped. Overlapping windows are
    thinned to the one-second grid first.
    """
    if length_s not in OUTAGE_LENGTHS:
        raise ConfigError(f'outage length must be one of {OUTAGE_LENGTHS}, got {length_s}')
    sequences: List[OutageSequence] = []
    for run in _contiguous_runs(_on_second_grid(windows)):
        for i in range(0, len(run) - length_s + 1, length_s):
            sequences.append(OutageSequence(windows=list(run[i:i + length_s]),
                                            length_s=length_s, segment=run[0].segment))
    return sequences
