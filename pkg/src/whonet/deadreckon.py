"""Physical wheel-odometry model.

Rear-axle wheel speed is mapped to linear velocity by the calibration constant
``r``, integrated over one-second windows with a left-Riemann sum at 10 Hz and
rotated into a local North-East-Down frame by the window's final yaw sample.
Front wheel speeds are carried as learning features only.
"""
from __future__ import annotations

import logging
import math
from typing import List, Sequence

import numpy as np

from .errors import DataIntegrityError, InvalidInputError, WindowSizeError
from .models import (
    SAMPLE_DT,
    SAMPLE_RATE_HZ,
    BodyDisplacement,
    Calibration,
    NedPosition,
    WheelRecord,
    WheelSpeeds,
)

log = logging.getLogger(__name__)

V_MAX = 70.0  # m/s, datasets top out near 122 km/h
GRID_TOLERANCE = 0.02  # s


def rotation_nb(yaw: float) -> np.ndarray:
    if not math.isfinite(yaw):
        raise InvalidInputError(f'yaw must be finite, got {yaw!r}')
    c, s = math.cos(yaw), math.sin(yaw)
    return np.array([[c, -s, 0.0],
                     [s, c, 0.0],
                     [0.0, 0.0, 1.0]])


def rear_axle_speed(ws: WheelSpeeds) -> float:
    return (ws.omega_rr + ws.omega_rl) / 2.0


def linear_velocity(omega_whr: float, cal: Calibration) -> float:
    return omega_whr * cal.r


def integrate_samples(samples: Sequence[WheelSpeeds], cal: Calibration, dt: float = SAMPLE_DT) -> float:
    """Left-Riemann sum of rear-axle velocity over ``samples``."""
    total = 0.0
    for ws in samples:
        total += linear_velocity(rear_axle_speed(ws), cal) * dt
    return total


def integrate_displacement(samples: Sequence[WheelSpeeds], cal: Calibration,
                           v_max: float = V_MAX) -> BodyDisplacement:
    if len(samples) != SAMPLE_RATE_HZ:
        raise WindowSizeError(f'a one-second window needs {SAMPLE_RATE_HZ} samples, got {len(samples)}')
    x = integrate_samples(samples, cal)
    return BodyDisplacement(x_whr=x, plausible=abs(x) <= v_max * 1.0)


def update_position(pos: NedPosition, disp: BodyDisplacement, yaw: float) -> NedPosition:
    if not math.isfinite(disp.x_whr):
        raise InvalidInputError(f'displacement must be finite, got {disp.x_whr!r}')
    rot = rotation_nb(yaw)
    # only the first column matters: body displacement is [x, 0, 0]
    return NedPosition(north=pos.north + rot[0, 0] * disp.x_whr,
                       east=pos.east + rot[1, 0] * disp.x_whr,
                       down=pos.down)


def check_timestamps(records: Sequence[WheelRecord], tolerance: float = GRID_TOLERANCE) -> None:
    for prev, curr in zip(records, records[1:]):
        step = curr.t - prev.t
        if step <= 0:
            raise DataIntegrityError(f'timestamps not increasing at t={curr.t}')
        if abs(step - SAMPLE_DT) > tolerance:
            raise DataIntegrityError(f'sampling step {step:.3f}s at t={curr.t} is off the 10 Hz grid')


def dead_reckon(records: Sequence[WheelRecord], cal: Calibration,
                start: NedPosition = NedPosition()) -> List[NedPosition]:
    """Integrate whole seconds of ``records`` from ``start``.

    Returns ``start`` followed by one position per completed second.
    """
    if len(records) % SAMPLE_RATE_HZ:
        raise WindowSizeError(f'record count {len(records)} is not a multiple of {SAMPLE_RATE_HZ}')
    check_timestamps(records)
    track = [start]
    pos = start
    for i in range(0, len(records), SAMPLE_RATE_HZ):
        window = records[i:i + SAMPLE_RATE_HZ]
        disp = integrate_displacement([r.wheels for r in window], cal)
        if not disp.plausible:
            log.warning('window ending t=%.1f exceeds v_max (x=%.2f m)', window[-1].t, disp.x_whr)
        pos = update_position(pos, disp, window[-1].yaw)
        track.append(pos)
    return track
