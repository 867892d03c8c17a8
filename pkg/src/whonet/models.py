from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .errors import CalibrationError, InvalidInputError

WHEELS: Tuple[str, ...] = ('fl', 'fr', 'rl', 'rr')
SAMPLE_RATE_HZ = 10
SAMPLE_DT = 1.0 / SAMPLE_RATE_HZ
N_FEATURES = len(WHEELS) * SAMPLE_RATE_HZ


def _require_finite(name: str, *values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise InvalidInputError(f'{name} must be finite, got {v!r}')


@dataclass(frozen=True)
class WheelSpeeds:
    omega_fl: float  # rad/s, negative when reversing
    omega_fr: float
    omega_rl: float
    omega_rr: float

    def __post_init__(self) -> None:
        _require_finite('wheel speed', self.omega_fl, self.omega_fr, self.omega_rl, self.omega_rr)

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.omega_fl, self.omega_fr, self.omega_rl, self.omega_rr)


@dataclass(frozen=True)
class GnssFix:
    lat: float  # degrees
    lon: float

    def __post_init__(self) -> None:
        _require_finite('GNSS fix', self.lat, self.lon)
        if not -90.0 <= self.lat <= 90.0 or not -180.0 <= self.lon <= 180.0:
            raise InvalidInputError(f'GNSS fix out of range: ({self.lat}, {self.lon})')


@dataclass(frozen=True)
class WheelRecord:
    t: float  # seconds
    wheels: WheelSpeeds
    fix: GnssFix
    yaw: float  # radians, clockwise from north

    def __post_init__(self) -> None:
        _require_finite('record', self.t, self.yaw)


@dataclass(frozen=True)
class NedPosition:
    north: float = 0.0
    east: float = 0.0
    down: float = 0.0  # horizontal-plane navigation only

    def __post_init__(self) -> None:
        _require_finite('position', self.north, self.east, self.down)
        if self.down != 0.0:
            raise InvalidInputError('down must stay 0 (horizontal navigation)')


@dataclass(frozen=True)
class Calibration:
    r: float  # m, maps rear-axle rad/s to m/s

    def __post_init__(self) -> None:
        if not math.isfinite(self.r) or self.r <= 0:
            raise CalibrationError(f'calibration constant r must be > 0, got {self.r!r}')


@dataclass(frozen=True)
class BodyDisplacement:
    x_whr: float  # m over one labeling interval
    plausible: bool = True  # False when |x_whr| exceeds v_max * 1 s


@dataclass(frozen=True)
class ErrorLabel:
    epsilon: float  # m, positive when odometry overestimates


@dataclass
class TrainingWindow:
    x: np.ndarray  # 40 raw features [fl0..fl9, fr0..fr9, rl0..rl9, rr0..rr9]
    y: ErrorLabel
    x_whr: float
    x_gnss: float
    t_end: float
    yaw: float
    segment: int = 0
    fix_start: GnssFix | None = None
    fix_end: GnssFix | None = None
    plausible: bool = True

    def __post_init__(self) -> None:
        self.x = np.asarray(self.x, dtype=np.float64)
        if self.x.shape != (N_FEATURES,):
            raise InvalidInputError(f'window needs {N_FEATURES} features, got shape {self.x.shape}')


@dataclass
class OutageSequence:
    windows: List[TrainingWindow] = field(default_factory=list)
    length_s: int = 0
    segment: int = 0

    @property
    def distance(self) -> float:
        return float(sum(w.x_gnss for w in self.windows))

    @property
    def x_whr(self) -> np.ndarray:
        return np.array([w.x_whr for w in self.windows])

    @property
    def x_gnss(self) -> np.ndarray:
        return np.array([w.x_gnss for w in self.windows])

    @property
    def labels(self) -> np.ndarray:
        return np.array([w.y.epsilon for w in self.windows])
