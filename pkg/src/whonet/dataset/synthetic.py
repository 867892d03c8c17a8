"""Synthetic drives with known odometry faults.

The ground-truth path is integrated at ``sim_rate_hz`` and decimated to the
10 Hz record grid. Each wheel sample is what an encoder reports: the mean wheel
speed over the preceding 0.1 s, scaled by the wheel's radius bias and by any
active slip event, plus Gaussian sensor noise. GNSS fixes are chained along the
true path on the WGS-84 ellipsoid.

A bias factor above 1 means the tyre rolls on a radius smaller than the
calibrated ``r`` (wear, low pressure), so odometry over-reads by that factor.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Dict, List, Tuple

import numpy as np

from ..deadreckon import V_MAX
from ..errors import ConfigError
from ..geodesy import ned_to_fix, project
from ..models import SAMPLE_RATE_HZ, WHEELS, GnssFix, WheelRecord, WheelSpeeds

G = 9.80665
DEFAULT_START = (52.4068, -1.5197)


@dataclass
class SpeedSegment:
    duration: float  # s
    speed: float  # m/s reached linearly at the end of the segment


@dataclass
class YawSegment:
    duration: float  # s
    rate: float  # rad/s, positive turns right (clockwise from above)


@dataclass
class SlipEvent:
    start: float  # s
    duration: float  # s
    ratio: float  # ground travel = (1 - ratio) * wheel travel
    wheels: Tuple[str, ...] = ('rl', 'rr')


def _unit_bias() -> Dict[str, float]:
    return {w: 1.0 for w in WHEELS}


@dataclass
class SyntheticConfig:
    duration: float = 600.0
    speed_profile: List[SpeedSegment] = field(default_factory=list)
    yaw_profile: List[YawSegment] = field(default_factory=list)
    bias: Dict[str, float] = field(default_factory=_unit_bias)
    slip_events: List[SlipEvent] = field(default_factory=list)
    noise_sigma: float = 0.0  # rad/s
    gnss_noise_m: float = 0.0
    seed: int = 0
    r: float = 0.3
    track_width: float = 1.5
    start_lat: float = DEFAULT_START[0]
    start_lon: float = DEFAULT_START[1]
    initial_speed: float = 0.0
    initial_yaw: float = 0.0
    sim_rate_hz: int = 100

    def validate(self) -> None:
        if self.duration <= 0:
            raise ConfigError('duration must be > 0')
        if self.sim_rate_hz < SAMPLE_RATE_HZ or self.sim_rate_hz % SAMPLE_RATE_HZ:
            raise ConfigError(f'sim_rate_hz must be a multiple of {SAMPLE_RATE_HZ}')
        for seg in self.speed_profile:
            if seg.duration <= 0:
                raise ConfigError(f'speed segment duration must be > 0: {seg}')
            if not abs(seg.speed) <= V_MAX:
                raise ConfigError(f'speed segment exceeds {V_MAX} m/s: {seg}')
        for seg in self.yaw_profile:
            if seg.duration <= 0 or not math.isfinite(seg.rate):
                raise ConfigError(f'invalid yaw segment: {seg}')
        for w in WHEELS:
            if not self.bias.get(w, 1.0) > 0:
                raise ConfigError(f'bias factor for wheel {w} must be > 0')
        unknown = set(self.bias) - set(WHEELS)
        if unknown:
            raise ConfigError(f'unknown wheels in bias: {sorted(unknown)}')
        for ev in self.slip_events:
            if not 0 <= ev.ratio < 1:
                raise ConfigError(f'slip ratio must be in [0, 1): {ev}')
            if ev.start < 0 or ev.duration <= 0:
                raise ConfigError(f'invalid slip event timing: {ev}')
            if set(ev.wheels) - set(WHEELS):
                raise ConfigError(f'unknown wheels in slip event: {ev}')
        if self.noise_sigma < 0 or self.gnss_noise_m < 0:
            raise ConfigError('noise levels must be >= 0')
        if self.r <= 0 or self.track_width < 0:
            raise ConfigError('r must be > 0 and track_width >= 0')
        if abs(self.initial_speed) > V_MAX:
            raise ConfigError(f'initial speed exceeds {V_MAX} m/s')

    def to_dict(self) -> dict:
        d = asdict(self)
        for ev in d['slip_events']:
            ev['wheels'] = list(ev['wheels'])
        return d

    @classmethod
    def from_dict(cls, data: dict) -> 'SyntheticConfig':
        data = dict(data or {})
        preset = data.pop('preset', None)
        if preset is not None:
            base = preset_config(preset, duration=data.get('duration', 600.0), seed=data.get('seed', 0))
            merged = base.to_dict()
            merged.update(data)
            data = merged
        try:
            cfg = cls(
                duration=float(data.get('duration', 600.0)),
                speed_profile=[SpeedSegment(**s) for s in data.get('speed_profile', [])],
                yaw_profile=[YawSegment(**s) for s in data.get('yaw_profile', [])],
                bias={**_unit_bias(), **{k: float(v) for k, v in (data.get('bias') or {}).items()}},
                slip_events=[SlipEvent(start=e['start'], duration=e['duration'], ratio=e['ratio'],
                                       wheels=tuple(e.get('wheels', ('rl', 'rr'))))
                             for e in data.get('slip_events', [])],
                noise_sigma=float(data.get('noise_sigma', 0.0)),
                gnss_noise_m=float(data.get('gnss_noise_m', 0.0)),
                seed=int(data.get('seed', 0)),
                r=float(data.get('r', 0.3)),
                track_width=float(data.get('track_width', 1.5)),
                start_lat=float(data.get('start_lat', DEFAULT_START[0])),
                start_lon=float(data.get('start_lon', DEFAULT_START[1])),
                initial_speed=float(data.get('initial_speed', 0.0)),
                initial_yaw=float(data.get('initial_yaw', 0.0)),
                sim_rate_hz=int(data.get('sim_rate_hz', 100)),
            )
        except (TypeError, KeyError) as exc:
            raise ConfigError(f'invalid synthetic config: {exc}') from exc
        cfg.validate()
        return cfg


def _speed_at(cfg: SyntheticConfig, t: np.ndarray) -> np.ndarray:
    knots = np.concatenate([[0.0], np.cumsum([s.duration for s in cfg.speed_profile])])
    values = np.array([cfg.initial_speed] + [s.speed for s in cfg.speed_profile])
    return np.interp(t, knots, values)


def _yaw_at(cfg: SyntheticConfig, t: np.ndarray) -> np.ndarray:
    knots = np.concatenate([[0.0], np.cumsum([s.duration for s in cfg.yaw_profile])])
    turned = np.concatenate([[0.0], np.cumsum([s.duration * s.rate for s in cfg.yaw_profile])])
    return cfg.initial_yaw + np.interp(t, knots, turned)


def _slip_factors(cfg: SyntheticConfig, t_end: np.ndarray) -> np.ndarray:
    """Per-record, per-wheel wheel/ground travel ratio for the interval ending at ``t_end``."""
    factors = np.ones((t_end.size, len(WHEELS)))
    t_mid = t_end - 0.5 / SAMPLE_RATE_HZ
    for ev in cfg.slip_events:
        active = (t_mid >= ev.start) & (t_mid < ev.start + ev.duration)
        for w in ev.wheels:
            factors[active, WHEELS.index(w)] /= (1.0 - ev.ratio)
    return factors


def _wrap(angle: np.ndarray) -> np.ndarray:
    return (angle + np.pi) % (2 * np.pi) - np.pi


def generate_synthetic(cfg: SyntheticConfig) -> List[WheelRecord]:
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    sub = cfg.sim_rate_hz // SAMPLE_RATE_HZ
    n_rec = int(round(cfg.duration * SAMPLE_RATE_HZ))
    dt = 1.0 / cfg.sim_rate_hz

    t_sim = np.arange(n_rec * sub + 1) * dt
    v = _speed_at(cfg, t_sim)
    yaw = _yaw_at(cfg, t_sim)

    # trapezoid travel per sim step is exact for piecewise-linear speed
    ds = 0.5 * (v[:-1] + v[1:]) * dt
    dyaw = np.diff(yaw)
    heading = 0.5 * (yaw[:-1] + yaw[1:])
    dn = ds * np.cos(heading)
    de = ds * np.sin(heading)
    half_track = 0.5 * cfg.track_width
    # turning right (dyaw > 0) the left wheels run the outer arc
    ds_wheel = np.column_stack([ds + dyaw * half_track, ds - dyaw * half_track,
                                ds + dyaw * half_track, ds - dyaw * half_track])

    def per_record(a: np.ndarray) -> np.ndarray:
        return a.reshape(n_rec, sub, *a.shape[1:]).sum(axis=1)

    arc = per_record(ds_wheel)  # (n_rec, 4)
    rec_dn, rec_de = per_record(dn), per_record(de)
    t_rec = np.arange(n_rec + 1) / SAMPLE_RATE_HZ

    omega = np.empty((n_rec + 1, len(WHEELS)))
    omega[0] = v[0] / cfg.r
    omega[1:] = arc / (cfg.r / SAMPLE_RATE_HZ)
    omega[1:] *= _slip_factors(cfg, t_rec[1:])
    omega *= np.array([cfg.bias.get(w, 1.0) for w in WHEELS])
    if cfg.noise_sigma > 0:
        omega += rng.normal(0.0, cfg.noise_sigma, size=omega.shape)

    fixes = [GnssFix(lat=cfg.start_lat, lon=cfg.start_lon)]
    for i in range(n_rec):
        fixes.append(project(fixes[-1], math.atan2(rec_de[i], rec_dn[i]), math.hypot(rec_dn[i], rec_de[i])))
    if cfg.gnss_noise_m > 0:
        offsets = rng.normal(0.0, cfg.gnss_noise_m, size=(n_rec + 1, 2))
        fixes = [ned_to_fix(f, n, e) for f, (n, e) in zip(fixes, offsets)]

    yaw_rec = _wrap(yaw[::sub])
    return [
        WheelRecord(t=float(t_rec[i]), wheels=WheelSpeeds(*(float(o) for o in omega[i])),
                    fix=fixes[i], yaw=float(yaw_rec[i]))
        for i in range(n_rec + 1)
    ]


class _Profile:
    def __init__(self, rng: np.random.Generator, speed: float = 0.0) -> None:
        self.rng = rng
        self.speed_segments: List[SpeedSegment] = []
        self.yaw_segments: List[YawSegment] = []
        self.slips: List[SlipEvent] = []
        self.elapsed = 0.0
        self.speed = speed

    def add(self, duration: float, speed: float, rate: float = 0.0) -> None:
        self.speed_segments.append(SpeedSegment(duration=round(duration, 1), speed=speed))
        self.yaw_segments.append(YawSegment(duration=round(duration, 1), rate=rate))
        self.elapsed += round(duration, 1)
        self.speed = speed

    def slip(self, duration: float, ratio: float) -> None:
        self.slips.append(SlipEvent(start=round(self.elapsed, 1), duration=duration, ratio=ratio))

    def cruise(self, lo: float, hi: float) -> None:
        target = float(self.rng.uniform(lo, hi))
        ramp = max(2.0, abs(target - self.speed) / 1.5)
        self.add(ramp, target, float(self.rng.normal(0.0, 0.01)))
        self.add(float(self.rng.uniform(10, 30)), target, float(self.rng.normal(0.0, 0.005)))


def _motorway(p: _Profile) -> None:
    p.cruise(25.0, 33.0)


def _roundabout(p: _Profile) -> None:
    p.add(max(2.0, abs(p.speed - 9.0) / 2.0), 9.0)
    sweep = float(p.rng.uniform(math.pi / 2, 2 * math.pi))
    rate = 0.4
    p.add(sweep / rate, 9.0, rate)
    p.add(4.0, 12.0)


def _hard_brake(p: _Profile) -> None:
    p.add(max(2.0, abs(p.speed - 20.0) / 2.0), 20.0)
    p.add(5.0, 20.0)
    decel = float(p.rng.uniform(0.45, 0.6)) * G
    p.add(math.floor(200.0 / decel) / 10.0, 0.0)  # floor keeps |a| >= decel
    p.add(2.0, 0.0)
    p.add(8.0, 15.0)


def _wet_road(p: _Profile) -> None:
    p.add(max(2.0, abs(p.speed - 15.0) / 2.0), 15.0)
    for _ in range(3):
        p.slip(float(p.rng.uniform(1.0, 4.0)), float(p.rng.uniform(0.03, 0.15)))
        p.add(float(p.rng.uniform(5.0, 10.0)), 15.0, float(p.rng.normal(0.0, 0.02)))


def _quick_accel(p: _Profile) -> None:
    for _ in range(4):
        p.add(float(p.rng.uniform(3.0, 5.0)), float(p.rng.uniform(5.0, 22.0)))


def _sharp_cornering(p: _Profile) -> None:
    p.add(max(2.0, abs(p.speed - 10.0) / 2.0), 10.0)
    sign = 1.0
    for _ in range(4):
        p.add(float(p.rng.uniform(2.5, 4.0)), 10.0, sign * float(p.rng.uniform(0.3, 0.5)))
        p.add(2.0, 10.0)
        sign = -sign


SCENARIOS: Dict[str, Callable[[_Profile], None]] = {
    'motorway': _motorway,
    'roundabout': _roundabout,
    'hard_brake': _hard_brake,
    'wet_road': _wet_road,
    'quick_accel': _quick_accel,
    'sharp_cornering': _sharp_cornering,
}
PRESETS = tuple(SCENARIOS) + ('mixed',)


def preset_config(name: str, duration: float = 600.0, seed: int = 0, **overrides) -> SyntheticConfig:
    """Drive built by repeating one scenario block (or random blocks for ``mixed``)."""
    if name not in PRESETS:
        raise ConfigError(f'unknown preset {name!r}, expected one of {PRESETS}')
    rng = np.random.default_rng(seed)
    profile = _Profile(rng)
    blocks = list(SCENARIOS.values())
    while profile.elapsed < duration:
        if name == 'mixed':
            blocks[int(rng.integers(len(blocks)))](profile)
        else:
            SCENARIOS[name](profile)
    cfg = SyntheticConfig(duration=duration, speed_profile=profile.speed_segments,
                          yaw_profile=profile.yaw_segments, slip_events=profile.slips, seed=seed)
    for key, value in overrides.items():
        if not hasattr(cfg, key):
            raise ConfigError(f'unknown synthetic option {key!r}')
        setattr(cfg, key, value)
    if 'bias' in overrides:
        cfg.bias = {**_unit_bias(), **overrides['bias']}
    cfg.validate()
    return cfg
