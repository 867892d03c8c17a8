import numpy as np
import pytest

from conftest import straight_config
from whonet.dataset import PRESETS, build_corpus, generate_synthetic, preset_config
from whonet.dataset.synthetic import G, SlipEvent, SpeedSegment, SyntheticConfig
from whonet.errors import ConfigError
from whonet.models import Calibration


def test_same_seed_same_drive():
    cfg = preset_config('mixed', duration=120.0, seed=4, noise_sigma=0.05, gnss_noise_m=1.0)
    assert generate_synthetic(cfg) == generate_synthetic(cfg)


def test_seed_changes_noise():
    a = generate_synthetic(straight_config(duration=5.0, noise_sigma=0.1, seed=1))
    b = generate_synthetic(straight_config(duration=5.0, noise_sigma=0.1, seed=2))
    assert a != b


def test_record_grid():
    records = generate_synthetic(straight_config(duration=30.0))
    assert len(records) == 301
    assert records[0].t == 0.0 and records[-1].t == pytest.approx(30.0)
    assert np.diff([r.t for r in records]) == pytest.approx(np.full(300, 0.1))


@pytest.mark.parametrize('name', PRESETS)
def test_presets_generate_usable_drives(name):
    cfg = preset_config(name, duration=90.0, seed=3)
    records = generate_synthetic(cfg)
    assert len(records) == 901
    windows = build_corpus([records], Calibration(r=cfg.r))
    assert len(windows) == 89
    assert all(w.plausible for w in windows)
    assert all(np.isfinite(w.x).all() for w in windows)


def test_hard_brake_reaches_045_g():
    cfg = preset_config('hard_brake', duration=60.0, seed=0)
    speeds = [cfg.initial_speed] + [s.speed for s in cfg.speed_profile]
    decel = [(b - a) / s.duration for a, b, s in zip(speeds, speeds[1:], cfg.speed_profile)]
    assert min(decel) <= -0.45 * G + 1e-6


def test_wet_road_has_slip_events():
    assert preset_config('wet_road', duration=60.0).slip_events


def test_sharp_cornering_turns_both_ways():
    rates = [s.rate for s in preset_config('sharp_cornering', duration=60.0).yaw_profile]
    assert max(rates) > 0.25 and min(rates) < -0.25


def test_turns_split_left_and_right_wheels():
    cfg = preset_config('roundabout', duration=60.0, seed=1)
    records = generate_synthetic(cfg)
    turning = [r for r in records[1:] if abs(r.wheels.omega_fl - r.wheels.omega_fr) > 1e-9]
    assert turning
    for r in turning:
        # rear-axle mean is the body speed, so the outer wheel gains what the inner loses
        assert r.wheels.omega_fl - r.wheels.omega_fr == pytest.approx(r.wheels.omega_rl - r.wheels.omega_rr)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset_config('autobahn')


@pytest.mark.parametrize('change', [
    dict(duration=0.0),
    dict(slip_events=[SlipEvent(start=1.0, duration=1.0, ratio=1.0)]),
    dict(speed_profile=[SpeedSegment(duration=10.0, speed=120.0)]),
    dict(bias={'fl': 0.0}),
    dict(bias={'spare': 1.0}),
    dict(sim_rate_hz=15),
])
def test_invalid_configs_rejected(change):
    cfg = straight_config(duration=10.0)
    for key, value in change.items():
        setattr(cfg, key, value)
    with pytest.raises(ConfigError):
        generate_synthetic(cfg)


def test_config_dict_round_trip():
    cfg = preset_config('wet_road', duration=60.0, seed=9, bias={'rl': 1.05, 'rr': 1.05})
    again = SyntheticConfig.from_dict(cfg.to_dict())
    assert again == cfg


def test_from_dict_with_preset_overrides():
    cfg = SyntheticConfig.from_dict({'preset': 'motorway', 'duration': 45.0, 'seed': 2, 'noise_sigma': 0.01})
    assert cfg.duration == 45.0
    assert cfg.noise_sigma == 0.01
    assert cfg.speed_profile == preset_config('motorway', duration=45.0, seed=2).speed_profile
