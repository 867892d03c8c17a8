from __future__ import annotations

from typing import Dict, List, Optional, Sequence

import numpy as np
import pytest

from whonet.dataset.synthetic import SlipEvent, SpeedSegment, SyntheticConfig, YawSegment, generate_synthetic
from whonet.models import Calibration, GnssFix, WheelRecord, WheelSpeeds


def make_records(speeds: Sequence[float], t0: float = 0.0, yaw: float = 0.0) -> List[WheelRecord]:
    """Records at 10 Hz with all four wheels at the given rad/s values."""
    return [
        WheelRecord(t=t0 + i / 10.0, wheels=WheelSpeeds(w, w, w, w), fix=GnssFix(52.0, -1.5), yaw=yaw)
        for i, w in enumerate(speeds)
    ]


def straight_config(duration: float = 60.0, speed: float = 15.0, bias: Optional[Dict[str, float]] = None,
                    slips: Sequence[SlipEvent] = (), seed: int = 0, **kwargs) -> SyntheticConfig:
    return SyntheticConfig(
        duration=duration,
        speed_profile=[SpeedSegment(duration=duration, speed=speed)],
        yaw_profile=[YawSegment(duration=duration, rate=0.0)],
        bias=dict(bias or {}),
        slip_events=list(slips),
        initial_speed=speed,
        seed=seed,
        **kwargs,
    )


@pytest.fixture
def cal() -> Calibration:
    return Calibration(r=0.3)


@pytest.fixture
def straight_drive() -> List[WheelRecord]:
    return generate_synthetic(straight_config())


@pytest.fixture
def biased_drive() -> List[WheelRecord]:
    cfg = straight_config(duration=120.0, bias={'fl': 1.0, 'fr': 1.0, 'rl': 1.05, 'rr': 1.05})
    cfg.speed_profile = [SpeedSegment(30.0, 20.0), SpeedSegment(30.0, 8.0), SpeedSegment(60.0, 25.0)]
    return generate_synthetic(cfg)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
