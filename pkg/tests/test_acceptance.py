import numpy as np
import pytest

from conftest import straight_config
from whonet.dataset import build_corpus
from whonet.dataset.synthetic import SpeedSegment, generate_synthetic, preset_config
from whonet.evaluation import NullPredictor, run_outage_experiment
from whonet.network import ModelConfig
from whonet.training import TrainConfig, train

REAR_BIAS = {'fl': 1.0, 'fr': 1.0, 'rl': 1.05, 'rr': 1.05}


def _training_drive():
    cfg = straight_config(duration=600.0, bias=REAR_BIAS, speed=10.0)
    speeds = [10.0, 25.0, 5.0, 30.0, 15.0, 20.0, 8.0, 28.0, 12.0, 18.0]
    cfg.speed_profile = [SpeedSegment(60.0, s) for s in speeds]
    return generate_synthetic(cfg)


@pytest.mark.slow
def test_rear_bias_is_learned(cal, biased_drive):
    windows = build_corpus([_training_drive()], cal)
    result = train(windows, ModelConfig(hidden=32, seed=0),
                   TrainConfig(learning_rate=0.005, batch_size=32, epochs=400, seed=0), calibration=cal)
    assert np.isfinite(result.loss_trace).all()

    corrected = run_outage_experiment(result.model, biased_drive, 30, cal, scenario='biased')
    reduction = corrected.summary.reduction()
    assert reduction['crse.mean'] >= 90.0

    baseline = run_outage_experiment(NullPredictor(), biased_drive, 30, cal, scenario='biased')
    assert baseline.summary.reduction()['crse.mean'] == 0.0
    physical = corrected.summary.methods['physical'].crse.mean
    assert physical == pytest.approx(baseline.summary.methods['physical'].crse.mean)


@pytest.mark.slow
def test_mixed_drive_with_slip_and_noise(cal):
    """Half an hour of mixed driving, default network and optimiser, 180 s outages."""
    noisy = dict(bias=REAR_BIAS, noise_sigma=0.05)
    train_drive = generate_synthetic(preset_config('mixed', duration=1800.0, seed=21, **noisy))
    test_drive = generate_synthetic(preset_config('mixed', duration=600.0, seed=22, **noisy))

    result = train(build_corpus([train_drive], cal), ModelConfig(seed=0), TrainConfig(epochs=400, seed=0),
                   calibration=cal)
    experiment = run_outage_experiment(result.model, test_drive, 180, cal, scenario='mixed')
    assert experiment.summary.n_sequences >= 3
    assert experiment.summary.reduction()['crse.mean'] >= 90.0
