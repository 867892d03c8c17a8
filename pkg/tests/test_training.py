import numpy as np
import pytest

from whonet.errors import ConfigError, DivergenceError, InvalidInputError, NoDataError
from whonet.models import ErrorLabel, TrainingWindow
from whonet.network import ModelConfig
from whonet.training import AdamaxState, TrainConfig, _lanes, adamax_step, fit_summary, mae_gradient, mae_loss, train


def make_windows(n, label, seed=0, segments=1):
    rng = np.random.default_rng(seed)
    return [TrainingWindow(x=rng.uniform(20.0, 60.0, size=40), y=ErrorLabel(label), x_whr=0.0, x_gnss=0.0,
                           t_end=float(i), yaw=0.0, segment=i * segments // n) for i in range(n)]


def test_default_training_setup():
    t, m = TrainConfig(), ModelConfig()
    assert (t.learning_rate, t.batch_size, t.loss, t.optimizer) == (0.0007, 128, 'mae', 'adamax')
    assert (m.hidden, m.dropout_rate, m.input_dim, m.cell.value) == (72, 0.05, 40, 'SRNN')


@pytest.mark.parametrize('change', [dict(learning_rate=0.0), dict(batch_size=0), dict(loss='mse'),
                                    dict(optimizer='adam'), dict(epochs=0)])
def test_invalid_train_config(change):
    with pytest.raises(ConfigError):
        TrainConfig(**change)


def test_mae_loss():
    assert mae_loss([1.0, 2.0, 3.0], [1.0, 4.0, 0.0]) == pytest.approx(5.0 / 3.0)
    assert mae_loss([0.5], [0.5]) == 0.0


def test_mae_loss_errors():
    with pytest.raises(InvalidInputError):
        mae_loss([], [])
    with pytest.raises(InvalidInputError):
        mae_loss([1.0, 2.0], [1.0])


def test_mae_gradient_is_mean_sign():
    g = mae_gradient(np.array([2.0, 0.0, 1.0, -1.0]), np.array([1.0, 1.0, 1.0, 1.0]))
    np.testing.assert_array_equal(g, [0.25, -0.25, 0.0, -0.25])


def test_adamax_matches_reference_update():
    cfg = TrainConfig()
    params = {'w': np.array([1.0, -2.0])}
    state = AdamaxState.for_params(params)
    m, u, w = np.zeros(2), np.zeros(2), params['w'].copy()
    for t, g in enumerate([np.array([0.5, -0.1]), np.array([0.0, 0.3]), np.array([-1.0, 0.2])], start=1):
        adamax_step(params, {'w': g}, state, cfg)
        m = 0.9 * m + 0.1 * g
        u = np.maximum(0.999 * u, np.abs(g))
        w = w - (0.0007 / (1 - 0.9 ** t)) * m / (u + 1e-8)
        np.testing.assert_allclose(params['w'], w, rtol=1e-12, atol=1e-15)
    assert state.t == 3


def test_first_adamax_step_moves_by_learning_rate():
    params = {'w': np.array([1.0])}
    adamax_step(params, {'w': np.array([0.5])}, AdamaxState.for_params(params), TrainConfig())
    assert params['w'][0] == pytest.approx(1.0 - 0.0007, rel=1e-6)


def test_lanes_cover_stream_in_order():
    idx, valid = _lanes(10, 4)
    assert idx.shape == (4, 3)
    assert sorted(idx[valid].tolist()) == list(range(10))
    assert idx[0].tolist() == [0, 1, 2]


def test_learns_constant_label():
    windows = make_windows(64, 0.7)
    result = train(windows, ModelConfig(hidden=8, dropout_rate=0.0, seed=1),
                   TrainConfig(learning_rate=0.01, batch_size=16, epochs=200, seed=1))
    assert len(result.loss_trace) == 200
    assert result.loss_trace[-1] < 0.05
    assert fit_summary(result.model, windows)['mae'] < 0.1
    assert result.model.normalizer is not None
    assert result.model.manifest['epochs_run'] == 200


@pytest.mark.parametrize('stateful', [True, False])
def test_training_is_deterministic(stateful):
    windows = make_windows(40, 0.3, segments=3)
    mc = ModelConfig(cell='GRU', hidden=6, seed=5, stateful=stateful)
    tc = TrainConfig(batch_size=8, epochs=3, seed=5)
    a, b = train(windows, mc, tc), train(windows, mc, tc)
    assert a.loss_trace == b.loss_trace
    for name in a.model.params:
        np.testing.assert_array_equal(a.model.params[name], b.model.params[name])


def test_non_finite_loss_raises_divergence():
    windows = make_windows(8, float('inf'))
    with pytest.raises(DivergenceError) as info:
        train(windows, ModelConfig(hidden=4), TrainConfig(epochs=5, batch_size=4))
    assert info.value.epoch == 1
    assert info.value.exit_code == 4


def test_empty_training_set():
    with pytest.raises(NoDataError):
        train([], ModelConfig(), TrainConfig())
