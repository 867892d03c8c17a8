import numpy as np
import pytest

from whonet.dataset import NormalizerParams
from whonet.errors import ConfigError, InvalidInputError, MissingNormalizerError
from whonet.models import ErrorLabel, TrainingWindow
from whonet.network import (
    CellKind,
    CellState,
    ModelConfig,
    NetworkModel,
    backward,
    forward,
    init_model,
    param_count,
    predict_error,
    predict_segment,
    param_table,
)

# trainable parameters with 40 inputs, by hidden width
REFERENCE_COUNTS = {
    32: (2369, 7041, 9377, 1345),
    48: (4321, 12865, 17137, 2017),
    64: (6785, 20225, 26945, 2689),
    72: (8209, 24481, 32617, 3025),
    128: (21761, 65025, 86657, 5377),
    256: (76289, 228353, 304385, 10753),
    512: (283649, 849921, 1133057, 21505),
}
KINDS = (CellKind.SRNN, CellKind.GRU, CellKind.LSTM, CellKind.IDNN)


def test_parameter_table_matches_reference_counts():
    rows = param_table()
    assert [r['hidden'] for r in rows] == list(REFERENCE_COUNTS)
    for row in rows:
        assert tuple(row[k.value] for k in KINDS) == REFERENCE_COUNTS[row['hidden']]


@pytest.mark.parametrize('hidden', list(REFERENCE_COUNTS))
@pytest.mark.parametrize('kind', KINDS)
def test_allocated_tensors_match_param_count(kind, hidden):
    model = init_model(ModelConfig(cell=kind, hidden=hidden))
    assert model.n_params == param_count(kind, 40, hidden) == REFERENCE_COUNTS[hidden][KINDS.index(kind)]


def test_param_count_accepts_names():
    assert param_count('srnn') == 8209
    assert param_count('lstm', 40, 512) == 1133057


def test_lstm_forget_bias_starts_at_one():
    model = init_model(ModelConfig(cell='LSTM', hidden=6))
    b = model.params['b']
    np.testing.assert_array_equal(b[6:12], np.ones(6))
    np.testing.assert_array_equal(np.delete(b, np.s_[6:12]), np.zeros(18))


def test_same_seed_same_weights():
    a = init_model(ModelConfig(seed=3, hidden=16))
    b = init_model(ModelConfig(seed=3, hidden=16))
    for name in a.params:
        np.testing.assert_array_equal(a.params[name], b.params[name])


@pytest.mark.parametrize('change', [dict(dropout_rate=1.0), dict(hidden=0), dict(cell='CNN'), dict(output_dim=2)])
def test_invalid_model_config(change):
    with pytest.raises(ConfigError):
        ModelConfig(**change)


def test_wrong_tensor_shape_rejected():
    model = init_model(ModelConfig(hidden=4))
    params = dict(model.params, V=np.zeros((5, 1)))
    with pytest.raises(InvalidInputError):
        NetworkModel(config=model.config, params=params)


def test_hand_computed_simple_rnn():
    config = ModelConfig(cell='SRNN', input_dim=2, hidden=2, dropout_rate=0.0)
    params = {
        'W': np.array([[0.5, -0.2], [0.1, 0.3]]),
        'U': np.array([[0.4, 0.0], [-0.1, 0.2]]),
        'b': np.array([0.05, -0.05]),
        'V': np.array([[1.5], [-2.0]]),
        'c': np.array([0.25]),
    }
    model = NetworkModel(config=config, params=params)
    x = np.array([1.0, 2.0])
    h_prev = np.array([[0.5, -0.5]])
    h = np.tanh(np.array([0.5 * 1 + 0.1 * 2 + 0.4 * 0.5 + -0.1 * -0.5 + 0.05,
                          -0.2 * 1 + 0.3 * 2 + 0.0 * 0.5 + 0.2 * -0.5 - 0.05]))
    result = forward(model, x, (h_prev,))
    assert result.pred[0] == pytest.approx(1.5 * h[0] - 2.0 * h[1] + 0.25, abs=1e-12)
    np.testing.assert_allclose(result.state[0][0], h, atol=1e-12)


def _loss(model, x, state, weights, rng_seed=None):
    rng = None if rng_seed is None else np.random.default_rng(rng_seed)
    mode = 'eval' if rng_seed is None else 'train'
    return float(forward(model, x, state, mode=mode, rng=rng).pred @ weights)


@pytest.mark.parametrize('kind', KINDS)
@pytest.mark.parametrize('dropout', [0.0, 0.3])
def test_gradients_match_finite_differences(kind, dropout):
    rng = np.random.default_rng(11)
    model = init_model(ModelConfig(cell=kind, input_dim=5, hidden=4, dropout_rate=dropout, seed=2))
    for name in model.params:
        model.params[name] = model.params[name] + rng.normal(0.0, 0.3, size=model.params[name].shape)
    x = rng.normal(size=(3, 5))
    state = tuple(rng.normal(0.0, 0.5, size=(3, 4)) for _ in range(model.cell.state_size))
    weights = rng.normal(size=3)
    seed = 99 if dropout else None

    mode = 'train' if dropout else 'eval'
    res = forward(model, x, state, mode=mode, rng=np.random.default_rng(99) if dropout else None)
    grads = backward(model, res.cache, weights)

    eps = 1e-6
    for name, tensor in model.params.items():
        numeric = np.zeros_like(tensor)
        for idx in np.ndindex(tensor.shape):
            orig = tensor[idx]
            tensor[idx] = orig + eps
            up = _loss(model, x, state, weights, seed)
            tensor[idx] = orig - eps
            down = _loss(model, x, state, weights, seed)
            tensor[idx] = orig
            numeric[idx] = (up - down) / (2 * eps)
        np.testing.assert_allclose(grads[name], numeric, rtol=1e-5, atol=1e-7, err_msg=f'{kind.value}:{name}')


def test_dropout_is_unbiased_in_expectation():
    model = init_model(ModelConfig(cell='IDNN', input_dim=5, hidden=8, dropout_rate=0.05, seed=4))
    x = np.tile(np.linspace(-1.0, 1.0, 5), (100_000, 1))
    train = forward(model, x, mode='train', rng=np.random.default_rng(0))
    evaluated = forward(model, x[:1], mode='eval').pred[0]
    assert train.pred.mean() == pytest.approx(evaluated, abs=1e-2)
    assert (train.cache['keep'] == 0).mean() == pytest.approx(0.05, abs=5e-3)


def test_eval_mode_is_deterministic():
    model = init_model(ModelConfig(input_dim=5, hidden=8, dropout_rate=0.5))
    x = np.ones((2, 5))
    np.testing.assert_array_equal(forward(model, x).pred, forward(model, x).pred)


def test_forward_rejects_wrong_width():
    model = init_model(ModelConfig(input_dim=5, hidden=3))
    with pytest.raises(InvalidInputError):
        forward(model, np.ones(6))


def _windows(rng, n, segment):
    return [TrainingWindow(x=rng.normal(size=40), y=ErrorLabel(0.0), x_whr=0.0, x_gnss=0.0,
                           t_end=float(i), yaw=0.0, segment=segment) for i in range(n)]


def _with_normalizer(model):
    model.normalizer = NormalizerParams(min=np.full(40, -3.0), max=np.full(40, 3.0))
    return model


def test_state_resets_at_segment_change(rng):
    model = _with_normalizer(init_model(ModelConfig(hidden=8)))
    first, second = _windows(rng, 5, 0), _windows(rng, 3, 1)
    joint = predict_segment(model, first + second)
    np.testing.assert_array_equal(joint[5:], predict_segment(model, second))
    # within a segment the carried state matters
    assert joint[4] != predict_segment(model, first[4:])[0]


def test_stateless_config_ignores_state(rng):
    model = _with_normalizer(init_model(ModelConfig(hidden=8, stateful=False)))
    windows = _windows(rng, 4, 0)
    carried = predict_segment(model, windows)
    fresh = [predict_error(model, w).epsilon for w in windows]
    np.testing.assert_array_equal(carried, fresh)


def test_predict_error_advances_state(rng):
    model = _with_normalizer(init_model(ModelConfig(cell='GRU', hidden=8)))
    windows = _windows(rng, 2, 7)
    state = CellState()
    predict_error(model, windows[0], state)
    assert state.segment == 7 and state.value is not None
    assert isinstance(predict_error(model, windows[1], state), ErrorLabel)


def test_missing_normalizer(rng):
    model = init_model(ModelConfig(hidden=4))
    with pytest.raises(MissingNormalizerError):
        predict_error(model, _windows(rng, 1, 0)[0])
