import json

import numpy as np
import pytest

from whonet.dataset import NormalizerParams
from whonet.errors import ModelFormatError
from whonet.models import Calibration
from whonet.network import ModelConfig, init_model
from whonet.storage import dumps_model, load_model, model_from_dict, model_to_dict, save_model


@pytest.fixture
def model(rng):
    m = init_model(ModelConfig(cell='LSTM', hidden=5, seed=3))
    m.normalizer = NormalizerParams(min=rng.normal(size=40), max=rng.normal(size=40) + 10.0)
    m.calibration = Calibration(r=0.31)
    m.manifest = {'epochs_run': 2}
    return m


def test_save_load_is_lossless(tmp_path, model):
    loaded = load_model(save_model(model, tmp_path / 'm' / 'model.json'))
    assert loaded.config == model.config
    assert loaded.calibration == model.calibration
    assert loaded.manifest == model.manifest
    for name, arr in model.params.items():
        np.testing.assert_array_equal(loaded.params[name], arr)
    np.testing.assert_array_equal(loaded.normalizer.min, model.normalizer.min)
    np.testing.assert_array_equal(loaded.normalizer.max, model.normalizer.max)


def test_identical_models_identical_bytes(tmp_path, model):
    first = save_model(model, tmp_path / 'a.json').read_bytes()
    second = save_model(load_model(tmp_path / 'a.json'), tmp_path / 'b.json').read_bytes()
    assert first == second


def test_loaded_model_predicts_the_same(tmp_path, model, rng):
    from whonet.models import ErrorLabel, TrainingWindow
    from whonet.network import predict_segment

    windows = [TrainingWindow(x=rng.normal(size=40), y=ErrorLabel(0.0), x_whr=0.0, x_gnss=0.0,
                              t_end=float(i), yaw=0.0) for i in range(4)]
    loaded = load_model(save_model(model, tmp_path / 'model.json'))
    np.testing.assert_array_equal(predict_segment(loaded, windows), predict_segment(model, windows))


def test_wrong_format_rejected(model):
    doc = model_to_dict(model)
    doc['format'] = 'keras'
    with pytest.raises(ModelFormatError):
        model_from_dict(doc)


def test_future_version_rejected(model):
    doc = model_to_dict(model)
    doc['version'] = 2
    with pytest.raises(ModelFormatError):
        model_from_dict(doc)


def test_truncated_tensor_rejected(model):
    doc = json.loads(dumps_model(model))
    doc['tensors']['W']['data'] = doc['tensors']['W']['data'][:-1]
    with pytest.raises(ModelFormatError):
        model_from_dict(doc)


def test_bad_config_rejected(model):
    doc = model_to_dict(model)
    doc['config']['cell'] = 'TRANSFORMER'
    with pytest.raises(ModelFormatError):
        model_from_dict(doc)


def test_not_json(tmp_path):
    path = tmp_path / 'model.json'
    path.write_text('PK\x03\x04')
    with pytest.raises(ModelFormatError):
        load_model(path)
