"""Model file container.

A model file is a single JSON document::

    {"format": "whonet-model", "version": 1,
     "config": {...ModelConfig...},
     "calibration": {"r": 0.3} | null,
     "normalizer": {"min": [40 floats], "max": [40 floats]} | null,
     "tensors": {"W": {"shape": [40, 72], "data": [row-major floats]}, ...},
     "manifest": {...}}

Keys are sorted and floats are written with their shortest round-trip repr,
so saving is lossless and identical models produce identical bytes.
"""
from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np

from .dataset.normalize import NormalizerParams
from .errors import ConfigError, ModelFormatError
from .models import Calibration
from .network import ModelConfig, NetworkModel

log = logging.getLogger(__name__)

FORMAT = 'whonet-model'
VERSION = 1


def model_to_dict(model: NetworkModel) -> dict:
    return {
        'format': FORMAT,
        'version': VERSION,
        'config': model.config.to_dict(),
        'calibration': None if model.calibration is None else {'r': model.calibration.r},
        'normalizer': None if model.normalizer is None else model.normalizer.to_dict(),
        'tensors': {
            name: {'shape': list(arr.shape), 'data': np.ravel(arr, order='C').tolist()}
            for name, arr in model.params.items()
        },
        'manifest': model.manifest,
    }


def model_from_dict(doc: dict) -> NetworkModel:
    if doc.get('format') != FORMAT:
        raise ModelFormatError(f'not a {FORMAT} document')
    if doc.get('version') != VERSION:
        raise ModelFormatError(f'unsupported model file version {doc.get("version")!r}')
    try:
        params = {
            name: np.array(t['data'], dtype=np.float64).reshape(t['shape'])
            for name, t in doc['tensors'].items()
        }
        cal = doc.get('calibration')
        norm = doc.get('normalizer')
        return NetworkModel(
            config=ModelConfig(**doc['config']),
            params=params,
            normalizer=None if norm is None else NormalizerParams.from_dict(norm),
            calibration=None if cal is None else Calibration(r=cal['r']),
            manifest=doc.get('manifest', {}),
        )
    except (KeyError, TypeError, ValueError, ConfigError) as exc:
        raise ModelFormatError(f'malformed model document: {exc}') from exc


def dumps_model(model: NetworkModel) -> str:
    return json.dumps(model_to_dict(model), sort_keys=True, separators=(',', ':'), allow_nan=False) + '\n'


def save_model(model: NetworkModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_model(model), encoding='utf-8')
    log.info('saved model (%d parameters) to %s', model.n_params, path)
    return path


def load_model(path: str | Path) -> NetworkModel:
    try:
        doc = json.loads(Path(path).read_text(encoding='utf-8'))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f'{path}: not valid JSON ({exc})') from exc
    return model_from_dict(doc)
