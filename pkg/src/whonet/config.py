"""Run configuration.

A YAML run config may hold the sections ``synthetic``, ``dataset``, ``model``,
``train``, ``eval``, ``schema``, ``calibration`` and a top-level ``seed``. Command-line
flags override the file, the file overrides the built-in defaults (the
reference training setup: lr 0.0007, batch 128, dropout 0.05, 72 hidden units).
"""
from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from .dataset.io import SchemaConfig
from .dataset.synthetic import SyntheticConfig
from .dataset.windows import OUTAGE_LENGTHS
from .errors import ConfigError
from .geodesy import GNSS_ACCURACY_M
from .models import SAMPLE_RATE_HZ, Calibration
from .network import ModelConfig
from .training import TrainConfig

log = logging.getLogger(__name__)

SECTIONS = ('synthetic', 'dataset', 'model', 'train', 'eval', 'schema', 'calibration', 'seed')
SEEDED = ('synthetic', 'model', 'train')

DEFAULTS: Dict[str, Any] = {
    'seed': 0,
    'synthetic': {},
    # stride 10 = non-overlapping one-second windows; smaller strides apply to training only
    'dataset': {'stride': SAMPLE_RATE_HZ, 'stationary_bound': GNSS_ACCURACY_M},
    'model': ModelConfig().to_dict(),
    'train': TrainConfig().to_dict(),
    'eval': {'outage_len_s': 30, 'workers': None},
    'schema': {},
    'calibration': {'r': 0.3},
}


def load_config(path: str | Path | None) -> Dict[str, Any]:
    """Parse a YAML run config; ``None`` gives an empty mapping."""
    if path is None:
        return {}
    with open(path, 'r', encoding='utf-8') as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as exc:
            raise ConfigError(f'{path}: malformed YAML ({exc})') from exc
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f'{path}: top level must be a mapping')
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigError(f'{path}: unknown sections {unknown}, expected some of {list(SECTIONS)}')
    return data


def merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursive merge; ``None`` values in ``override`` leave ``base`` alone."""
    out = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if value is None:
            continue
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    out_dir: Path = Path('out')
    synthetic: Dict[str, Any] = field(default_factory=dict)
    dataset: Dict[str, Any] = field(default_factory=lambda: dict(DEFAULTS['dataset']))
    model: ModelConfig = field(default_factory=ModelConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    eval: Dict[str, Any] = field(default_factory=lambda: dict(DEFAULTS['eval']))
    schema: SchemaConfig = field(default_factory=SchemaConfig)
    calibration: Calibration = field(default_factory=lambda: Calibration(r=0.3))

    def synthetic_config(self) -> SyntheticConfig:
        return SyntheticConfig.from_dict(self.synthetic)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'command': self.command,
            'seed': self.seed,
            'out_dir': str(self.out_dir),
            'synthetic': copy.deepcopy(self.synthetic),
            'dataset': dict(self.dataset),
            'model': self.model.to_dict(),
            'train': self.train.to_dict(),
            'eval': dict(self.eval),
            'schema': self.schema.to_dict(),
            'calibration': {'r': self.calibration.r},
        }


def resolve(command: str, file_cfg: Optional[Dict[str, Any]] = None, overrides: Optional[Dict[str, Any]] = None,
            out_dir: str | Path = 'out') -> RunConfig:
    """Fold defaults, file and flag values into a validated RunConfig."""
    file_cfg = file_cfg or {}
    overrides = overrides or {}
    merged = merge(merge(DEFAULTS, file_cfg), overrides)
    seed = int(merged['seed'])
    for section in SEEDED:
        # a --seed flag wins everywhere; otherwise a section keeps its own seed from the file
        own = (file_cfg.get(section) or {}).get('seed')
        if overrides.get('seed') is not None or own is None:
            merged[section]['seed'] = seed

    synthetic = merged['synthetic']
    if 'preset' not in synthetic and 'speed_profile' not in synthetic:
        synthetic['preset'] = 'mixed'

    outage = merged['eval'].get('outage_len_s')
    if outage not in OUTAGE_LENGTHS:
        raise ConfigError(f'eval.outage_len_s must be one of {OUTAGE_LENGTHS}, got {outage!r}')
    dataset = merged['dataset']
    unknown = sorted(set(dataset) - set(DEFAULTS['dataset']))
    if unknown:
        raise ConfigError(f'unknown dataset options {unknown}')
    if not isinstance(dataset['stride'], int) or not 1 <= dataset['stride'] <= SAMPLE_RATE_HZ:
        raise ConfigError(f'dataset.stride must be an integer in 1..{SAMPLE_RATE_HZ}, got {dataset["stride"]!r}')
    bound = dataset['stationary_bound']
    if isinstance(bound, bool) or not isinstance(bound, (int, float)) or not bound > 0:
        raise ConfigError(f'dataset.stationary_bound must be > 0, got {bound!r}')
    try:
        model = ModelConfig(**merged['model'])
        train = TrainConfig(**merged['train'])
        calibration = Calibration(r=float(merged['calibration']['r']))
    except (TypeError, KeyError) as exc:
        raise ConfigError(f'invalid config: {exc}') from exc
    cfg = RunConfig(command=command, seed=seed, out_dir=Path(out_dir), synthetic=synthetic, dataset=dataset,
                    model=model, train=train, eval=merged['eval'], schema=SchemaConfig.from_dict(merged['schema']),
                    calibration=calibration)
    log.debug('resolved config: %s', cfg.to_dict())
    return cfg
