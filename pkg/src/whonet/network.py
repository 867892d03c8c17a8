"""Compact error-prediction networks.

One hidden layer (simple recurrent, GRU, LSTM or input-delay dense) feeds a
linear single-unit output. The 40 inputs are one second of the four wheel
speeds at 10 Hz; the output is the displacement error of that second in
meters. Recurrent cells run with a time step of 1: the hidden state carries
over from the previous window of the same segment but gradients stop there.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

import numpy as np

from .cells import Cell, get_cell
from .cells.common import State
from .dataset.normalize import NormalizerParams, apply_normalizer
from .errors import ConfigError, InvalidInputError, MissingNormalizerError
from .models import N_FEATURES, Calibration, ErrorLabel, TrainingWindow

log = logging.getLogger(__name__)

PARAM_TABLE_WIDTHS = (32, 48, 64, 72, 128, 256, 512)
OUTPUT_PARAMS = ('V', 'c')


class CellKind(str, Enum):
    SRNN = 'SRNN'
    GRU = 'GRU'
    LSTM = 'LSTM'
    IDNN = 'IDNN'


@dataclass
class ModelConfig:
    cell: CellKind = CellKind.SRNN
    input_dim: int = N_FEATURES
    hidden: int = 72
    output_dim: int = 1
    dropout_rate: float = 0.05
    seed: int = 0
    stateful: bool = True

    def __post_init__(self) -> None:
        try:
            self.cell = CellKind(str(getattr(self.cell, 'value', self.cell)).upper())
        except ValueError as exc:
            raise ConfigError(f'unknown cell kind {self.cell!r}') from exc
        if self.hidden < 1 or self.input_dim < 1:
            raise ConfigError('hidden and input_dim must be >= 1')
        if self.output_dim != 1:
            raise ConfigError('only a single output unit is supported')
        if not 0 <= self.dropout_rate < 1:
            raise ConfigError(f'dropout_rate must be in [0, 1), got {self.dropout_rate}')

    def to_dict(self) -> dict:
        d = asdict(self)
        d['cell'] = self.cell.value
        return d


def param_count(cell: CellKind | str, input_dim: int = N_FEATURES, hidden: int = 72) -> int:
    """Trainable parameters of hidden layer plus the H x 1 output layer."""
    kind = CellKind(str(getattr(cell, 'value', cell)).upper())
    I, H = input_dim, hidden
    out = H + 1
    if kind is CellKind.IDNN:
        return H * (I + 1) + out
    gates = {CellKind.SRNN: 1, CellKind.GRU: 3, CellKind.LSTM: 4}[kind]
    return gates * H * (I + H + 1) + out


@dataclass
class NetworkModel:
    config: ModelConfig
    params: Dict[str, np.ndarray]
    normalizer: Optional[NormalizerParams] = None
    calibration: Optional[Calibration] = None
    manifest: dict = field(default_factory=dict)
    rng: np.random.Generator = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.rng is None:
            self.rng = np.random.default_rng([self.config.seed, 1])
        expected = dict(self.cell.shapes(), V=(self.config.hidden, 1), c=(1,))
        for name, shape in expected.items():
            if name not in self.params or self.params[name].shape != shape:
                got = self.params[name].shape if name in self.params else None
                raise InvalidInputError(f'tensor {name} should have shape {shape}, got {got}')

    @property
    def cell(self) -> Cell:
        return get_cell(self.config.cell.value, self.config.input_dim, self.config.hidden)

    @property
    def n_params(self) -> int:
        return sum(int(p.size) for p in self.params.values())

    def predict_segment(self, windows: Sequence[TrainingWindow]) -> np.ndarray:
        return predict_segment(self, windows)


def init_model(config: ModelConfig) -> NetworkModel:
    rng = np.random.default_rng(config.seed)
    cell = get_cell(config.cell.value, config.input_dim, config.hidden)
    params = cell.init_params(rng)
    limit = np.sqrt(6.0 / (config.hidden + 1))
    params['V'] = rng.uniform(-limit, limit, size=(config.hidden, 1))
    params['c'] = np.zeros(1)
    return NetworkModel(config=config, params=params)


@dataclass
class ForwardResult:
    pred: np.ndarray  # (B,)
    state: State
    cache: dict


def forward(model: NetworkModel, x: np.ndarray, state: Optional[State] = None, mode: str = 'eval',
            rng: Optional[np.random.Generator] = None) -> ForwardResult:
    """Predict the displacement error for normalized inputs ``x`` of shape (B, I) or (I,)."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.ndim != 2 or x.shape[1] != model.config.input_dim:
        raise InvalidInputError(f'expected inputs of width {model.config.input_dim}, got shape {x.shape}')
    if mode not in ('train', 'eval'):
        raise InvalidInputError(f'mode must be train or eval, got {mode!r}')
    cell = model.cell
    if state is None or not model.config.stateful:
        state = cell.zero_state(x.shape[0])
    h, new_state, cell_cache = cell.forward(model.params, x, state)

    keep = None
    p = model.config.dropout_rate
    if mode == 'train' and p > 0:
        rng = rng if rng is not None else model.rng
        keep = (rng.random(h.shape) >= p) / (1.0 - p)  # inverted dropout
        hd = h * keep
    else:
        hd = h
    pred = (hd @ model.params['V'] + model.params['c'])[:, 0]
    return ForwardResult(pred=pred, state=new_state, cache={'cell': cell_cache, 'hd': hd, 'keep': keep})


def backward(model: NetworkModel, cache: dict, dpred: np.ndarray) -> Dict[str, np.ndarray]:
    """Gradients of every trainable tensor given dLoss/dpred of shape (B,)."""
    dpred = np.asarray(dpred, dtype=np.float64).reshape(-1, 1)
    V = model.params['V']
    grads = {'V': cache['hd'].T @ dpred, 'c': dpred.sum(axis=0)}
    dh = dpred @ V.T
    if cache['keep'] is not None:
        dh = dh * cache['keep']
    grads.update(model.cell.backward(model.params, cache['cell'], dh))
    return grads


@dataclass
class CellState:
    """Hidden state carried between consecutive windows of one segment."""
    value: Optional[State] = None
    segment: Optional[int] = None

    def reset(self) -> None:
        self.value = None
        self.segment = None


def predict_error(model: NetworkModel, window: TrainingWindow, state: Optional[CellState] = None) -> ErrorLabel:
    """Predicted error of one raw window; advances ``state`` when given."""
    if model.normalizer is None:
        raise MissingNormalizerError('model carries no normalizer; was it trained?')
    z = apply_normalizer(model.normalizer, window.x)
    prev = None
    if state is not None and state.segment == window.segment:
        prev = state.value
    result = forward(model, z, prev, mode='eval')
    if state is not None:
        state.value, state.segment = result.state, window.segment
    return ErrorLabel(epsilon=float(result.pred[0]))


def predict_segment(model: NetworkModel, windows: Sequence[TrainingWindow]) -> np.ndarray:
    """Predictions for consecutive windows, resetting the state at segment breaks."""
    state = CellState()
    return np.array([predict_error(model, w, state).epsilon for w in windows])


def param_table(input_dim: int = N_FEATURES, widths: Sequence[int] = PARAM_TABLE_WIDTHS) -> List[Dict[str, int]]:
    kinds = (CellKind.SRNN, CellKind.GRU, CellKind.LSTM, CellKind.IDNN)
    return [dict(hidden=h, **{k.value: param_count(k, input_dim, h) for k in kinds}) for h in widths]
