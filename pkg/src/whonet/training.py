from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .cells.common import State
from .dataset.normalize import apply_normalizer, feature_matrix, fit_normalizer
from .errors import ConfigError, DivergenceError, InvalidInputError, NoDataError
from .models import Calibration, TrainingWindow
from .network import ModelConfig, NetworkModel, backward, forward, init_model, predict_segment

log = logging.getLogger(__name__)


@dataclass
class TrainConfig:
    learning_rate: float = 0.0007
    batch_size: int = 128
    epochs: int = 100
    loss: str = 'mae'
    optimizer: str = 'adamax'
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.learning_rate > 0:
            raise ConfigError('learning_rate must be > 0')
        if self.batch_size < 1 or self.epochs < 1:
            raise ConfigError('batch_size and epochs must be >= 1')
        if self.loss != 'mae' or self.optimizer != 'adamax':
            raise ConfigError('only the mae loss with the adamax optimizer is implemented')

    def to_dict(self) -> dict:
        return asdict(self)


def mae_loss(pred: Sequence[float], target: Sequence[float]) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise InvalidInputError(f'prediction/target shapes differ: {pred.shape} vs {target.shape}')
    if pred.size == 0:
        raise InvalidInputError('mae_loss needs at least one sample')
    return float(np.abs(pred - target).sum() / pred.size)


def mae_gradient(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    # subgradient 0 where the residual is exactly 0
    return np.sign(pred - target) / pred.size


@dataclass
class AdamaxState:
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    u: Dict[str, np.ndarray] = field(default_factory=dict)
    t: int = 0

    @classmethod
    def for_params(cls, params: Dict[str, np.ndarray]) -> 'AdamaxState':
        return cls(m={k: np.zeros_like(v) for k, v in params.items()},
                   u={k: np.zeros_like(v) for k, v in params.items()})


def adamax_step(params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray], state: AdamaxState,
                cfg: TrainConfig) -> Dict[str, np.ndarray]:
    """In-place adamax update of ``params``; returns them for chaining."""
    state.t += 1
    step = cfg.learning_rate / (1.0 - cfg.beta1 ** state.t)
    for name in sorted(params):
        g = grads[name]
        m = state.m[name]
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        state.u[name] = np.maximum(cfg.beta2 * state.u[name], np.abs(g))
        params[name] -= step * m / (state.u[name] + cfg.eps)
    return params


@dataclass
class TrainResult:
    model: NetworkModel
    loss_trace: List[float]


def _lanes(n: int, batch: int) -> Tuple[np.ndarray, np.ndarray]:
    """Split a stream of ``n`` windows into ``batch`` contiguous lanes.

    Step k of training takes the k-th window of every lane, so each lane's
    hidden state follows its own stretch of consecutive seconds.
    """
    lanes = min(batch, n)
    length = math.ceil(n / lanes)
    idx = np.arange(lanes * length).reshape(lanes, length)
    return idx, idx < n


def _gather(state: State, rows: np.ndarray) -> State:
    return tuple(s[rows] for s in state)


def train(windows: Sequence[TrainingWindow], model_config: ModelConfig, train_config: TrainConfig,
          calibration: Optional[Calibration] = None) -> TrainResult:
    """Fit a network on ``windows`` (in stream order) and attach the fitted normalizer."""
    if not windows:
        raise NoDataError('no training windows')
    normalizer = fit_normalizer(windows)
    X = apply_normalizer(normalizer, feature_matrix(windows))
    y = np.array([w.y.epsilon for w in windows])
    seg = np.array([w.segment for w in windows])
    new_seg = np.ones(len(windows), dtype=bool)
    new_seg[1:] = seg[1:] != seg[:-1]

    model = init_model(model_config)
    model.normalizer = normalizer
    model.calibration = calibration
    opt = AdamaxState.for_params(model.params)
    shuffle_rng = np.random.default_rng([train_config.seed, 2])
    cell = model.cell
    trace: List[float] = []

    log.info('training %s H=%d on %d windows for %d epochs (%s)', model_config.cell.value,
             model_config.hidden, len(windows), train_config.epochs,
             'stateful' if model_config.stateful else 'stateless')
    for epoch in range(1, train_config.epochs + 1):
        total = 0.0
        if model_config.stateful:
            idx, valid = _lanes(len(windows), train_config.batch_size)
            state = cell.zero_state(idx.shape[0])
            for k in range(idx.shape[1]):
                live = valid[:, k]
                rows = idx[live, k]
                lane_state = _gather(state, live)
                reset = new_seg[rows]
                for s in lane_state:
                    s[reset] = 0.0
                res = forward(model, X[rows], lane_state, mode='train')
                total += float(np.abs(res.pred - y[rows]).sum())
                grads = backward(model, res.cache, mae_gradient(res.pred, y[rows]))
                adamax_step(model.params, grads, opt, train_config)
                for s, s_new in zip(state, res.state):
                    s[live] = s_new
        else:
            order = shuffle_rng.permutation(len(windows))
            for start in range(0, len(order), train_config.batch_size):
                rows = order[start:start + train_config.batch_size]
                res = forward(model, X[rows], None, mode='train')
                total += float(np.abs(res.pred - y[rows]).sum())
                grads = backward(model, res.cache, mae_gradient(res.pred, y[rows]))
                adamax_step(model.params, grads, opt, train_config)

        loss = total / len(windows)
        if not math.isfinite(loss):
            log.error('loss is %s at epoch %d', loss, epoch)
            raise DivergenceError(epoch, loss)
        trace.append(loss)
        if epoch == 1 or epoch % 10 == 0 or epoch == train_config.epochs:
            log.info('epoch %d/%d mae=%.6f', epoch, train_config.epochs, loss)
        else:
            log.debug('epoch %d/%d mae=%.6f', epoch, train_config.epochs, loss)

    model.manifest = {
        'train_config': train_config.to_dict(),
        'model_config': model_config.to_dict(),
        'n_windows': len(windows),
        'epochs_run': len(trace),
        'init': 'glorot_uniform',
    }
    return TrainResult(model=model, loss_trace=trace)


def fit_summary(model: NetworkModel, windows: Sequence[TrainingWindow]) -> Dict[str, float]:
    """Eval-mode MAE of ``model`` on ``windows``."""
    pred = predict_segment(model, windows)
    return {'mae': mae_loss(pred, [w.y.epsilon for w in windows]), 'n': float(len(windows))}

