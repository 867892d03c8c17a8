"""GNSS-outage evaluation.

Every outage sequence is scored twice: the physical model's per-second error
``x_whr - x_gnss`` and the corrected error ``(x_whr - eps_hat) - x_gnss``.
Per sequence we sum them into CRSE (absolute) and CTE (signed); over a scenario
we report max, min, mean and population standard deviation.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Protocol, Sequence, TypeVar

import numpy as np
import psutil

from .dataset.windows import build_corpus, split_outage_sequences
from .deadreckon import update_position
from .errors import InvalidInputError, NoDataError
from .geodesy import ned_to_fix
from .models import BodyDisplacement, Calibration, GnssFix, NedPosition, OutageSequence, TrainingWindow, WheelRecord

log = logging.getLogger(__name__)

PHYSICAL = 'physical'
CORRECTED = 'whonet'
METHODS = (PHYSICAL, CORRECTED)
METRICS = ('crse', 'cte')
STATS = ('max', 'min', 'mean', 'std')

T = TypeVar('T')
R = TypeVar('R')


def _as_errors(errors: Iterable[float]) -> np.ndarray:
    e = np.asarray(list(errors) if not isinstance(errors, np.ndarray) else errors, dtype=np.float64)
    if e.size == 0:
        raise InvalidInputError('error sequence is empty')
    return e


def crse(errors: Iterable[float]) -> float:
    """Cumulative root square error: sum over seconds of sqrt(e^2), i.e. sum |e|."""
    e = _as_errors(errors)
    return float(np.sum(np.sqrt(e * e)))


def cte(errors: Iterable[float]) -> float:
    """Cumulative true error: signed sum, exposes over/under-estimation."""
    return float(np.sum(_as_errors(errors)))


@dataclass
class SequenceResult:
    physical: np.ndarray  # per-second signed errors
    corrected: np.ndarray
    predicted: np.ndarray  # eps_hat per second
    distance: float
    segment: int = 0
    t_start: float = 0.0

    def errors(self, method: str) -> np.ndarray:
        return self.physical if method == PHYSICAL else self.corrected

    def crse(self, method: str) -> float:
        return crse(self.errors(method))

    def cte(self, method: str) -> float:
        return cte(self.errors(method))

    def cumulative(self, method: str) -> Dict[str, np.ndarray]:
        e = self.errors(method)
        return {'crse': np.cumsum(np.abs(e)), 'cte': np.cumsum(e)}


@dataclass
class Stats:
    max: float
    min: float
    mean: float
    std: float
    argmax: int = 0
    argmin: int = 0

    def as_dict(self) -> Dict[str, float]:
        return {'max': self.max, 'min': self.min, 'mean': self.mean, 'std': self.std}


def describe(values: Sequence[float]) -> Stats:
    x = np.asarray(values, dtype=np.float64)
    if x.size == 0:
        raise NoDataError('no values to aggregate')
    mu = float(np.sum(x) / x.size)
    sigma = float(np.sqrt(np.sum((x - mu) ** 2) / x.size))  # population form
    i_max, i_min = int(np.argmax(x)), int(np.argmin(x))  # first occurrence on ties
    return Stats(max=float(x[i_max]), min=float(x[i_min]), mean=mu, std=sigma, argmax=i_max, argmin=i_min)


@dataclass
class MethodMetrics:
    crse: Stats
    cte: Stats

    def stat(self, metric: str) -> Stats:
        return self.crse if metric == 'crse' else self.cte


@dataclass
class MetricsSummary:
    scenario: str
    outage_len_s: int
    methods: Dict[str, MethodMetrics]
    distance: Stats
    total_distance: float
    n_sequences: int

    def reduction(self) -> Dict[str, Optional[float]]:
        return error_reduction(self.methods[PHYSICAL], self.methods[CORRECTED])


def aggregate(results: Sequence[SequenceResult], scenario: str = '', outage_len_s: int = 0) -> MetricsSummary:
    if not results:
        raise NoDataError('cannot aggregate zero sequences')
    methods = {
        m: MethodMetrics(crse=describe([r.crse(m) for r in results]),
                         cte=describe([r.cte(m) for r in results]))
        for m in METHODS
    }
    distances = [r.distance for r in results]
    return MetricsSummary(scenario=scenario, outage_len_s=outage_len_s, methods=methods,
                          distance=describe(distances), total_distance=float(np.sum(distances)),
                          n_sequences=len(results))


def error_reduction(physical: MethodMetrics, corrected: MethodMetrics) -> Dict[str, Optional[float]]:
    """Percent reduction per statistic, keyed ``'<metric>.<stat>'``.

    Takes the per-method metrics of one scenario (``MetricsSummary.methods``
    holds both; ``MetricsSummary.reduction`` is the usual entry point).
    The ratio is taken on magnitudes, ``100 * (1 - |corrected| / |physical|)``,
    because a CTE statistic may be negative; the physical statistic therefore
    only has to be nonzero. ``None`` when it is 0. Negative values mean the
    correction made things worse.
    """
    out: Dict[str, Optional[float]] = {}
    for metric in METRICS:
        p, c = physical.stat(metric).as_dict(), corrected.stat(metric).as_dict()
        for stat in STATS:
            base = abs(p[stat])
            out[f'{metric}.{stat}'] = None if base == 0 else 100.0 * (1.0 - abs(c[stat]) / base)
    return out


class ErrorPredictor(Protocol):
    def predict_segment(self, windows: Sequence[TrainingWindow]) -> np.ndarray: ...


class NullPredictor:
    """Predicts zero error: corrected output equals the physical model."""

    def predict_segment(self, windows: Sequence[TrainingWindow]) -> np.ndarray:
        return np.zeros(len(windows))


class OraclePredictor:
    """Predicts the true label: corrected errors vanish."""

    def predict_segment(self, windows: Sequence[TrainingWindow]) -> np.ndarray:
        return np.array([w.y.epsilon for w in windows], dtype=np.float64)


def default_workers() -> int:
    return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


def _pool_map(fn: Callable[[T], R], items: Sequence[T], workers: Optional[int]) -> List[R]:
    workers = workers or default_workers()
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))  # keeps input order


def _by_segment(windows: Sequence[TrainingWindow]) -> List[List[TrainingWindow]]:
    groups: List[List[TrainingWindow]] = []
    for w in windows:
        if groups and groups[-1][-1].segment == w.segment:
            groups[-1].append(w)
        else:
            groups.append([w])
    return groups


def score_sequence(seq: OutageSequence, predicted: np.ndarray) -> SequenceResult:
    x_whr, x_gnss = seq.x_whr, seq.x_gnss
    return SequenceResult(
        physical=x_whr - x_gnss,
        corrected=(x_whr - predicted) - x_gnss,
        predicted=predicted,
        distance=seq.distance,
        segment=seq.segment,
        t_start=seq.windows[0].t_end - 1.0,
    )


@dataclass
class ExperimentResult:
    summary: MetricsSummary
    sequences: List[SequenceResult] = field(default_factory=list)
    outages: List[OutageSequence] = field(default_factory=list)


def evaluate_windows(predictor: ErrorPredictor, windows: Sequence[TrainingWindow], outage_len_s: int,
                     scenario: str = 'test', workers: Optional[int] = None) -> ExperimentResult:
    """Score ``predictor`` against the physical model on every outage sequence of ``windows``."""
    outages = split_outage_sequences(windows, outage_len_s)
    if not outages:
        raise NoDataError(f'no complete {outage_len_s}s outage sequences in {len(windows)} windows')

    # whole segments are predicted in order so recurrent state sees the lead-in
    groups = _by_segment(windows)
    preds = _pool_map(predictor.predict_segment, groups, workers)
    by_window = {id(w): float(p) for g, ps in zip(groups, preds) for w, p in zip(g, ps)}

    def score(seq: OutageSequence) -> SequenceResult:
        return score_sequence(seq, np.array([by_window[id(w)] for w in seq.windows]))

    results = _pool_map(score, outages, workers)
    summary = aggregate(results, scenario=scenario, outage_len_s=outage_len_s)
    log.info('%s: %d x %ds sequences over %.0f m, mean CRSE physical=%.3f corrected=%.3f',
             scenario, summary.n_sequences, outage_len_s, summary.total_distance,
             summary.methods[PHYSICAL].crse.mean, summary.methods[CORRECTED].crse.mean)
    return ExperimentResult(summary=summary, sequences=results, outages=outages)


def run_outage_experiment(model: ErrorPredictor, test_records: Sequence[WheelRecord], outage_len_s: int,
                          cal: Calibration, scenario: str = 'test', workers: Optional[int] = None) -> ExperimentResult:
    windows = build_corpus([test_records], cal)
    return evaluate_windows(model, windows, outage_len_s, scenario=scenario, workers=workers)


def reconstruct_trajectories(seq: OutageSequence, predicted: Sequence[float]) -> Dict[str, List[GnssFix]]:
    """Truth, physical and corrected tracks of one outage, for plotting only.

    Physical and corrected tracks integrate the per-second displacement along
    the recorded heading from the last fix before the outage.
    """
    origin = seq.windows[0].fix_start
    if origin is None:
        raise InvalidInputError('outage windows carry no GNSS fixes')
    tracks = {'truth': [origin] + [w.fix_end for w in seq.windows]}
    for name, offsets in ((PHYSICAL, np.zeros(len(seq.windows))), ('corrected', np.asarray(predicted))):
        pos = NedPosition()
        fixes = [origin]
        for w, eps in zip(seq.windows, offsets):
            pos = update_position(pos, BodyDisplacement(x_whr=w.x_whr - float(eps)), w.yaw)
            fixes.append(ned_to_fix(origin, pos.north, pos.east))
        tracks[name] = fixes
    return tracks
