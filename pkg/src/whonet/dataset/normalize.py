from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InvalidInputError, NoDataError
from ..models import N_FEATURES, TrainingWindow


@dataclass
class NormalizerParams:
    """Per-feature min/max fitted on training windows only.

    Constant features map to 0. Inputs outside the fitted range are not
    clipped.
    """
    min: np.ndarray
    max: np.ndarray

    def __post_init__(self) -> None:
        self.min = np.asarray(self.min, dtype=np.float64)
        self.max = np.asarray(self.max, dtype=np.float64)
        if self.min.shape != self.max.shape or self.min.ndim != 1:
            raise InvalidInputError('normalizer min/max must be equal-length vectors')
        if (self.max < self.min).any():
            raise InvalidInputError('normalizer max must be >= min per feature')

    @property
    def span(self) -> np.ndarray:
        return self.max - self.min

    def to_dict(self) -> dict:
        return {'min': self.min.tolist(), 'max': self.max.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> 'NormalizerParams':
        return cls(min=np.array(data['min'], dtype=np.float64), max=np.array(data['max'], dtype=np.float64))


def fit_normalizer(windows: Sequence[TrainingWindow]) -> NormalizerParams:
    if not windows:
        raise NoDataError('cannot fit a normalizer on an empty window set')
    x = np.stack([w.x for w in windows])
    return NormalizerParams(min=x.min(axis=0), max=x.max(axis=0))


def apply_normalizer(params: NormalizerParams, x: np.ndarray) -> np.ndarray:
    """Scale raw features (a vector or a batch of rows) to [0, 1] on the fitted range."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != params.min.shape[0]:
        raise InvalidInputError(f'expected {params.min.shape[0]} features, got {x.shape[-1]}')
    span = params.span
    live = span > 0
    out = np.zeros_like(x)
    out[..., live] = (x[..., live] - params.min[live]) / span[live]
    return out


def unapply_normalizer(params: NormalizerParams, z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    return z * params.span + params.min


def feature_matrix(windows: Sequence[TrainingWindow]) -> np.ndarray:
    if not windows:
        return np.zeros((0, N_FEATURES))
    return np.stack([w.x for w in windows])
