from __future__ import annotations

import numpy as np

from .common import Cell, Params, State


class SimpleRnnCell(Cell):
    """h = tanh(x W + h_prev U + b)"""

    def forward(self, params: Params, x: np.ndarray, state: State):
        (h_prev,) = state
        h = np.tanh(x @ params['W'] + h_prev @ params['U'] + params['b'])
        return h, (h,), {'x': x, 'h_prev': h_prev, 'h': h}

    def backward(self, params: Params, cache: dict, dh: np.ndarray) -> Params:
        da = dh * (1.0 - cache['h'] ** 2)
        return {
            'W': cache['x'].T @ da,
            'U': cache['h_prev'].T @ da,
            'b': da.sum(axis=0),
        }
