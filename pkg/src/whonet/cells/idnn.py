from __future__ import annotations

import numpy as np

from .common import Cell, Params, State


class InputDelayCell(Cell):
    """Feed-forward hidden layer over the time-delayed input window."""
    recurrent = False
    state_size = 0

    def forward(self, params: Params, x: np.ndarray, state: State):
        h = np.tanh(x @ params['W'] + params['b'])
        return h, (), {'x': x, 'h': h}

    def backward(self, params: Params, cache: dict, dh: np.ndarray) -> Params:
        da = dh * (1.0 - cache['h'] ** 2)
        return {'W': cache['x'].T @ da, 'b': da.sum(axis=0)}
