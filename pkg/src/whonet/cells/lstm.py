from __future__ import annotations

import numpy as np

from .common import Cell, Params, State, sigmoid


class LstmCell(Cell):
    """LSTM with gate blocks [i, f, g, o]; the forget bias starts at 1."""
    gates = 4
    state_size = 2

    def init_params(self, rng: np.random.Generator) -> Params:
        params = super().init_params(rng)
        params['b'][self.hidden:2 * self.hidden] = 1.0
        return params

    def forward(self, params: Params, x: np.ndarray, state: State):
        h_prev, c_prev = state
        H = self.hidden
        a = x @ params['W'] + h_prev @ params['U'] + params['b']
        i = sigmoid(a[:, :H])
        f = sigmoid(a[:, H:2 * H])
        g = np.tanh(a[:, 2 * H:3 * H])
        o = sigmoid(a[:, 3 * H:])
        c = f * c_prev + i * g
        tc = np.tanh(c)
        h = o * tc
        cache = {'x': x, 'h_prev': h_prev, 'c_prev': c_prev, 'i': i, 'f': f, 'g': g, 'o': o, 'tc': tc}
        return h, (h, c), cache

    def backward(self, params: Params, cache: dict, dh: np.ndarray) -> Params:
        i, f, g, o, tc = cache['i'], cache['f'], cache['g'], cache['o'], cache['tc']
        dc = dh * o * (1.0 - tc ** 2)
        da = np.concatenate([
            dc * g * i * (1.0 - i),
            dc * cache['c_prev'] * f * (1.0 - f),
            dc * i * (1.0 - g ** 2),
            dh * tc * o * (1.0 - o),
        ], axis=1)
        return {'W': cache['x'].T @ da, 'U': cache['h_prev'].T @ da, 'b': da.sum(axis=0)}
