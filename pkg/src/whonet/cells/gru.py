from __future__ import annotations

import numpy as np

from .common import Cell, Params, State, sigmoid


class GruCell(Cell):
    """GRU with gate blocks [z, r, h~] and a single bias per gate.

    The reset gate scales h_prev before the candidate's recurrent product,
    which gives 3H(I+H+1) weights.
    """
    gates = 3

    def forward(self, params: Params, x: np.ndarray, state: State):
        (h_prev,) = state
        H = self.hidden
        W, U, b = params['W'], params['U'], params['b']
        xw = x @ W
        hu = h_prev @ U[:, :2 * H]
        z = sigmoid(xw[:, :H] + hu[:, :H] + b[:H])
        r = sigmoid(xw[:, H:2 * H] + hu[:, H:] + b[H:2 * H])
        rh = r * h_prev
        cand = np.tanh(xw[:, 2 * H:] + rh @ U[:, 2 * H:] + b[2 * H:])
        h = z * h_prev + (1.0 - z) * cand
        cache = {'x': x, 'h_prev': h_prev, 'z': z, 'r': r, 'rh': rh, 'cand': cand}
        return h, (h,), cache

    def backward(self, params: Params, cache: dict, dh: np.ndarray) -> Params:
        H = self.hidden
        U = params['U']
        z, r, cand, h_prev = cache['z'], cache['r'], cache['cand'], cache['h_prev']
        da_c = dh * (1.0 - z) * (1.0 - cand ** 2)
        da_z = dh * (h_prev - cand) * z * (1.0 - z)
        da_r = (da_c @ U[:, 2 * H:].T) * h_prev * r * (1.0 - r)
        da = np.concatenate([da_z, da_r, da_c], axis=1)
        dU = np.empty_like(U)
        dU[:, :2 * H] = h_prev.T @ da[:, :2 * H]
        dU[:, 2 * H:] = cache['rh'].T @ da_c
        return {'W': cache['x'].T @ da, 'U': dU, 'b': da.sum(axis=0)}
