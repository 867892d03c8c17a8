from __future__ import annotations

from typing import Dict, Tuple

import numpy as np

Params = Dict[str, np.ndarray]
State = Tuple[np.ndarray, ...]


def sigmoid(a: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(a)
    pos = a >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-a[pos]))
    ea = np.exp(a[~pos])
    out[~pos] = ea / (1.0 + ea)
    return out


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


class Cell:
    """Hidden layer of one cell kind.

    Recurrent cells take the previous state as a constant (time step 1), so
    backward never propagates into it.
    """
    gates = 1
    recurrent = True
    state_size = 1

    def __init__(self, input_dim: int, hidden: int) -> None:
        self.input_dim = input_dim
        self.hidden = hidden

    def shapes(self) -> Dict[str, Tuple[int, ...]]:
        k = self.gates * self.hidden
        shapes: Dict[str, Tuple[int, ...]] = {'W': (self.input_dim, k)}
        if self.recurrent:
            shapes['U'] = (self.hidden, k)
        shapes['b'] = (k,)
        return shapes

    def param_count(self) -> int:
        return sum(int(np.prod(s)) for s in self.shapes().values())

    def init_params(self, rng: np.random.Generator) -> Params:
        k = self.gates * self.hidden
        params: Params = {'W': glorot_uniform(rng, self.input_dim, k)}
        if self.recurrent:
            params['U'] = glorot_uniform(rng, self.hidden, k)
        params['b'] = np.zeros(k)
        return params

    def zero_state(self, batch: int) -> State:
        return tuple(np.zeros((batch, self.hidden)) for _ in range(self.state_size))

    def forward(self, params: Params, x: np.ndarray, state: State) -> Tuple[np.ndarray, State, dict]:
        """Return (hidden output, next state, cache)."""
        raise NotImplementedError

    def backward(self, params: Params, cache: dict, dh: np.ndarray) -> Params:
        raise NotImplementedError
