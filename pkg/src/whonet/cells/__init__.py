from __future__ import annotations

from .common import Cell
from .gru import GruCell
from .idnn import InputDelayCell
from .lstm import LstmCell
from .srnn import SimpleRnnCell

_CELLS = {
    'SRNN': SimpleRnnCell,
    'GRU': GruCell,
    'LSTM': LstmCell,
    'IDNN': InputDelayCell,
}


def get_cell(kind: str, input_dim: int, hidden: int) -> Cell:
    return _CELLS[kind.upper()](input_dim, hidden)


__all__ = ['Cell', 'GruCell', 'InputDelayCell', 'LstmCell', 'SimpleRnnCell', 'get_cell']
