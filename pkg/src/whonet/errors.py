from __future__ import annotations

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_DIVERGENCE = 4
EXIT_IO = 5


class WhonetError(Exception):
    exit_code = EXIT_DATA


class InvalidInputError(WhonetError, ValueError):
    """Non-finite values or wrong shapes handed to a numeric routine."""


class CalibrationError(InvalidInputError):
    pass


class WindowSizeError(InvalidInputError):
    pass


class DataError(WhonetError):
    exit_code = EXIT_DATA


class DataIntegrityError(DataError):
    """Timestamps unsorted, duplicated, gapped or off the 10 Hz grid."""


class SchemaError(DataError):
    pass


class NoDataError(DataError):
    pass


class ConvergenceError(WhonetError):
    exit_code = EXIT_DATA


class ConfigError(WhonetError):
    exit_code = EXIT_USAGE


class ModelFormatError(WhonetError):
    exit_code = EXIT_DATA


class MissingNormalizerError(ModelFormatError):
    pass


class DivergenceError(WhonetError):
    exit_code = EXIT_DIVERGENCE

    def __init__(self, epoch: int, loss: float) -> None:
        super().__init__(f'training diverged at epoch {epoch} (loss={loss})')
        self.epoch = epoch
        self.loss = loss
