__version__ = '0.1.0'

from .deadreckon import dead_reckon, integrate_displacement, update_position  # noqa: E402
from .evaluation import aggregate, crse, cte, error_reduction, run_outage_experiment  # noqa: E402
from .geodesy import gnss_displacement, label_error, vincenty_inverse  # noqa: E402
from .network import CellKind, ModelConfig, NetworkModel, param_count, predict_error  # noqa: E402
from .storage import load_model, save_model  # noqa: E402
from .training import TrainConfig, train  # noqa: E402

__all__ = [
    '__version__',
    'dead_reckon', 'integrate_displacement', 'update_position',
    'aggregate', 'crse', 'cte', 'error_reduction', 'run_outage_experiment',
    'gnss_displacement', 'label_error', 'vincenty_inverse',
    'CellKind', 'ModelConfig', 'NetworkModel', 'param_count', 'predict_error',
    'load_model', 'save_model',
    'TrainConfig', 'train',
]
