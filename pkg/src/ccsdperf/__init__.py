"""Runtime prediction, configuration advice and active learning for tiled
distributed tensor-contraction (CCSD) workloads."""

__version__ = "0.1.0"

from .advisor import Goal, Recommendation, get_optimal_values, node_hours, recommend
from .data import ConfigGrid, Dataset, ProblemSize, RunRecord, load_csv, save_csv, split
from .metrics import EvalReport, evaluate
from .regressors import Model, ModelSpec, fit, load_model

__all__ = [
    "ConfigGrid", "Dataset", "EvalReport", "Goal", "Model", "ModelSpec", "ProblemSize",
    "Recommendation", "RunRecord", "__version__", "evaluate", "fit", "get_optimal_values",
    "load_csv", "load_model", "node_hours", "recommend", "save_csv", "split",
]
