from .anderson import (
    HistoryWindow,
    Mixing,
    SolverConfig,
    anderson_step,
    fixed_point_map,
    mixing_coefficients,
    run_anderson,
)
from .baselines import rmpe_extrapolate, run_gd, run_nagd, run_rmpe
from .gmres import gmres_solve
from .trace import CONVERGED, DIVERGED, HORIZON, RunTrace

__all__ = [
    "CONVERGED",
    "DIVERGED",
    "HORIZON",
    "HistoryWindow",
    "Mixing",
    "RunTrace",
    "SolverConfig",
    "anderson_step",
    "fixed_point_map",
    "gmres_solve",
    "mixing_coefficients",
    "rmpe_extrapolate",
    "run_anderson",
    "run_gd",
    "run_nagd",
    "run_rmpe",
]
