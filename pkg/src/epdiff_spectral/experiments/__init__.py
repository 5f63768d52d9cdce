"""Random initial data, convergence studies and rate fitting"""

from .convergence import (
    ConvergenceReport,
    ConvergenceRow,
    RowStatus,
    StudyConfig,
    double_truncation_run,
    energy_drift,
    fit_rate,
    run_convergence_study,
)
from .initial_data import InitSpec, random_sobolev_field, sine_mode_field

__all__ = [
    "ConvergenceReport",
    "ConvergenceRow",
    "InitSpec",
    "RowStatus",
    "StudyConfig",
    "double_truncation_run",
    "energy_drift",
    "fit_rate",
    "random_sobolev_field",
    "run_convergence_study",
    "sine_mode_field",
]
