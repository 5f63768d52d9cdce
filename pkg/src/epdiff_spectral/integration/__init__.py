"""Runge-Kutta time stepping"""

from .integrator import (
    Trajectory,
    explicit_rk_step,
    integrate_geodesic,
    rk_step,
    sample_steps,
)
from .tableaux import DOPRI5_6STAGE, RK4, ButcherTableau, TableauRegistry, get_tableau

__all__ = [
    "DOPRI5_6STAGE",
    "RK4",
    "ButcherTableau",
    "TableauRegistry",
    "Trajectory",
    "explicit_rk_step",
    "get_tableau",
    "integrate_geodesic",
    "rk_step",
    "sample_steps",
]
