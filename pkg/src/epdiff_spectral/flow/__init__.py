"""Particle flow maps and transport diagnostics"""

from .transport import (
    FlowMap,
    ad_inverse_apply,
    default_particle_grid,
    finite_difference_jacobian,
    integrate_flow,
    integrate_frozen_flow,
    min_jacobian_determinant,
    momentum_transport_residual,
)

__all__ = [
    "FlowMap",
    "ad_inverse_apply",
    "default_particle_grid",
    "finite_difference_jacobian",
    "integrate_flow",
    "integrate_frozen_flow",
    "min_jacobian_determinant",
    "momentum_transport_residual",
]
