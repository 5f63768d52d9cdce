"""Random initial velocities of prescribed Sobolev regularity"""

import logging
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..spectral.field import SpectralField
from ..spectral.grid import FrequencyGrid

logger = logging.getLogger(__name__)


class InitSpec(BaseModel):
    """Recipe for an H^s-regular random vector field on Z_{d,cutoff}"""

    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=1, le=3)
    s: float = Field(ge=0, description="Target Sobolev regularity")
    cutoff: int = Field(ge=0, description="Generation cutoff")
    eps: float = Field(default=0.1, gt=0, description="Tail exponent parameter")
    seed: Optional[int] = None
    literal_real_draw: bool = Field(
        default=False,
        description="Draw w^(xi) from the real interval instead of with a uniform phase",
    )

    @property
    def ncomp(self) -> int:
        return self.d


def coefficient_envelope(grid: FrequencyGrid, eps: float) -> np.ndarray:
    """(1+|xi|^2)^(-1/2) log(2+|xi|^2)^(-(1/2+eps)), the bound on |w^(xi)|"""
    xi2 = grid.squared_norms()
    return (1.0 + xi2) ** -0.5 * np.log(2.0 + xi2) ** -(0.5 + eps)


def random_sobolev_field(spec: InitSpec) -> SpectralField:
    """Draw w, symmetrize u = w + conj(w(-.)), scale v0 = u (1+|xi|^2)^(-s/2)

    Each of the d components is drawn independently. The result is
    Hermitian exactly, not just to rounding.
    """
    grid = FrequencyGrid(d=spec.d, R=spec.cutoff)
    rng = np.random.default_rng(spec.seed)
    envelope = coefficient_envelope(grid, spec.eps)
    shape = (spec.ncomp, grid.size)
    magnitude = rng.uniform(0.0, 1.0, size=shape) * envelope
    if spec.literal_real_draw:
        w = magnitude.astype(complex)
    else:
        phase = rng.uniform(0.0, 2.0 * np.pi, size=shape)
        w = magnitude * np.exp(1j * phase)
    u = w + np.conj(w[:, ::-1])
    v0 = u * (1.0 + grid.squared_norms()) ** (-spec.s / 2.0)
    logger.debug(
        f"Drew H^{spec.s} field d={spec.d} cutoff={spec.cutoff} seed={spec.seed}"
    )
    return SpectralField(grid=grid, coeffs=v0)


def sine_mode_field(d: int, R: int, axis: int = 0, component: int = 0, k: int = 1) -> SpectralField:
    """sin(2 pi k x_axis) in one component of a d-component field on Z_{d,R}

    Zero when k exceeds the cutoff.
    """
    grid = FrequencyGrid(d=d, R=R)
    field = SpectralField.zeros(grid, ncomp=d)
    if k > R:
        return field
    xi = [0] * d
    xi[axis] = k
    coeffs = np.array(field.coeffs)
    coeffs[component, grid.enumerate(tuple(xi))] = -0.5j
    xi[axis] = -k
    coeffs[component, grid.enumerate(tuple(xi))] = 0.5j
    return field.with_coeffs(coeffs)
