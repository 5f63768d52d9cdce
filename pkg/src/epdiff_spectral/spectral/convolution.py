"""Exact discrete convolution of bandlimited spectra

Both factors are zero-extended to Z_{d,2R} and circularly convolved on a
grid of at least 4R+1 points per axis, which is wide enough that no sum
frequency wraps around. The circular convolution is computed as a product
of samples in physical space.
"""

import logging
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.fft import next_fast_len

from ..errors import GridMismatchError, InvalidArgumentError
from .field import SpectralField, is_hermitian, resymmetrize
from .grid import FrequencyGrid
from .sampling import to_physical, to_spectral

logger = logging.getLogger(__name__)

Convolution = Callable[[SpectralField, SpectralField, int], SpectralField]


def convolution_size(R: int) -> int:
    """Smallest 5-smooth grid size >= 4R+1"""
    return int(next_fast_len(4 * R + 1, real=True))


class ConvolutionPlan:
    """Physical-space products shared by many convolutions of one cutoff

    Callers transform every factor once with :meth:`to_physical`, combine
    products and sums of the samples freely, and transform the result
    back with :meth:`to_spectral`. Any such expression equals the matching
    sum of exact linear convolutions as long as each summand is a product
    of exactly two transformed factors.
    """

    def __init__(self, d: int, R: int, workers: Optional[int] = None):
        self.d = d
        self.R = R
        self.size = convolution_size(R)
        self.workers = workers

    def to_physical(self, coeffs: np.ndarray) -> np.ndarray:
        """(c, (2R+1)^d) coefficients -> (c, M, ..., M) samples"""
        return to_physical(coeffs, self.d, self.R, self.size, self.workers)

    def to_spectral(self, values: np.ndarray, r_out: int) -> np.ndarray:
        """(c, M, ..., M) samples -> (c, (2 r_out + 1)^d) coefficients"""
        if r_out > 2 * self.R:
            raise InvalidArgumentError(f"r_out={r_out} exceeds 2R={2 * self.R}")
        return to_spectral(values, self.d, r_out, self.workers)

    def output_grid(self, r_out: int) -> FrequencyGrid:
        return FrequencyGrid(d=self.d, R=r_out)


def _check_pair(f: SpectralField, g: SpectralField, r_out: int) -> int:
    if f.grid != g.grid:
        raise GridMismatchError(
            f"convolution needs a common grid, got (d={f.d}, R={f.R}) "
            f"and (d={g.d}, R={g.R})"
        )
    if r_out < 0 or r_out > 2 * f.R:
        raise InvalidArgumentError(f"r_out={r_out} outside 0..2R={2 * f.R}")
    if f.ncomp != g.ncomp and 1 not in (f.ncomp, g.ncomp):
        raise GridMismatchError(
            f"cannot pair {f.ncomp}-component and {g.ncomp}-component fields"
        )
    return max(f.ncomp, g.ncomp)


def finish_real(result: SpectralField, inputs: Sequence[SpectralField]) -> SpectralField:
    """Re-symmetrize a pipeline result when every input was real"""
    if all(is_hermitian(f) for f in inputs):
        return resymmetrize(result)
    return result


def convolve_fft(
    f: SpectralField, g: SpectralField, r_out: int, workers: Optional[int] = None
) -> SpectralField:
    """(f^ * g^)(xi) = sum_zeta f^(zeta) g^(xi - zeta) on Z_{d,r_out}

    Scalar factors broadcast against vector factors; two vector factors
    are convolved component by component.
    """
    _check_pair(f, g, r_out)
    plan = ConvolutionPlan(f.d, f.R, workers)
    product = plan.to_physical(f.coeffs) * plan.to_physical(g.coeffs)
    result = SpectralField(
        grid=plan.output_grid(r_out), coeffs=plan.to_spectral(product, r_out)
    )
    return finish_real(result, (f, g))


def convolve_direct(f: SpectralField, g: SpectralField, r_out: int) -> SpectralField:
    """Same contract as convolve_fft, by the O(R^(2d)) double sum"""
    ncomp = _check_pair(f, g, r_out)
    d, R, side = f.d, f.R, f.grid.side
    ft = f.as_tensor()
    gt = g.as_tensor()
    full = np.zeros((ncomp,) + (4 * R + 1,) * d, dtype=complex)
    for zeta in np.ndindex(*f.grid.shape):
        # xi = zeta + eta sits at index zeta_idx + eta_idx of the 4R+1 block
        window = (slice(None),) + tuple(slice(z, z + side) for z in zeta)
        weight = ft[(slice(None), *zeta)].reshape((-1,) + (1,) * d)
        full[window] += weight * gt
    offset = 2 * R - r_out
    window = (slice(None),) + (slice(offset, offset + 2 * r_out + 1),) * d
    result = SpectralField(
        grid=FrequencyGrid(d=d, R=r_out), coeffs=full[window].reshape(ncomp, -1)
    )
    return finish_real(result, (f, g))
