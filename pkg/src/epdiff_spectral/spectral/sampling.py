"""Moving between coefficients and physical-space samples

Samples live on the uniform grid x_n = n / N of [0, 1)^d, laid out as
arrays of shape (ncomp, N, ..., N) with ``indexing="ij"``.
"""

import logging
from typing import Optional, Tuple

import numpy as np
import scipy.fft as sp_fft

from ..errors import InvalidArgumentError, SymmetryError
from .field import SpectralField
from .grid import FrequencyGrid

logger = logging.getLogger(__name__)

# Imaginary residue tolerated when discarding it, relative to the amplitude.
IMAG_TOLERANCE = 1e-10


def _wrapped_indices(d: int, r: int, size: int) -> Tuple[np.ndarray, ...]:
    idx = np.arange(-r, r + 1) % size
    return np.ix_(*([idx] * d))


def scatter_to_grid(coeffs: np.ndarray, d: int, R: int, size: int) -> np.ndarray:
    """Place (c, (2R+1)^d) coefficients into FFT order on a size^d array"""
    c = coeffs.shape[0]
    big = np.zeros((c,) + (size,) * d, dtype=complex)
    big[(slice(None), *_wrapped_indices(d, R, size))] = coeffs.reshape(
        (c,) + (2 * R + 1,) * d
    )
    return big


def gather_from_grid(spectrum: np.ndarray, d: int, r: int) -> np.ndarray:
    """Read frequencies |xi|_inf <= r out of an FFT-ordered spectrum"""
    c = spectrum.shape[0]
    size = spectrum.shape[1]
    return spectrum[(slice(None), *_wrapped_indices(d, r, size))].reshape(c, -1)


def to_physical(
    coeffs: np.ndarray, d: int, R: int, size: int, workers: Optional[int] = None
) -> np.ndarray:
    """Complex samples of sum_xi c(xi) exp(2 pi i xi.x) on a size^d grid"""
    big = scatter_to_grid(coeffs, d, R, size)
    return sp_fft.ifftn(
        big, axes=tuple(range(1, d + 1)), norm="forward", workers=workers
    )


def to_spectral(
    values: np.ndarray, d: int, r: int, workers: Optional[int] = None
) -> np.ndarray:
    """Fourier coefficients |xi|_inf <= r of complex samples on a uniform grid"""
    spectrum = sp_fft.fftn(
        values, axes=tuple(range(1, d + 1)), norm="forward", workers=workers
    )
    return gather_from_grid(spectrum, d, r)


def grid_points(N: int, d: int) -> np.ndarray:
    """Nodes x_n = n / N as an (N^d, d) array in C order"""
    axis = np.arange(N) / N
    mesh = np.meshgrid(*([axis] * d), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def synthesize_on_grid(f: SpectralField, N: int) -> np.ndarray:
    """Real samples of f on the N^d grid, shape (ncomp, N, ..., N)"""
    if N < f.grid.side:
        raise InvalidArgumentError(f"grid size {N} aliases cutoff {f.R}: need N >= {f.grid.side}")
    values = to_physical(f.coeffs, f.d, f.R, N)
    amplitude = max(float(np.max(np.abs(values))), 1.0)
    residue = float(np.max(np.abs(values.imag)))
    if residue > IMAG_TOLERANCE * amplitude:
        raise SymmetryError(
            f"samples carry an imaginary part {residue:.3e}; field is not real",
            residue,
        )
    return values.real.copy()


def analyze_from_grid(samples: np.ndarray, R: int) -> SpectralField:
    """Coefficients on Z_{d,R} of samples shaped (ncomp, N, ..., N)"""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim < 2:
        raise InvalidArgumentError("samples need a component axis and >= 1 space axis")
    d = samples.ndim - 1
    N = samples.shape[1]
    if any(n != N for n in samples.shape[1:]):
        raise InvalidArgumentError(f"grid must be uniform, got {samples.shape[1:]}")
    if N < 2 * R + 1:
        raise InvalidArgumentError(f"grid size {N} aliases cutoff {R}: need N >= {2 * R + 1}")
    coeffs = to_spectral(samples.astype(complex), d, R)
    return SpectralField(grid=FrequencyGrid(d=d, R=R), coeffs=coeffs)


def evaluate_at_points(f: SpectralField, pts: np.ndarray) -> np.ndarray:
    """Re sum_xi f^(xi) exp(2 pi i xi.p) at arbitrary points

    Points are wrapped into [0, 1)^d; the exponentials factor over axes, so
    the sum is contracted one axis at a time. Returns (ncomp, len(pts)).
    """
    pts = np.asarray(pts, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1) if f.d == 1 else pts.reshape(1, -1)
    if pts.shape[1] != f.d:
        raise InvalidArgumentError(f"points have dimension {pts.shape[1]}, field {f.d}")
    pts = np.mod(pts, 1.0)
    freqs = np.arange(-f.R, f.R + 1)
    phases = [np.exp(2j * np.pi * np.outer(pts[:, k], freqs)) for k in range(f.d)]
    tensor = f.as_tensor()
    # (c, a, rest...) x (p, a) -> (c, p, rest...)
    out = np.moveaxis(np.tensordot(tensor, phases[0], axes=([1], [1])), -1, 1)
    for k in range(1, f.d):
        out = np.einsum("cpa...,pa->cp...", out, phases[k])
    return out.real.copy()


def grid_pairing(a: np.ndarray, b: np.ndarray) -> float:
    """Rectangle-rule quadrature of int a . b dx over [0, 1)^d

    Both arrays are shaped (ncomp, N^d) or (ncomp, N, ..., N).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise InvalidArgumentError(f"sample shapes differ: {a.shape} vs {b.shape}")
    npoints = int(np.prod(a.shape[1:]))
    return float(np.sum(a * b) / npoints)
