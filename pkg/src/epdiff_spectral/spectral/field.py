"""Spectral fields on the torus, truncation and Sobolev norms

A field stores the Fourier coefficients of its components densely over
Z_{d,R}, following the convention f^(xi) = int f(x) exp(-2 pi i xi.x) dx.
"""

import logging
from enum import Enum
from typing import Any, Dict, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..errors import GridMismatchError, InvalidArgumentError, SymmetryError
from .grid import FrequencyGrid

logger = logging.getLogger(__name__)

# Hermitian drift tolerated after a floating-point pipeline, relative to the
# largest coefficient.
SYMMETRY_TOLERANCE = 1e-10


class NormWeight(str, Enum):
    """Weightings of the spectral Sobolev norm"""

    BRACKET = "bracket"  # (1 + |xi|^2)^k
    SPLIT = "split"  # 1 + |xi|^(2k)


class SpectralField(BaseModel):
    """Fourier coefficients of an ncomp-component field on Z_{d,R}

    ``coeffs`` has shape (ncomp, (2R+1)^d) and is stored read-only.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: FrequencyGrid
    coeffs: np.ndarray

    # numpy scalars defer to __rmul__ instead of building object arrays
    __array_ufunc__ = None

    @field_validator("coeffs", mode="before")
    @classmethod
    def _as_complex_matrix(cls, value: Any) -> np.ndarray:
        array = np.array(value, dtype=np.complex128)
        if array.ndim == 1:
            array = array[np.newaxis, :]
        if array.ndim != 2:
            raise ValueError(f"coefficients must be 2-D, got shape {array.shape}")
        array.flags.writeable = False
        return array

    @model_validator(mode="after")
    def _check_shape(self) -> "SpectralField":
        if self.coeffs.shape[1] != self.grid.size:
            raise ValueError(
                f"{self.coeffs.shape[1]} coefficients per component do not match "
                f"|Z_{{{self.grid.d},{self.grid.R}}}| = {self.grid.size}"
            )
        if self.coeffs.shape[0] < 1:
            raise ValueError("a field needs at least one component")
        return self

    # Construction helpers

    @classmethod
    def zeros(cls, grid: FrequencyGrid, ncomp: int = 1) -> "SpectralField":
        return cls(grid=grid, coeffs=np.zeros((ncomp, grid.size), dtype=complex))

    @classmethod
    def constant(cls, grid: FrequencyGrid, values: Any) -> "SpectralField":
        """Field whose only nonzero coefficient is the (real) mean"""
        values = np.atleast_1d(np.asarray(values, dtype=float))
        coeffs = np.zeros((values.size, grid.size), dtype=complex)
        coeffs[:, grid.enumerate((0,) * grid.d)] = values
        return cls(grid=grid, coeffs=coeffs)

    @classmethod
    def from_modes(
        cls,
        grid: FrequencyGrid,
        modes: Dict[Tuple[int, ...], Any],
        ncomp: int = 1,
    ) -> "SpectralField":
        """Field from a {frequency: coefficient-per-component} mapping"""
        coeffs = np.zeros((ncomp, grid.size), dtype=complex)
        for xi, value in modes.items():
            coeffs[:, grid.enumerate(xi)] = value
        return cls(grid=grid, coeffs=coeffs)

    # Accessors

    @property
    def ncomp(self) -> int:
        return int(self.coeffs.shape[0])

    @property
    def d(self) -> int:
        return self.grid.d

    @property
    def R(self) -> int:
        return self.grid.R

    def as_tensor(self) -> np.ndarray:
        """Coefficients reshaped to (ncomp, 2R+1, ..., 2R+1)"""
        return self.coeffs.reshape((self.ncomp, *self.grid.shape))

    def coefficient(self, xi: Tuple[int, ...], component: int = 0) -> complex:
        return complex(self.coeffs[component, self.grid.enumerate(xi)])

    def component(self, i: int) -> "SpectralField":
        return SpectralField(grid=self.grid, coeffs=self.coeffs[i : i + 1])

    def mirrored(self) -> np.ndarray:
        """conj(f^(-xi)) laid out in the enumeration of xi"""
        return np.conj(self.coeffs[:, ::-1])

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.coeffs)))

    def with_coeffs(self, coeffs: np.ndarray) -> "SpectralField":
        return SpectralField(grid=self.grid, coeffs=coeffs)

    # Linear structure

    def _check_compatible(self, other: "SpectralField") -> None:
        if self.grid != other.grid or self.ncomp != other.ncomp:
            raise GridMismatchError(
                f"cannot combine fields on (d={self.d}, R={self.R}, "
                f"ncomp={self.ncomp}) and (d={other.d}, R={other.R}, "
                f"ncomp={other.ncomp})"
            )

    def __add__(self, other: "SpectralField") -> "SpectralField":
        if not isinstance(other, SpectralField):
            return NotImplemented
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        if not isinstance(other, SpectralField):
            return NotImplemented
        self._check_compatible(other)
        return self.with_coeffs(self.coeffs - other.coeffs)

    def __neg__(self) -> "SpectralField":
        return self.with_coeffs(-self.coeffs)

    def __mul__(self, scalar: Any) -> "SpectralField":
        if not np.isscalar(scalar):
            return NotImplemented
        return self.with_coeffs(scalar * self.coeffs)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"SpectralField(d={self.d}, R={self.R}, ncomp={self.ncomp})"


def _check_cutoff(r: int) -> None:
    if r < 0:
        raise InvalidArgumentError(f"cutoff must be nonnegative, got {r}")


def truncate(f: SpectralField, r: int) -> SpectralField:
    """Projection Pi_r onto the modes with |xi|_inf <= r"""
    _check_cutoff(r)
    if r > f.R:
        raise InvalidArgumentError(f"cannot truncate cutoff {f.R} field to {r}")
    if r == f.R:
        return f
    offset = f.R - r
    window = (slice(None),) + (slice(offset, offset + 2 * r + 1),) * f.d
    coeffs = f.as_tensor()[window].reshape(f.ncomp, -1)
    return SpectralField(grid=f.grid.with_cutoff(r), coeffs=coeffs)


def extend(f: SpectralField, r: int) -> SpectralField:
    """Zero-extend f to the larger index set Z_{d,r}"""
    _check_cutoff(r)
    if r < f.R:
        raise InvalidArgumentError(f"cannot extend cutoff {f.R} field to {r}")
    if r == f.R:
        return f
    grid = f.grid.with_cutoff(r)
    big = np.zeros((f.ncomp, *grid.shape), dtype=complex)
    offset = r - f.R
    window = (slice(None),) + (slice(offset, offset + f.grid.side),) * f.d
    big[window] = f.as_tensor()
    return SpectralField(grid=grid, coeffs=big.reshape(f.ncomp, -1))


def sobolev_weights(
    grid: FrequencyGrid, k: float, weight: NormWeight = NormWeight.BRACKET
) -> np.ndarray:
    """Squared-norm weights of H^k on the enumerated frequencies"""
    xi2 = grid.squared_norms()
    if weight is NormWeight.BRACKET:
        return (1.0 + xi2) ** k
    if k < 0:
        raise InvalidArgumentError("the split weight 1+|xi|^(2k) needs k >= 0")
    return 1.0 + xi2**k


def sobolev_norm(
    f: SpectralField, k: float, weight: NormWeight = NormWeight.BRACKET
) -> float:
    """sqrt(sum_i sum_xi |f_i^(xi)|^2 w_k(xi))"""
    w = sobolev_weights(f.grid, k, NormWeight(weight))
    return float(np.sqrt(np.sum(np.abs(f.coeffs) ** 2 * w)))


def inverse_estimate_constant(d: int, R: int, k: float, l: float) -> float:
    """Smallest C with ||g||_{H^k} <= C R^(k-l) ||g||_{H^l} on Z_{d,R}

    The extremal field is a single mode in a corner of the cube.
    """
    if k < l:
        raise InvalidArgumentError("the inverse estimate needs k >= l")
    if R < 1:
        raise InvalidArgumentError("the inverse estimate needs R >= 1")
    return float((1.0 + d * R**2) ** ((k - l) / 2) / R ** (k - l))


def hermitian_defect(f: SpectralField) -> float:
    """max |f^(-xi) - conj(f^(xi))|"""
    if f.grid.size == 0:
        return 0.0
    return float(np.max(np.abs(f.coeffs - f.mirrored())))


def is_hermitian(f: SpectralField, tol: float = SYMMETRY_TOLERANCE) -> bool:
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    return hermitian_defect(f) <= tol * scale


def check_hermitian(f: SpectralField, tol: float = SYMMETRY_TOLERANCE) -> None:
    """Raise SymmetryError unless f is the spectrum of a real field"""
    defect = hermitian_defect(f)
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    if defect > tol * scale:
        raise SymmetryError(
            f"field violates Hermitian symmetry (defect {defect:.3e})", defect
        )


def resymmetrize(f: SpectralField, tol: float = SYMMETRY_TOLERANCE) -> SpectralField:
    """Average f with its mirrored conjugate

    Drift beyond ``tol`` (relative to the largest coefficient) means an
    upstream computation broke realness and raises SymmetryError.
    """
    mirrored = f.mirrored()
    defect = float(np.max(np.abs(f.coeffs - mirrored))) if f.grid.size else 0.0
    scale = max(float(np.max(np.abs(f.coeffs))), 1.0)
    if defect > tol * scale:
        logger.error(f"Hermitian drift {defect:.3e} exceeds tolerance")
        raise SymmetryError(f"Hermitian drift {defect:.3e} exceeds tolerance", defect)
    return f.with_coeffs(0.5 * (f.coeffs + mirrored))
