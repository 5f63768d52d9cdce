"""Diagonal operators on Fourier space

The inertia operator L = (1 - Delta)^m, its Riesz inverse and the
differentiation symbol D^(xi) = 2 pi i xi are all Fourier multipliers, so
applying them is a pointwise product over the enumerated frequencies.
"""

import logging
from enum import Enum
from typing import Any, Callable, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..errors import GridMismatchError, InvalidArgumentError
from .field import SpectralField

logger = logging.getLogger(__name__)

LAPLACIAN_SCALE = 4.0 * np.pi**2


class MultiplierKind(str, Enum):
    SOBOLEV_L = "sobolev_L"
    RIESZ_R = "riesz_R"
    PARTIAL = "partial"
    DIVERGENCE = "divergence"
    CUSTOM = "custom"


class FourierMultiplier(BaseModel):
    """A symbol evaluated on integer frequencies

    Build instances with the class constructors; ``axis`` is zero-based.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    kind: MultiplierKind
    order: Optional[float] = None
    axis: Optional[int] = None
    scale: float = LAPLACIAN_SCALE
    symbol: Optional[Callable[[np.ndarray], np.ndarray]] = None
    label: str = ""

    @classmethod
    def sobolev_L(cls, m: float, scale: float = LAPLACIAN_SCALE) -> "FourierMultiplier":
        """(1 + scale |xi|^2)^m, the symbol of (1 - Delta)^m"""
        return cls(kind=MultiplierKind.SOBOLEV_L, order=m, scale=scale)

    @classmethod
    def riesz_R(cls, m: float, scale: float = LAPLACIAN_SCALE) -> "FourierMultiplier":
        """(1 + scale |xi|^2)^(-m)"""
        return cls(kind=MultiplierKind.RIESZ_R, order=m, scale=scale)

    @classmethod
    def partial(cls, axis: int) -> "FourierMultiplier":
        """2 pi i xi_axis"""
        if axis < 0:
            raise InvalidArgumentError(f"axis must be nonnegative, got {axis}")
        return cls(kind=MultiplierKind.PARTIAL, axis=axis)

    @classmethod
    def divergence(cls) -> "FourierMultiplier":
        return cls(kind=MultiplierKind.DIVERGENCE)

    @classmethod
    def custom(
        cls, symbol: Callable[[np.ndarray], np.ndarray], label: str = "custom"
    ) -> "FourierMultiplier":
        """Arbitrary symbol mapping an (n, d) frequency array to n values"""
        return cls(kind=MultiplierKind.CUSTOM, symbol=symbol, label=label)

    def evaluate(self, xi: np.ndarray) -> np.ndarray:
        """Symbol values on an (n, d) array of frequencies

        Scalar symbols return shape (n,), the divergence returns (n, d).
        """
        xi = np.atleast_2d(np.asarray(xi, dtype=float))
        d = xi.shape[1]
        if self.kind is MultiplierKind.SOBOLEV_L:
            return (1.0 + self.scale * np.sum(xi**2, axis=1)) ** self.order
        if self.kind is MultiplierKind.RIESZ_R:
            return (1.0 + self.scale * np.sum(xi**2, axis=1)) ** (-self.order)
        if self.kind is MultiplierKind.PARTIAL:
            if self.axis >= d:
                raise GridMismatchError(
                    f"partial derivative along axis {self.axis} in dimension {d}"
                )
            return 2j * np.pi * xi[:, self.axis]
        if self.kind is MultiplierKind.DIVERGENCE:
            return 2j * np.pi * xi
        values = np.asarray(self.symbol(xi))
        if values.shape != (xi.shape[0],):
            raise GridMismatchError(
                f"custom symbol returned shape {values.shape}, expected ({xi.shape[0]},)"
            )
        return values

    def describe(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "order": self.order,
            "axis": self.axis,
            "scale": self.scale,
            "label": self.label,
        }


def derivative_symbols(xi: np.ndarray) -> np.ndarray:
    """D^(xi) = 2 pi i xi as an (n, d) array"""
    return 2j * np.pi * np.asarray(xi, dtype=float)


def apply_multiplier(f: SpectralField, m: FourierMultiplier) -> SpectralField:
    """Pointwise product of the symbol with every component of f

    The divergence contracts a d-component field to a scalar field.
    """
    values = m.evaluate(f.grid.frequencies())
    if m.kind is MultiplierKind.DIVERGENCE:
        if f.ncomp != f.d:
            raise GridMismatchError(
                f"divergence needs a {f.d}-component field, got {f.ncomp}"
            )
        scalar = np.sum(values.T * f.coeffs, axis=0)
        return SpectralField(grid=f.grid, coeffs=scalar[np.newaxis, :])
    return f.with_coeffs(values[np.newaxis, :] * f.coeffs)
