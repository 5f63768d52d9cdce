"""Right-hand side of the bandlimited EPDiff geodesic equation

With momentum P = L V, the semi-discrete geodesic equation reads

    dV/dt = -Pi_R R ad*_V P

where ad*_V P = div(P (x) V) + (DV)^T P is assembled from exact
convolutions of the Fourier coefficients and R = L^{-1}.
"""

import logging
from enum import Enum
from typing import Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import GridMismatchError, InvalidArgumentError
from .spectral.convolution import Convolution, ConvolutionPlan, finish_real
from .spectral.field import SpectralField, extend, truncate
from .spectral.grid import FrequencyGrid
from .spectral.multipliers import (
    LAPLACIAN_SCALE,
    FourierMultiplier,
    apply_multiplier,
    derivative_symbols,
)

logger = logging.getLogger(__name__)


class CoadjointGrouping(str, Enum):
    """How the div(P (x) V) part of ad* is assembled

    FOURIER differentiates the factors before convolving; DIVERGENCE
    convolves P_i with V_j first and differentiates the product. Both are
    equal for exact convolutions.
    """

    FOURIER = "fourier"
    DIVERGENCE = "divergence"


class DynamicsConfig(BaseModel):
    """Metric order, dimension and cutoff of one bandlimited geodesic problem

    ``R = 0`` is accepted: the fields are constants and the right-hand side
    vanishes identically.
    """

    model_config = ConfigDict(frozen=True)

    d: int = Field(ge=1, le=3, description="Spatial dimension")
    m: int = Field(ge=1, description="Order of the inertia operator (1 - Delta)^m")
    R: int = Field(ge=0, description="Solver cutoff")
    laplacian_scale: float = Field(default=LAPLACIAN_SCALE, gt=0)
    assemble_at_full: bool = Field(
        default=True, description="Assemble ad* on Z_{d,2R} before applying R"
    )
    fft_workers: Optional[int] = Field(default=None, ge=1)

    @property
    def grid(self) -> FrequencyGrid:
        return FrequencyGrid(d=self.d, R=self.R)

    @property
    def L_hat(self) -> FourierMultiplier:
        return FourierMultiplier.sobolev_L(self.m, self.laplacian_scale)

    @property
    def R_hat(self) -> FourierMultiplier:
        return FourierMultiplier.riesz_R(self.m, self.laplacian_scale)

    def describe(self) -> Dict[str, object]:
        return {
            "d": self.d,
            "m": self.m,
            "R": self.R,
            "laplacian_scale": self.laplacian_scale,
            "assemble_at_full": self.assemble_at_full,
        }


class GeodesicState(BaseModel):
    """Velocity and momentum at one time of a numerical geodesic"""

    model_config = ConfigDict(frozen=True)

    t: float
    V: SpectralField
    P: SpectralField

    @classmethod
    def from_velocity(cls, t: float, V: SpectralField, cfg: DynamicsConfig) -> "GeodesicState":
        return cls(t=t, V=V, P=momentum(V, cfg))


def momentum(V: SpectralField, cfg: DynamicsConfig) -> SpectralField:
    """P = L V"""
    return apply_multiplier(V, cfg.L_hat)


def metric_energy(V: SpectralField, cfg: DynamicsConfig) -> float:
    """<L V, V>, the squared metric norm"""
    return weak_pairing(momentum(V, cfg), V)


def _check_vector_pair(a: SpectralField, b: SpectralField, r_out: int) -> None:
    if a.grid != b.grid:
        raise GridMismatchError(
            f"fields live on (d={a.d}, R={a.R}) and (d={b.d}, R={b.R})"
        )
    if a.ncomp != a.d or b.ncomp != b.d:
        raise GridMismatchError(
            f"expected {a.d}-component vector fields, got {a.ncomp} and {b.ncomp}"
        )
    if r_out < 0 or r_out > 2 * a.R:
        raise InvalidArgumentError(f"r_out={r_out} outside 0..2R={2 * a.R}")


def _gradient_coeffs(f: SpectralField) -> np.ndarray:
    """[i, j] -> coefficients of D_j f_i, shape (ncomp, d, n)"""
    dsym = derivative_symbols(f.grid.frequencies())
    return f.coeffs[:, np.newaxis, :] * dsym.T[np.newaxis, :, :]


def _gradient_field(f: SpectralField, i: int, j: int) -> SpectralField:
    dsym = derivative_symbols(f.grid.frequencies())
    return SpectralField(grid=f.grid, coeffs=dsym[:, j] * f.coeffs[i])


class _PhysicalFactors:
    """A vector field and its gradient sampled on the convolution grid"""

    def __init__(self, plan: ConvolutionPlan, f: SpectralField):
        d = f.d
        self.values = plan.to_physical(f.coeffs)
        grad = _gradient_coeffs(f).reshape(d * d, -1)
        self.gradient = plan.to_physical(grad).reshape((d, d) + self.values.shape[1:])


def coadjoint_star(
    P: SpectralField,
    V: SpectralField,
    r_out: int,
    *,
    grouping: CoadjointGrouping = CoadjointGrouping.FOURIER,
    convolution: Optional[Convolution] = None,
    workers: Optional[int] = None,
) -> SpectralField:
    """ad*_V P = div(P (x) V) + (DV)^T P on Z_{d,r_out}

    Component i is

        sum_j (D_j P_i) * V_j  +  P_i * div V  +  sum_j (D_i V_j) * P_j

    with * the exact convolution. By default every factor is sampled once
    on the convolution grid and the whole sum is formed there before a
    single transform back; passing ``convolution`` (``convolve_fft`` or
    ``convolve_direct``) evaluates every term as a separate convolution.
    """
    _check_vector_pair(P, V, r_out)
    grouping = CoadjointGrouping(grouping)
    if convolution is not None:
        result = _coadjoint_termwise(P, V, r_out, grouping, convolution)
        return finish_real(result, (P, V))

    d = P.d
    plan = ConvolutionPlan(d, P.R, workers)
    Px = _PhysicalFactors(plan, P)
    Vx = _PhysicalFactors(plan, V)
    # (D_i V_j) P_j, indexed [i, j]
    transpose_term = np.sum(
        np.swapaxes(Vx.gradient, 0, 1) * Px.values[np.newaxis], axis=1
    )
    if grouping is CoadjointGrouping.FOURIER:
        divergence = np.trace(Vx.gradient, axis1=0, axis2=1)
        total = (
            np.sum(Px.gradient * Vx.values[np.newaxis], axis=1)
            + Px.values * divergence[np.newaxis]
            + transpose_term
        )
        coeffs = plan.to_spectral(total, r_out)
    else:
        outer = Px.values[:, np.newaxis] * Vx.values[np.newaxis, :]
        outer_hat = plan.to_spectral(
            outer.reshape((d * d,) + outer.shape[2:]), r_out
        ).reshape(d, d, -1)
        dsym = derivative_symbols(plan.output_grid(r_out).frequencies())
        coeffs = np.sum(outer_hat * dsym.T[np.newaxis], axis=1)
        coeffs = coeffs + plan.to_spectral(transpose_term, r_out)
    result = SpectralField(grid=plan.output_grid(r_out), coeffs=coeffs)
    return finish_real(result, (P, V))


def _coadjoint_termwise(
    P: SpectralField,
    V: SpectralField,
    r_out: int,
    grouping: CoadjointGrouping,
    convolution: Convolution,
) -> SpectralField:
    d = P.d
    out_grid = P.grid.with_cutoff(r_out)
    dsym_out = derivative_symbols(out_grid.frequencies())
    divergence = SpectralField(
        grid=V.grid,
        coeffs=np.sum(_gradient_coeffs(V)[np.arange(d), np.arange(d)], axis=0),
    )
    components = []
    for i in range(d):
        acc = np.zeros(out_grid.size, dtype=complex)
        P_i = P.component(i)
        if grouping is CoadjointGrouping.FOURIER:
            for j in range(d):
                acc += convolution(_gradient_field(P, i, j), V.component(j), r_out).coeffs[0]
            acc += convolution(P_i, divergence, r_out).coeffs[0]
        else:
            for j in range(d):
                product = convolution(P_i, V.component(j), r_out).coeffs[0]
                acc += dsym_out[:, j] * product
        for j in range(d):
            acc += convolution(_gradient_field(V, j, i), P.component(j), r_out).coeffs[0]
        components.append(acc)
    return SpectralField(grid=out_grid, coeffs=np.stack(components))


def is_translation(V: SpectralField) -> bool:
    """True when only the zero mode is populated; such fields are stationary"""
    others = np.delete(V.coeffs, V.grid.enumerate((0,) * V.d), axis=1)
    return not np.any(others)


def discrete_rhs(V: SpectralField, cfg: DynamicsConfig) -> SpectralField:
    """dV/dt = -Pi_R R ad*_V (L V)

    ad* is assembled on Z_{d,2R}, multiplied by R there and truncated to R.
    With ``cfg.assemble_at_full`` unset every convolution is truncated to R
    directly; for a diagonal R both orders give the same result.
    """
    if V.d != cfg.d or V.R != cfg.R:
        raise GridMismatchError(
            f"field on (d={V.d}, R={V.R}) does not match config (d={cfg.d}, R={cfg.R})"
        )
    if is_translation(V):
        return SpectralField.zeros(V.grid, V.ncomp)
    P = momentum(V, cfg)
    r_assemble = 2 * cfg.R if cfg.assemble_at_full else cfg.R
    ad_star = coadjoint_star(P, V, r_assemble, workers=cfg.fft_workers)
    velocity_rate = apply_multiplier(ad_star, cfg.R_hat)
    return -truncate(velocity_rate, cfg.R)


def lie_bracket_truncated(
    V: SpectralField,
    W: SpectralField,
    r: int,
    *,
    convolution: Optional[Convolution] = None,
    workers: Optional[int] = None,
) -> SpectralField:
    """[V, W]_r = Pi_r((DW) V - (DV) W)

    Component i is sum_j (D_j W_i) * V_j - (D_j V_i) * W_j.
    """
    _check_vector_pair(V, W, r)
    d = V.d
    if convolution is not None:
        components = []
        for i in range(d):
            acc = np.zeros(V.grid.with_cutoff(r).size, dtype=complex)
            for j in range(d):
                acc += convolution(_gradient_field(W, i, j), V.component(j), r).coeffs[0]
                acc -= convolution(_gradient_field(V, i, j), W.component(j), r).coeffs[0]
            components.append(acc)
        result = SpectralField(grid=V.grid.with_cutoff(r), coeffs=np.stack(components))
        return finish_real(result, (V, W))

    plan = ConvolutionPlan(d, V.R, workers)
    Vx = _PhysicalFactors(plan, V)
    Wx = _PhysicalFactors(plan, W)
    total = np.sum(
        Wx.gradient * Vx.values[np.newaxis] - Vx.gradient * Wx.values[np.newaxis],
        axis=1,
    )
    result = SpectralField(grid=plan.output_grid(r), coeffs=plan.to_spectral(total, r))
    return finish_real(result, (V, W))


def ad_tilde(
    V: SpectralField, W: SpectralField, r: int, workers: Optional[int] = None
) -> SpectralField:
    """Approximate adjoint action, -[V, W]_r"""
    return -lie_bracket_truncated(V, W, r, workers=workers)


def _bracket_common(a: SpectralField, b: SpectralField, r: int) -> SpectralField:
    cutoff = max(a.R, b.R, r)
    return lie_bracket_truncated(extend(a, cutoff), extend(b, cutoff), r)


def jacobiator(U: SpectralField, V: SpectralField, W: SpectralField, r: int) -> SpectralField:
    """[U,[V,W]_r]_r + [V,[W,U]_r]_r + [W,[U,V]_r]_r

    Vanishes for the exact bracket; truncation below 2R breaks it.
    """
    return (
        _bracket_common(U, _bracket_common(V, W, r), r)
        + _bracket_common(V, _bracket_common(W, U, r), r)
        + _bracket_common(W, _bracket_common(U, V, r), r)
    )


def weak_pairing(P: SpectralField, W: SpectralField) -> float:
    """Re sum_i sum_xi P_i^(xi) conj(W_i^(xi)) over the common support"""
    if P.d != W.d or P.ncomp != W.ncomp:
        raise GridMismatchError(
            f"cannot pair (d={P.d}, ncomp={P.ncomp}) with (d={W.d}, ncomp={W.ncomp})"
        )
    cutoff = min(P.R, W.R)
    a = truncate(P, cutoff).coeffs
    b = truncate(W, cutoff).coeffs
    return float(np.real(np.sum(a * np.conj(b))))
