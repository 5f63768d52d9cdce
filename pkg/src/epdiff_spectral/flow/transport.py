"""Flow maps of velocity trajectories and the momentum transport diagnostic

Particles start on the uniform grid x_n = n / N and follow dphi/dt =
V_t(phi). Their Jacobians obey d(Dphi)/dt = DV_t(phi) Dphi and are advanced
with the same Runge-Kutta stages, jointly with the geodesic itself, so the
velocity at every stage time is the one the solver would produce.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.fft import next_fast_len

from ..dynamics import DynamicsConfig, discrete_rhs, weak_pairing
from ..errors import FlowDegeneracyError, InvalidArgumentError
from ..integration.integrator import (
    Trajectory,
    explicit_rk_step,
    prepare_initial_velocity,
    sample_steps,
)
from ..integration.tableaux import ButcherTableau, get_tableau
from ..spectral.field import SpectralField
from ..spectral.multipliers import derivative_symbols
from ..spectral.sampling import evaluate_at_points, grid_pairing, grid_points, synthesize_on_grid

logger = logging.getLogger(__name__)

# Sample times of a trajectory and its flow maps must agree to this precision.
TIME_TOLERANCE = 1e-12


def default_particle_grid(R: int) -> int:
    """2(2R+1) rounded up to an FFT-friendly size"""
    return int(next_fast_len(2 * (2 * R + 1), real=True))


class FlowMap(BaseModel):
    """phi_t - id and D phi_t sampled on the N^d particle grid

    ``disp`` has shape (N^d, d) and is not wrapped into the torus; ``jac``
    has shape (N^d, d, d) with jac[p, i, j] = d phi_i / d x_j.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    N: int
    d: int
    t: float
    disp: np.ndarray
    jac: np.ndarray

    @classmethod
    def identity(cls, N: int, d: int) -> "FlowMap":
        npoints = N**d
        return cls(
            N=N,
            d=d,
            t=0.0,
            disp=np.zeros((npoints, d)),
            jac=np.tile(np.eye(d), (npoints, 1, 1)),
        )

    @property
    def nodes(self) -> np.ndarray:
        return grid_points(self.N, self.d)

    @property
    def positions(self) -> np.ndarray:
        """phi_t(x_n), unwrapped"""
        return self.nodes + self.disp

    def determinants(self) -> np.ndarray:
        return np.linalg.det(self.jac)

    def check_orientation(self) -> None:
        """Raise FlowDegeneracyError at the first node with det <= 0"""
        _check_orientation(self.nodes, self.jac, self.t)


def _check_orientation(nodes: np.ndarray, jac: np.ndarray, t: float) -> None:
    dets = np.linalg.det(jac)
    bad = np.flatnonzero(~(dets > 0.0))
    if bad.size:
        p = int(bad[0])
        point = tuple(float(v) for v in nodes[p])
        logger.error(f"Flow lost orientation at x={point}, t={t:.6g}")
        raise FlowDegeneracyError(t, point, float(dets[p]))


@dataclass(frozen=True)
class _FlowState:
    """Velocity, particle positions and Jacobians advanced together"""

    V: SpectralField
    X: np.ndarray
    J: np.ndarray

    __array_ufunc__ = None

    def __add__(self, other: "_FlowState") -> "_FlowState":
        return _FlowState(self.V + other.V, self.X + other.X, self.J + other.J)

    def __mul__(self, scalar: Any) -> "_FlowState":
        return _FlowState(scalar * self.V, scalar * self.X, scalar * self.J)

    __rmul__ = __mul__

    def is_finite(self) -> bool:
        return (
            self.V.is_finite()
            and bool(np.all(np.isfinite(self.X)))
            and bool(np.all(np.isfinite(self.J)))
        )


def _velocity_and_gradient(V: SpectralField, X: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """V(X) as (P, d) and DV(X) as (P, d, d), from one off-grid evaluation"""
    d = V.d
    dsym = derivative_symbols(V.grid.frequencies())
    gradient = (V.coeffs[:, np.newaxis, :] * dsym.T[np.newaxis]).reshape(d * d, -1)
    stacked = SpectralField(grid=V.grid, coeffs=np.vstack([V.coeffs, gradient]))
    values = evaluate_at_points(stacked, X)
    velocity = values[:d].T
    grad = np.moveaxis(values[d:].reshape(d, d, -1), -1, 0)
    return velocity, grad


def _flow_rhs(
    velocity_rate: Callable[[SpectralField], SpectralField],
) -> Callable[[float, _FlowState], _FlowState]:
    def rhs(_t: float, state: _FlowState) -> _FlowState:
        velocity, grad = _velocity_and_gradient(state.V, state.X)
        return _FlowState(velocity_rate(state.V), velocity, grad @ state.J)

    return rhs


def _transport(
    V0: SpectralField,
    velocity_rate: Callable[[SpectralField], SpectralField],
    N: int,
    tab: ButcherTableau,
    nsteps: int,
    sample_times: Optional[Sequence[float]],
) -> List[FlowMap]:
    if N < 1:
        raise InvalidArgumentError(f"particle grid size must be positive, got {N}")
    d = V0.d
    wanted = sample_steps(sample_times, nsteps)
    h = 1.0 / nsteps
    nodes = grid_points(N, d)
    state = _FlowState(V0, nodes.copy(), np.tile(np.eye(d), (nodes.shape[0], 1, 1)))
    rhs = _flow_rhs(velocity_rate)
    logger.info(f"Transporting {nodes.shape[0]} particles over {nsteps} steps with {tab.name}")

    flows = [FlowMap.identity(N, d)] if wanted[0] == 0 else []
    pending = iter(wanted[1:])
    next_sample = next(pending, None)
    for n in range(nsteps):
        state = explicit_rk_step(rhs, state, n * h, h, tab)
        t = (n + 1) * h
        _check_orientation(nodes, state.J, t)
        if next_sample == n + 1:
            flows.append(FlowMap(N=N, d=d, t=t, disp=state.X - nodes, jac=state.J.copy()))
            next_sample = next(pending, None)
    return flows


def integrate_flow(
    traj: Trajectory,
    N: Optional[int] = None,
    tab: Optional[ButcherTableau] = None,
    nsteps: Optional[int] = None,
) -> List[FlowMap]:
    """Flow maps of a geodesic at its sample times

    The geodesic is re-integrated from its initial velocity jointly with
    the particles; ``tab`` and ``nsteps`` default to those of ``traj``.
    """
    cfg: DynamicsConfig = traj.config
    N = N if N is not None else default_particle_grid(cfg.R)
    tab = tab if tab is not None else get_tableau(traj.tableau_name)
    nsteps = nsteps if nsteps is not None else traj.steps
    V0 = prepare_initial_velocity(traj.initial.V, cfg)
    return _transport(
        V0, lambda v: discrete_rhs(v, cfg), N, tab, nsteps, traj.sample_times
    )


def integrate_frozen_flow(
    V: SpectralField,
    N: int,
    tab: ButcherTableau,
    nsteps: int,
    sample_times: Optional[Sequence[float]] = None,
) -> List[FlowMap]:
    """Flow of the autonomous field V, held fixed in time"""
    if V.ncomp != V.d:
        raise InvalidArgumentError(f"expected a {V.d}-component field, got {V.ncomp}")
    still = SpectralField.zeros(V.grid, V.ncomp)
    return _transport(V, lambda _v: still, N, tab, nsteps, sample_times)


def ad_inverse_apply(flow: FlowMap, w: SpectralField) -> np.ndarray:
    """Samples of Ad_{phi^{-1}} w = (D phi)^{-1} w(phi) at the particle nodes

    Returns an array of shape (d, N^d).
    """
    if w.d != flow.d or w.ncomp != flow.d:
        raise InvalidArgumentError(
            f"test field has d={w.d}, ncomp={w.ncomp}; flow has d={flow.d}"
        )
    flow.check_orientation()
    w_at_phi = evaluate_at_points(w, flow.positions)
    solved = np.linalg.solve(flow.jac, w_at_phi.T[..., np.newaxis])[..., 0]
    return solved.T


def momentum_transport_residual(
    traj: Trajectory, flows: Sequence[FlowMap], w: SpectralField
) -> List[float]:
    """<P_t, w> - Q(P_0, Ad_{phi_t^{-1}} w) at every sample time

    Q is the rectangle rule on the particle grid. The residual vanishes
    for the continuous equation.
    """
    if len(flows) != len(traj.states):
        raise InvalidArgumentError(
            f"{len(flows)} flow maps for {len(traj.states)} trajectory samples"
        )
    if not flows:
        return []
    N = flows[0].N
    P0 = synthesize_on_grid(traj.initial.P, N).reshape(traj.config.d, -1)
    residuals = []
    for state, flow in zip(traj.states, flows):
        if abs(state.t - flow.t) > TIME_TOLERANCE or flow.N != N:
            raise InvalidArgumentError(
                f"flow map at t={flow.t} (N={flow.N}) does not match sample t={state.t}"
            )
        transported = ad_inverse_apply(flow, w)
        residual = weak_pairing(state.P, w) - grid_pairing(P0, transported)
        logger.debug(f"Momentum transport residual at t={state.t:.6g}: {residual:.3e}")
        residuals.append(residual)
    return residuals


def finite_difference_jacobian(flow: FlowMap) -> np.ndarray:
    """Periodic centred differences of id + disp, shape (N^d, d, d)"""
    N, d = flow.N, flow.d
    disp = flow.disp.reshape((N,) * d + (d,))
    jac = np.empty((N,) * d + (d, d))
    for j in range(d):
        diff = (np.roll(disp, -1, axis=j) - np.roll(disp, 1, axis=j)) * (N / 2.0)
        jac[..., :, j] = diff
    jac += np.eye(d)
    return jac.reshape(N**d, d, d)


def min_jacobian_determinant(flow: FlowMap) -> float:
    return float(np.min(flow.determinants()))
