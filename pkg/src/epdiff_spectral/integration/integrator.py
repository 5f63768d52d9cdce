"""Fixed-step explicit Runge-Kutta integration of the geodesic ODE"""

import logging
import time
from typing import Any, Callable, List, Optional, Sequence, TypeVar

import numpy as np
from pydantic import BaseModel, ConfigDict

from ..dynamics import DynamicsConfig, GeodesicState, discrete_rhs, metric_energy
from ..errors import BlowUpError, GridMismatchError, InvalidArgumentError
from ..spectral.field import SpectralField, check_hermitian, extend
from .tableaux import ButcherTableau

logger = logging.getLogger(__name__)

State = TypeVar("State")

# Sample times closer than this to a step multiple are snapped onto it.
SAMPLE_TOLERANCE = 1e-12


def _is_finite(y: Any) -> bool:
    if hasattr(y, "is_finite"):
        return bool(y.is_finite())
    return bool(np.all(np.isfinite(y)))


def _combine(y: State, h: float, weights: Sequence[float], ks: Sequence[State]) -> State:
    increment = None
    for w, k in zip(weights, ks):
        if w == 0.0:
            continue
        term = w * k
        increment = term if increment is None else increment + term
    if increment is None:
        return y
    return y + h * increment


def explicit_rk_step(
    rhs: Callable[[float, State], State],
    y: State,
    t: float,
    h: float,
    tab: ButcherTableau,
) -> State:
    """One step y -> y + h sum_i b_i k_i with k_i = rhs(t + c_i h, y + h sum_j a_ij k_j)

    Works for any state supporting ``+`` and scalar ``*``: floats, arrays,
    spectral fields. Non-finite stage values raise BlowUpError.
    """
    ks: List[State] = []
    with np.errstate(over="ignore", invalid="ignore"):
        for i in range(tab.stages):
            stage_time = t + tab.c[i] * h
            stage_input = _combine(y, h, tab.a[i][:i], ks)
            k = rhs(stage_time, stage_input)
            if not _is_finite(k):
                logger.error(f"Blow-up in stage {i} at t={stage_time:.6g}")
                raise BlowUpError(stage_time, i)
            ks.append(k)
        y_next = _combine(y, h, tab.b, ks)
    if not _is_finite(y_next):
        raise BlowUpError(t + h, tab.stages - 1)
    return y_next


def rk_step(
    V: SpectralField,
    h: float,
    tab: ButcherTableau,
    cfg: DynamicsConfig,
    t: float = 0.0,
) -> SpectralField:
    """One step of dV/dt = discrete_rhs(V)"""
    if not h > 0:
        raise InvalidArgumentError(f"step size must be positive, got {h}")
    return explicit_rk_step(lambda _t, v: discrete_rhs(v, cfg), V, t, h, tab)


def sample_steps(sample_times: Optional[Sequence[float]], nsteps: int) -> List[int]:
    """Step indices of the requested sample times, always including 0

    Defaults to [0, nsteps]. Times must lie in [0, 1] and be multiples of
    h = 1 / nsteps.
    """
    if nsteps < 1:
        raise InvalidArgumentError(f"nsteps must be positive, got {nsteps}")
    if sample_times is None:
        return [0, nsteps]
    steps = {0}
    for t in sample_times:
        if not 0.0 <= t <= 1.0:
            raise InvalidArgumentError(f"sample time {t} outside [0, 1]")
        k = int(round(t * nsteps))
        if abs(k / nsteps - t) > SAMPLE_TOLERANCE:
            raise InvalidArgumentError(
                f"sample time {t} is not a multiple of the step 1/{nsteps}"
            )
        steps.add(k)
    return sorted(steps)


class Trajectory(BaseModel):
    """Geodesic states recorded at the requested sample times"""

    model_config = ConfigDict(frozen=True)

    sample_times: List[float]
    states: List[GeodesicState]
    steps: int
    energy_log: List[float]
    tableau_name: str
    config: DynamicsConfig
    wall_time: float = 0.0

    @property
    def initial(self) -> GeodesicState:
        return self.states[0]

    @property
    def final(self) -> GeodesicState:
        return self.states[-1]


def prepare_initial_velocity(V0: SpectralField, cfg: DynamicsConfig) -> SpectralField:
    """Check V0 against the config and zero-extend it to the solver cutoff"""
    if V0.d != cfg.d or V0.ncomp != cfg.d:
        raise GridMismatchError(
            f"initial velocity has d={V0.d}, ncomp={V0.ncomp}; config expects d={cfg.d}"
        )
    if V0.R > cfg.R:
        raise GridMismatchError(
            f"initial velocity cutoff {V0.R} exceeds solver cutoff {cfg.R}"
        )
    check_hermitian(V0)
    return extend(V0, cfg.R)


def integrate_geodesic(
    V0: SpectralField,
    nsteps: int,
    tab: ButcherTableau,
    cfg: DynamicsConfig,
    sample_times: Optional[Sequence[float]] = None,
) -> Trajectory:
    """Integrate the bandlimited geodesic on [0, 1] with h = 1 / nsteps"""
    wanted = sample_steps(sample_times, nsteps)
    V = prepare_initial_velocity(V0, cfg)
    h = 1.0 / nsteps
    logger.info(
        f"Integrating geodesic d={cfg.d} m={cfg.m} R={cfg.R} "
        f"with {tab.name}, {nsteps} steps"
    )
    started = time.perf_counter()

    states = []
    if wanted[0] == 0:
        states.append(GeodesicState.from_velocity(0.0, V, cfg))
    pending = iter(wanted[1:])
    next_sample = next(pending, None)
    try:
        for n in range(nsteps):
            V = rk_step(V, h, tab, cfg, t=n * h)
            if next_sample == n + 1:
                states.append(GeodesicState.from_velocity((n + 1) * h, V, cfg))
                logger.debug(f"Recorded sample at t={(n + 1) * h:.6g}")
                next_sample = next(pending, None)
    except BlowUpError as e:
        logger.error(f"Geodesic integration failed: {e}")
        raise

    elapsed = time.perf_counter() - started
    energy_log = [metric_energy(state.V, cfg) for state in states]
    logger.info(f"Geodesic integration finished in {elapsed:.3f}s")
    return Trajectory(
        sample_times=[k * h for k in wanted],
        states=states,
        steps=nsteps,
        energy_log=energy_log,
        tableau_name=tab.name,
        config=cfg,
        wall_time=elapsed,
    )
