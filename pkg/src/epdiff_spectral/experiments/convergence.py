"""Discretization-error study over the solver cutoff R

For every regularity s a random v0 is drawn at the reference cutoff, the
geodesic is solved at R_ref as a stand-in for the exact solution, and the
H^m error at t = 1 of every coarser run is recorded together with its
energy drift and a fitted log-log rate.
"""

import logging
import math
from concurrent.futures import Executor, Future
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..dynamics import DynamicsConfig
from ..errors import BlowUpError, InvalidArgumentError
from ..integration.integrator import Trajectory, integrate_geodesic
from ..integration.tableaux import DOPRI5_6STAGE, ButcherTableau, get_tableau
from ..spectral.field import SpectralField, extend, sobolev_norm, truncate
from .initial_data import InitSpec, random_sobolev_field

logger = logging.getLogger(__name__)


class RowStatus(Enum):
    OK = "ok"
    BLOWUP = "blowup"


class ConvergenceRow(BaseModel):
    """One (s, R) run of a study"""

    R: int
    s: float
    error_Hm: float
    energy_drift: float
    wall_time: float
    status: RowStatus = RowStatus.OK
    message: str = ""


class ConvergenceReport(BaseModel):
    """Rows of one regularity s, sorted by R, with the fitted rate"""

    s: float
    rows: List[ConvergenceRow]
    fitted_slope: Optional[float] = None
    reference_R: int
    config: Dict[str, Any] = Field(default_factory=dict)

    def errors(self) -> List[Tuple[int, float]]:
        return [(row.R, row.error_Hm) for row in self.rows if row.status is RowStatus.OK]


class StudyConfig(BaseModel):
    """Parameters of a convergence study; defaults are the desk-scale protocol

    ``r_inner`` switches on double truncation: an integer keeps the initial
    data at cutoff min(r_inner, R), ``"log2"`` uses ceil(log2 R).
    """

    model_config = ConfigDict(frozen=True)

    d: int = Field(default=2, ge=1, le=3)
    m: int = Field(default=3, ge=1)
    s_list: List[float] = Field(default_factory=lambda: [3.0, 4.0, 5.0, 6.0])
    R_list: List[int] = Field(default_factory=lambda: [4, 8, 16, 32])
    R_ref: int = Field(default=64, ge=1)
    nsteps: int = Field(default=1024, ge=1)
    tableau: str = "dopri5"
    seed: Optional[int] = 1
    eps: float = Field(default=0.1, gt=0)
    literal_real_draw: bool = False
    r_inner: Optional[Union[int, str]] = None

    @field_validator("R_list")
    @classmethod
    def _sorted_cutoffs(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("R_list must not be empty")
        if any(R < 1 for R in value):
            raise ValueError("every R in R_list must be >= 1")
        return sorted(set(value))

    @field_validator("s_list")
    @classmethod
    def _nonnegative_regularity(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("s_list must not be empty")
        if any(s < 0 for s in value):
            raise ValueError("every s in s_list must be >= 0")
        return value

    @field_validator("r_inner")
    @classmethod
    def _inner_rule(cls, value: Optional[Union[int, str]]) -> Optional[Union[int, str]]:
        if isinstance(value, str) and value != "log2":
            raise ValueError("r_inner must be an integer >= 0 or 'log2'")
        if isinstance(value, int) and value < 0:
            raise ValueError("r_inner must be >= 0")
        return value

    @model_validator(mode="after")
    def _reference_above_list(self) -> "StudyConfig":
        if max(self.R_list) >= self.R_ref:
            raise ValueError(f"R_ref={self.R_ref} must exceed every R in R_list")
        return self

    def inner_cutoff(self, R: int) -> int:
        """Cutoff of the initial data for a run at solver cutoff R"""
        if self.r_inner is None:
            return R
        if self.r_inner == "log2":
            return min(R, math.ceil(math.log2(R)))
        return min(int(self.r_inner), R)

    def describe(self) -> Dict[str, Any]:
        return self.model_dump()


def energy_drift_flagged(traj: Trajectory) -> Tuple[float, bool]:
    """max_t |sqrt(E_t) - sqrt(E_0)|, relative to sqrt(E_0) when that is nonzero

    The flag is False when the drift had to be reported in absolute terms.
    """
    if not traj.energy_log:
        raise InvalidArgumentError("trajectory has no energy samples")
    norms = np.sqrt(np.maximum(np.array(traj.energy_log), 0.0))
    drift = float(np.max(np.abs(norms - norms[0])))
    if norms[0] == 0.0:
        logger.warning("Zero initial energy; reporting absolute drift")
        return drift, False
    return drift / float(norms[0]), True


def energy_drift(traj: Trajectory) -> float:
    """Relative drift of the metric norm over the recorded samples"""
    return energy_drift_flagged(traj)[0]


def fit_rate(points: Sequence[Tuple[float, float]]) -> float:
    """Least-squares slope of log(error) against log(R)

    Points with a nonpositive or non-finite entry are dropped with a warning.
    """
    valid = [
        (R, e)
        for R, e in points
        if R > 0 and e > 0 and math.isfinite(R) and math.isfinite(e)
    ]
    if len(valid) < len(points):
        logger.warning(f"Excluded {len(points) - len(valid)} nonpositive points from rate fit")
    if len(valid) < 2:
        raise InvalidArgumentError(f"rate fit needs >= 2 valid points, got {len(valid)}")
    R, e = np.array(valid, dtype=float).T
    slope, _ = np.polyfit(np.log(R), np.log(e), 1)
    return float(slope)


def hm_error(V: SpectralField, reference: SpectralField, m: float) -> float:
    """||V - reference||_{H^m} with V read as zero above its cutoff

    Equals the difference on the common support plus the reference tail
    energy, added in quadrature.
    """
    return sobolev_norm(extend(V, reference.R) - reference, m)


def double_truncation_run(
    v0: SpectralField,
    r: int,
    R: int,
    *,
    m: int,
    nsteps: int = 1024,
    tab: ButcherTableau = DOPRI5_6STAGE,
    sample_times: Optional[Sequence[float]] = None,
) -> Trajectory:
    """Geodesic at solver cutoff R from the initial data Pi_r v0"""
    if r < 0 or r > R:
        raise InvalidArgumentError(f"inner cutoff r={r} must satisfy 0 <= r <= R={R}")
    cfg = DynamicsConfig(d=v0.d, m=m, R=R)
    V0 = truncate(v0, min(r, v0.R))
    return integrate_geodesic(V0, nsteps, tab, cfg, sample_times)


def _solve(
    v0: SpectralField, R: int, config: StudyConfig, tab: ButcherTableau
) -> Union[Trajectory, BlowUpError]:
    try:
        return double_truncation_run(
            v0, config.inner_cutoff(R), R, m=config.m, nsteps=config.nsteps, tab=tab
        )
    except BlowUpError as e:
        logger.warning(f"Run R={R} blew up: {e}")
        return e


def run_convergence_study(
    config: StudyConfig, executor: Optional[Executor] = None
) -> List[ConvergenceReport]:
    """One report per s in ``config.s_list``

    Runs are independent and go to ``executor`` when one is given; rows
    are assembled in a fixed order afterwards. The same seed draws the
    base field for every s.
    """
    tab = get_tableau(config.tableau)
    logger.info(
        f"Convergence study d={config.d} m={config.m} s={config.s_list} "
        f"R={config.R_list} R_ref={config.R_ref}"
    )

    jobs: Dict[Tuple[float, int], Union[Future, Trajectory, BlowUpError]] = {}
    for s in config.s_list:
        v0 = random_sobolev_field(
            InitSpec(
                d=config.d,
                s=s,
                cutoff=config.R_ref,
                eps=config.eps,
                seed=config.seed,
                literal_real_draw=config.literal_real_draw,
            )
        )
        for R in [config.R_ref, *config.R_list]:
            if executor is None:
                jobs[(s, R)] = _solve(v0, R, config, tab)
            else:
                jobs[(s, R)] = executor.submit(_solve, v0, R, config, tab)

    def outcome(key: Tuple[float, int]) -> Union[Trajectory, BlowUpError]:
        job = jobs[key]
        return job.result() if isinstance(job, Future) else job

    reports = []
    for s in config.s_list:
        reference = outcome((s, config.R_ref))
        rows = []
        for R in config.R_list:
            run = outcome((s, R))
            if isinstance(run, BlowUpError):
                rows.append(_failed_row(R, s, str(run)))
            elif isinstance(reference, BlowUpError):
                rows.append(_failed_row(R, s, f"reference run failed: {reference}"))
            else:
                rows.append(
                    ConvergenceRow(
                        R=R,
                        s=s,
                        error_Hm=hm_error(run.final.V, reference.final.V, config.m),
                        energy_drift=energy_drift(run),
                        wall_time=run.wall_time,
                    )
                )
        reports.append(
            ConvergenceReport(
                s=s,
                rows=rows,
                fitted_slope=_slope_or_none(rows),
                reference_R=config.R_ref,
                config=config.describe(),
            )
        )
        logger.info(f"s={s}: fitted slope {reports[-1].fitted_slope}")
    return reports


def _failed_row(R: int, s: float, message: str) -> ConvergenceRow:
    return ConvergenceRow(
        R=R,
        s=s,
        error_Hm=float("nan"),
        energy_drift=float("nan"),
        wall_time=0.0,
        status=RowStatus.BLOWUP,
        message=message,
    )


def _slope_or_none(rows: List[ConvergenceRow]) -> Optional[float]:
    points = [(row.R, row.error_Hm) for row in rows if row.status is RowStatus.OK]
    if len(points) < 2:
        return None
    try:
        return fit_rate(points)
    except InvalidArgumentError:
        return None
