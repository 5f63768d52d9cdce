"""Command-line front end: ``epdiff solve | converge | diagnose``

Configuration comes from defaults, an optional ``key=value`` file given
with ``--config`` and command-line flags, in increasing priority.

Exit codes: 0 success, 1 configuration or input error, 2 numerical
blow-up, 3 flow degeneracy.
"""

import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Union

import click
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator
from rich.console import Console
from rich.logging import RichHandler

from . import __version__
from .data.field_io import read_field_csv, write_field_csv
from .dynamics import DynamicsConfig, discrete_rhs
from .errors import (
    BlowUpError,
    ConfigError,
    EPDiffError,
    FlowDegeneracyError,
)
from .experiments.convergence import (
    RowStatus,
    StudyConfig,
    energy_drift,
    run_convergence_study,
)
from .experiments.initial_data import InitSpec, random_sobolev_field, sine_mode_field
from .flow.transport import (
    default_particle_grid,
    integrate_flow,
    min_jacobian_determinant,
    momentum_transport_residual,
)
from .infrastructure.container import AppConfig, RuntimeContainer
from .integration.integrator import integrate_geodesic
from .integration.tableaux import get_tableau
from .reporting import (
    config_echo,
    convergence_table,
    key_value_table,
    write_convergence_report,
    write_convergence_summary,
    write_diagnostics,
    write_energy_log,
    write_flow_map,
    write_key_values,
    write_plot_data,
)
from .spectral.field import SpectralField, extend, truncate

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BLOWUP = 2
EXIT_DEGENERATE = 3

# Spellings accepted in config files besides the field names themselves.
KEY_ALIASES = {
    "steps": "nsteps",
    "in": "in_path",
    "input": "in_path",
    "R-ref": "R_ref",
    "s-list": "s_list",
    "R-list": "R_list",
    "r-inner": "r_inner",
    "N-flow": "N_flow",
    "out-dir": "out_dir",
    "literal-real-draw": "literal_real_draw",
}

err_console = Console(stderr=True)
console = Console()


class RunConfig(BaseModel):
    """Resolved configuration of one CLI invocation"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    command: Literal["solve", "converge", "diagnose"]
    d: Optional[int] = Field(default=None, ge=1, le=3)
    m: Optional[int] = Field(default=None, ge=1)
    R: Optional[int] = Field(default=None, ge=0)
    R_ref: Optional[int] = Field(default=None, ge=1)
    s: Optional[float] = Field(default=None, ge=0)
    s_list: Optional[List[float]] = None
    R_list: Optional[List[int]] = None
    nsteps: int = Field(default=1024, ge=1)
    tableau: str = "dopri5"
    seed: Optional[int] = 1
    eps: float = Field(default=0.1, gt=0)
    r_inner: Optional[Union[int, str]] = None
    N_flow: Optional[int] = Field(default=None, ge=1)
    in_path: Optional[Path] = None
    out_dir: Path = Path(".")
    literal_real_draw: bool = False

    @field_validator("s_list", "R_list", mode="before")
    @classmethod
    def _split_list(cls, value: Any) -> Any:
        if isinstance(value, str):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value

    @field_validator("seed", mode="before")
    @classmethod
    def _seed_or_none(cls, value: Any) -> Any:
        if isinstance(value, str) and value.strip().lower() == "none":
            return None
        return value

    @field_validator("r_inner", mode="before")
    @classmethod
    def _inner_cutoff(cls, value: Any) -> Any:
        if isinstance(value, str):
            value = value.strip()
            if value.lower() == "none":
                return None
            if value.lstrip("-").isdigit():
                value = int(value)
        if isinstance(value, str) and value != "log2":
            raise ValueError("r_inner must be a nonnegative integer or 'log2'")
        if isinstance(value, int) and value < 0:
            raise ValueError("r_inner must be a nonnegative integer or 'log2'")
        return value

    @field_validator("tableau")
    @classmethod
    def _known_tableau(cls, value: str) -> str:
        get_tableau(value)
        return value

    def require(self, *keys: str) -> None:
        for key in keys:
            if getattr(self, key) is None:
                raise ConfigError(f"missing required key '{key}'", key)

    def echo(self) -> Dict[str, Any]:
        """Non-empty settings in plain form for output headers"""
        return {
            key: (",".join(str(v) for v in value) if isinstance(value, list) else value)
            for key, value in self.model_dump(mode="json").items()
            if value is not None
        }


def parse_config_file(path: Path) -> Dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are skipped"""
    values: Dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}", "config") from e
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key = key.strip().lstrip("-")
        values[KEY_ALIASES.get(key, key)] = value.strip()
    return values


def resolve_config(
    command: str, config_path: Optional[Path], flags: Dict[str, Any]
) -> RunConfig:
    """Defaults < config file < flags; unknown keys and bad values raise ConfigError"""
    values: Dict[str, Any] = {}
    if config_path is not None:
        values.update(parse_config_file(config_path))
        file_command = values.pop("command", command)
        if file_command != command:
            logger.warning(f"Config file is for '{file_command}', running '{command}'")
    values.update(
        {key: value for key, value in flags.items() if value is not None and value is not False}
    )
    try:
        return RunConfig(command=command, **values)
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or None
        if first["type"] == "extra_forbidden":
            raise ConfigError(f"unknown key '{key}'", key) from e
        raise ConfigError(f"invalid value for '{key}': {first['msg']}", key) from e


def _initial_velocity(cfg: RunConfig) -> SpectralField:
    if cfg.in_path is not None:
        V0 = read_field_csv(cfg.in_path)
        if V0.d != cfg.d or V0.ncomp != cfg.d:
            raise ConfigError(
                f"input field has d={V0.d}, ncomp={V0.ncomp}; config has d={cfg.d}", "in"
            )
        if V0.R > cfg.R:
            raise ConfigError(f"input field cutoff {V0.R} exceeds R={cfg.R}", "in")
    else:
        if cfg.seed is None:
            raise ConfigError("missing required key 'in' (no seed to generate from)", "in")
        cfg.require("s")
        V0 = random_sobolev_field(
            InitSpec(
                d=cfg.d,
                s=cfg.s,
                cutoff=cfg.R,
                eps=cfg.eps,
                seed=cfg.seed,
                literal_real_draw=cfg.literal_real_draw,
            )
        )
    if cfg.r_inner is not None:
        if cfg.r_inner == "log2":
            r = math.ceil(math.log2(cfg.R)) if cfg.R >= 1 else 0
        else:
            r = int(cfg.r_inner)
        V0 = truncate(V0, min(r, V0.R))
    return extend(V0, cfg.R)


def _dynamics(cfg: RunConfig) -> DynamicsConfig:
    cfg.require("d", "m", "R")
    return DynamicsConfig(d=cfg.d, m=cfg.m, R=cfg.R)


def cmd_solve(cfg: RunConfig, container: RuntimeContainer) -> int:
    """Integrate one geodesic; write the final state, energy log and initial RHS"""
    dyn = _dynamics(cfg)
    V0 = _initial_velocity(cfg)
    tab = get_tableau(cfg.tableau)
    meta = cfg.echo()

    traj = integrate_geodesic(V0, cfg.nsteps, tab, dyn)
    out = container.output_dir
    write_field_csv(
        discrete_rhs(V0, dyn), out / "initial_rhs.csv", config_echo({**meta, "t": 0.0})
    )
    write_field_csv(
        traj.final.V, out / "final_state.csv", config_echo({**meta, "t": traj.final.t})
    )
    write_energy_log(traj, out / "energy_log.csv", meta)

    console.print(
        key_value_table(
            "Geodesic",
            {
                "energy (t=0)": traj.energy_log[0],
                "energy (t=1)": traj.energy_log[-1],
                "relative drift": energy_drift(traj),
                "wall time [s]": traj.wall_time,
            },
        )
    )
    return EXIT_OK


def cmd_converge(cfg: RunConfig, container: RuntimeContainer) -> int:
    """Run the convergence study; exit 2 only when every row failed"""
    overrides = {
        key: getattr(cfg, key)
        for key in ("d", "m", "s_list", "R_list", "R_ref", "r_inner")
        if getattr(cfg, key) is not None
    }
    try:
        study = StudyConfig(
            nsteps=cfg.nsteps,
            tableau=cfg.tableau,
            seed=cfg.seed,
            eps=cfg.eps,
            literal_real_draw=cfg.literal_real_draw,
            **overrides,
        )
    except ValidationError as e:
        first = e.errors()[0]
        key = ".".join(str(part) for part in first["loc"]) or None
        raise ConfigError(f"invalid study configuration: {first['msg']}", key) from e

    reports = run_convergence_study(study, executor=container.executor)
    meta = {**cfg.echo(), **{k: v for k, v in study.describe().items() if v is not None}}
    meta = {k: (",".join(map(str, v)) if isinstance(v, list) else v) for k, v in meta.items()}
    out = container.output_dir
    for report in reports:
        write_convergence_report(report, out, meta)
    write_convergence_summary(reports, out, meta)
    write_plot_data(reports, out, meta)
    console.print(convergence_table(reports))

    rows = [row for report in reports for row in report.rows]
    if rows and all(row.status is not RowStatus.OK for row in rows):
        err_console.print("Error: every run of the study blew up", style="red", markup=False)
        return EXIT_BLOWUP
    return EXIT_OK


def cmd_diagnose(cfg: RunConfig, container: RuntimeContainer) -> int:
    """Energy drift, momentum transport residual and flow map of one geodesic

    The residual uses the test field w = sin(2 pi x_1) e_1 truncated to R.
    """
    dyn = _dynamics(cfg)
    V0 = _initial_velocity(cfg)
    tab = get_tableau(cfg.tableau)
    N = cfg.N_flow or default_particle_grid(dyn.R)
    if N < 2 * dyn.R + 1:
        raise ConfigError(f"N_flow={N} must be at least 2R+1={2 * dyn.R + 1}", "N_flow")
    sample_times = (
        [0.25, 0.5, 0.75, 1.0] if cfg.nsteps % 4 == 0 else [1.0]
    )
    meta = {**cfg.echo(), "N_flow": N}

    traj = integrate_geodesic(V0, cfg.nsteps, tab, dyn, sample_times)
    flows = integrate_flow(traj, N=N, tab=tab)
    w = sine_mode_field(dyn.d, dyn.R)
    residuals = momentum_transport_residual(traj, flows, w)
    min_dets = [min_jacobian_determinant(flow) for flow in flows]

    out = container.output_dir
    write_diagnostics(
        traj.sample_times, traj.energy_log, residuals, min_dets, out / "diagnostics.csv", meta
    )
    summary = {
        "energy_drift": energy_drift(traj),
        "max_abs_momentum_residual": max(abs(r) for r in residuals),
        "min_jacobian_det": min(min_dets),
    }
    write_key_values(summary, out / "diagnose_summary.csv", meta)
    write_flow_map(flows[-1], out / "flow_map.csv", meta)
    console.print(key_value_table("Conservation diagnostics", summary))
    return EXIT_OK


def setup_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, rich_tracebacks=True)],
    )
    logging.getLogger("epdiff_spectral").setLevel(level)


def _run(ctx: click.Context, command: str, config_path: Optional[str], flags: Dict[str, Any],
         action: Callable[[RunConfig, RuntimeContainer], int]) -> None:
    code = EXIT_OK
    try:
        cfg = resolve_config(command, Path(config_path) if config_path else None, flags)
        with RuntimeContainer(AppConfig(output_dir=cfg.out_dir)) as container:
            code = action(cfg, container)
    except BlowUpError as e:
        logger.error(f"Numerical blow-up: {e}")
        err_console.print(f"Error: numerical blow-up: {e}", style="red", markup=False, soft_wrap=True)
        code = EXIT_BLOWUP
    except FlowDegeneracyError as e:
        err_console.print(f"Error: flow degeneracy: {e}", style="red", markup=False, soft_wrap=True)
        code = EXIT_DEGENERATE
    except (EPDiffError, FileNotFoundError, ValidationError) as e:
        err_console.print(f"Error: {e}", style="red", markup=False, soft_wrap=True)
        code = EXIT_CONFIG
    ctx.exit(code)


def run_options(func: Callable) -> Callable:
    """Flags shared by all commands; every default is None so the file wins when unset"""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                     help="key=value configuration file"),
        click.option("--d", "d", type=int, default=None, help="Spatial dimension (1-3)"),
        click.option("--m", "m", type=int, default=None, help="Order of (1 - Delta)^m"),
        click.option("--R", "R", type=int, default=None, help="Solver cutoff"),
        click.option("--R-ref", "R_ref", type=int, default=None, help="Reference cutoff"),
        click.option("--s", "s", type=float, default=None, help="Regularity of random v0"),
        click.option("--s-list", "s_list", type=str, default=None, help="Comma-separated s values"),
        click.option("--R-list", "R_list", type=str, default=None, help="Comma-separated cutoffs"),
        click.option("--steps", "nsteps", type=int, default=None, help="Fixed RK steps on [0, 1]"),
        click.option("--tableau", "tableau", type=str, default=None, help="dopri5 or rk4"),
        click.option("--seed", "seed", type=str, default=None, help="RNG seed, or 'none'"),
        click.option("--eps", "eps", type=float, default=None, help="Tail exponent of random v0"),
        click.option("--r-inner", "r_inner", type=str, default=None,
                     help="Inner cutoff of the initial data (integer or 'log2')"),
        click.option("--N-flow", "N_flow", type=int, default=None, help="Particle grid size"),
        click.option("--in", "in_path", type=str, default=None, help="Initial field CSV"),
        click.option("--out-dir", "out_dir", type=str, default=None, help="Output directory"),
        click.option("--literal-real-draw", "literal_real_draw", is_flag=True, default=False,
                     help="Draw random coefficients from the real interval"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


@click.group()
@click.version_option(__version__, prog_name="epdiff")
@click.option("--verbose", is_flag=True, help="Debug logging")
@click.option("--quiet", is_flag=True, help="Warnings and errors only")
def cli(verbose: bool, quiet: bool) -> None:
    """Bandlimited EPDiff geodesics on the flat torus"""
    setup_logging(verbose, quiet)


@cli.command()
@run_options
@click.pass_context
def solve(ctx: click.Context, config_path: Optional[str], **flags: Any) -> None:
    """Integrate one geodesic from random or file initial data"""
    _run(ctx, "solve", config_path, flags, cmd_solve)


@cli.command()
@run_options
@click.pass_context
def converge(ctx: click.Context, config_path: Optional[str], **flags: Any) -> None:
    """Discretization error against a reference cutoff, with fitted rates"""
    _run(ctx, "converge", config_path, flags, cmd_converge)


@cli.command()
@run_options
@click.pass_context
def diagnose(ctx: click.Context, config_path: Optional[str], **flags: Any) -> None:
    """Energy and momentum transport diagnostics with the flow map"""
    _run(ctx, "diagnose", config_path, flags, cmd_diagnose)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point returning the exit code instead of exiting"""
    try:
        result = cli.main(args=argv, prog_name="epdiff", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_CONFIG
    except click.Abort:
        return EXIT_CONFIG
    return result if isinstance(result, int) else EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
