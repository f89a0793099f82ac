"""
Run orchestration: initial data, time stepping, invariant recording and the
CSV/manifest outputs of a run.
"""

from collections.abc import Callable
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import pandas as pd

from .config import Problem, RunConfig, Scheme, write_manifest
from .errors import IntegratorError, SimulationFailed, ValidationError
from .grid import Stencil, build_grid
from .logs import get_logger
from .metrics import STEP_COUNT
from .pinv import alternating_mean, build_pinv
from .schemes_2hs import (
    hs2_h1_step,
    hs2_initial_state,
    hs2_invariants,
    hs2_ms_step,
    rho_mass,
)
from .schemes_hs import (
    centered_difference,
    checkerboard_amplitude,
    eb1_step,
    eb2_step,
    h1_step,
    h2_balance_residual,
    h2_step,
    hs_initial_state,
    hs_invariants,
)
from .schemes_mhs import (
    mhs_h1_step,
    mhs_initial_state,
    mhs_invariants,
    mhs_ms_step,
    mhs_state_constants,
)
from .waves import Wave, exact_shifted, generate_wave, hs_exact

logger = get_logger(__name__)

INVARIANT_COLUMNS = ["t", "H1", "H2", "mean_u"]

CSV_OPTIONS = {"index": False, "float_format": "%.17g", "lineterminator": "\n"}

MANIFEST = "manifest.txt"


@dataclass
class InvariantSeries:
    """Per-step record of the discrete Hamiltonians and auxiliary diagnostics."""

    rows: list[dict] = field(default_factory=list)

    def append(self, t: float, H1: float, H2: float, mean_u: float, **diagnostics):
        if self.rows and not t > self.rows[-1]["t"]:
            raise ValueError(f"time {t} does not increase past {self.rows[-1]['t']}")
        self.rows.append({"t": t, "H1": H1, "H2": H2, "mean_u": mean_u, **diagnostics})

    def __len__(self):
        return len(self.rows)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows)

    def invariants(self) -> pd.DataFrame:
        return self.to_frame().reindex(columns=INVARIANT_COLUMNS)

    def diagnostics(self) -> pd.DataFrame:
        frame = self.to_frame()
        extra = [column for column in frame.columns if column not in INVARIANT_COLUMNS]
        return frame[["t", *extra]]


@dataclass
class Snapshot:
    t: float
    step: int
    profile: pd.DataFrame


@dataclass
class RunResult:
    config: RunConfig
    state: object
    series: InvariantSeries
    snapshots: list[Snapshot]
    wave: Wave | None = None


def _iterations(state) -> int:
    return state.report.iterations if state.report is not None else 0


def _hs_setup(cfg: RunConfig):
    grid = build_grid(cfg.grid_kind, cfg.L, cfg.N)
    solve_cfg = cfg.solve_config()
    steppers = {
        Scheme.EB1: lambda s: eb1_step(s, cfg.dt),
        Scheme.EB2: lambda s: eb2_step(s, cfg.dt),
        Scheme.H1: lambda s: h1_step(s, cfg.dt, solve_cfg),
        Scheme.H2: lambda s: h2_step(s, cfg.dt, solve_cfg),
    }

    def measure(state, before):
        h1, h2 = hs_invariants(state)
        balance = np.nan if before is None else h2_balance_residual(before, state, cfg.dt)
        diagnostics = {
            "alt_amp": checkerboard_amplitude(state),
            "h2_balance": balance,
            "iterations": _iterations(state),
        }
        return h1, h2, float(np.mean(state.u)), diagnostics

    def profile(state):
        x = state.grid.x
        return pd.DataFrame(
            {
                "x": x,
                "u": state.u,
                "ux": centered_difference(state.u, state.grid),
                "u_exact": hs_exact(x, state.t),
            }
        )

    return hs_initial_state(grid), steppers[cfg.scheme], measure, profile, None


def _mhs_setup(cfg: RunConfig):
    spec = cfg.wave_spec()
    wave = generate_wave(spec, cfg.N)
    solve_cfg = cfg.solve_config()
    explicit = cfg.scheme is Scheme.MS
    pinv = build_pinv(
        wave.grid, Stencil.WIDE_SECOND if explicit else Stencil.NARROW_SECOND
    )

    def step(state):
        if explicit:
            return mhs_ms_step(state, cfg.dt, pinv)
        return mhs_h1_step(state, cfg.dt, pinv, solve_cfg)

    def measure(state, before):
        h1, h2 = mhs_invariants(state)
        constants = mhs_state_constants(state)
        diagnostics = {
            "alt_mean": alternating_mean(state.u),
            "a_const": constants.a,
            "h_const": constants.h,
            "iterations": _iterations(state),
        }
        return h1, h2, float(np.mean(state.u)), diagnostics

    def profile(state):
        x = state.grid.x
        return pd.DataFrame(
            {
                "x": x,
                "u": state.u,
                "u_exact": exact_shifted(wave.spec, wave, state.t, x),
            }
        )

    return mhs_initial_state(wave), step, measure, profile, wave


def _hs2_setup(cfg: RunConfig):
    spec = cfg.wave_spec()
    wave = generate_wave(spec, cfg.N)
    solve_cfg = cfg.solve_config()
    explicit = cfg.scheme is Scheme.MS
    pinv = build_pinv(
        wave.grid, Stencil.WIDE_SECOND if explicit else Stencil.NARROW_SECOND
    )

    def step(state):
        if explicit:
            return hs2_ms_step(state, cfg.dt, pinv)
        return hs2_h1_step(state, cfg.dt, pinv, solve_cfg)

    def measure(state, before):
        h1, h2 = hs2_invariants(state)
        diagnostics = {
            "alt_mean": alternating_mean(state.u),
            "mass_rho": rho_mass(state),
            "iterations": _iterations(state),
        }
        return h1, h2, float(np.mean(state.u)), diagnostics

    def profile(state):
        x = state.grid.x
        return pd.DataFrame(
            {
                "x": x,
                "u": state.u,
                "rho": state.rho,
                "u_exact": exact_shifted(wave.spec, wave, state.t, x),
                "rho_exact": exact_shifted(wave.spec, wave, state.t, x, component="psi"),
            }
        )

    return hs2_initial_state(wave, cfg.kappa), step, measure, profile, wave


SETUPS: dict[Problem, Callable] = {
    Problem.HS: _hs_setup,
    Problem.MHS: _mhs_setup,
    Problem.HS2: _hs2_setup,
}


def perturb_initial_state(state, amplitude: float, seed: int):
    """Add seeded Gaussian noise of standard deviation ``amplitude`` to u."""
    rng = np.random.default_rng(seed)
    logger.info(f"Perturbing initial u with amplitude {amplitude:g} from seed {seed}")
    return replace(state, u=state.u + amplitude * rng.standard_normal(state.u.shape))


def run_simulation(cfg: RunConfig, out_dir=None) -> RunResult:
    """
    Run one simulation from t = 0 to ``cfg.tend``.

    Invariants are recorded at every step and profiles at t = 0, every
    ``cfg.record_every`` steps and at the end.

    Args:
        cfg: Validated configuration.
        out_dir: When given, the outputs are written there, including the
            partial outputs of a failed run.

    Returns:
        RunResult with the final state, the invariant series and the snapshots.

    Raises:
        SimulationFailed: stepping from level k failed. ``step`` is k and the
            attached result holds the k + 1 recorded levels.
    """
    n_steps = cfg.n_steps
    if abs(n_steps * cfg.dt - cfg.tend) > 1e-9 * max(1.0, cfg.tend):
        logger.warning(
            f"tend={cfg.tend} is not a multiple of dt={cfg.dt}; "
            f"running {n_steps} steps to t={n_steps * cfg.dt}"
        )
    state, step, measure, profile, wave = SETUPS[cfg.problem](cfg)
    if cfg.perturb:
        state = perturb_initial_state(state, cfg.perturb, cfg.seed)
    logger.info(
        f"Running {cfg.problem}/{cfg.scheme} on N={cfg.N} for {n_steps} steps of dt={cfg.dt}"
    )

    series = InvariantSeries()
    snapshots = []

    def record(current, before):
        h1, h2, mean_u, diagnostics = measure(current, before)
        series.append(current.t, h1, h2, mean_u, **diagnostics)
        logger.debug(f"t={current.t:.6f} H1={h1:.15g} H2={h2:.15g}")

    def snapshot(current):
        snapshots.append(Snapshot(current.t, current.step, profile(current)))

    record(state, None)
    snapshot(state)
    result = RunResult(cfg, state, series, snapshots, wave)
    for k in range(n_steps):
        try:
            new_state = step(state)
        except IntegratorError as e:
            logger.error(f"Step from level {k} (t={state.t:.6f}) failed: {e}")
            result.state = state
            if out_dir is not None:
                write_outputs(result, out_dir)
            raise SimulationFailed(
                f"{cfg.problem}/{cfg.scheme} failed stepping from level {k}: {e}",
                step=k,
                result=result,
            ) from e
        STEP_COUNT.labels(problem=cfg.problem, scheme=cfg.scheme).inc()
        record(new_state, state)
        state = new_state
        done = k + 1
        if done == n_steps or (cfg.record_every and done % cfg.record_every == 0):
            snapshot(state)

    result.state = state
    logger.info(f"Finished {cfg.problem}/{cfg.scheme} at t={state.t:.6f}")
    if out_dir is not None:
        write_outputs(result, out_dir)
    return result


def write_csv(frame: pd.DataFrame, path) -> Path:
    path = Path(path)
    frame.to_csv(path, **CSV_OPTIONS)
    return path


def write_outputs(result: RunResult, out_dir) -> list[Path]:
    """
    Write invariants.csv, diagnostics.csv, one profile file per snapshot and
    manifest.txt.

    Raises:
        ValidationError: ``out_dir`` already holds a manifest from another run.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if (out / MANIFEST).exists():
        raise ValidationError(f"{out} already holds a run; use a distinct directory")
    written = [
        write_csv(result.series.invariants(), out / "invariants.csv"),
        write_csv(result.series.diagnostics(), out / "diagnostics.csv"),
    ]
    for snap in result.snapshots:
        written.append(write_csv(snap.profile, out / f"profile_t{snap.t:.6f}.csv"))
    written.append(write_manifest(result.config, out / MANIFEST))
    logger.info(f"Wrote {len(written)} files to {out}")
    return written
