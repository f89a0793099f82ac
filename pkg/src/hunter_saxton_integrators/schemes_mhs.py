"""
Periodic solvers for the modified Hunter-Saxton equation.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import NonFiniteError, ValidationError
from .grid import Field, Grid1D, Stencil, stencil
from .logs import get_logger
from .pinv import CirculantPinv, resolve_pinv
from .solver import SolveConfig, SolveReport, solve
from .waves import IntegrationConstants, Wave, WaveSystem, mhs_integration_constants

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class MhsState:
    grid: Grid1D
    t: float
    u: np.ndarray
    omega: float
    previous: "MhsState | None" = None
    step: int = 0
    report: SolveReport | None = None

    def __post_init__(self):
        if not self.grid.periodic:
            raise ValidationError("MhsState lives on a periodic grid")
        if not self.omega > 0:
            raise ValidationError(f"omega must be positive, got {self.omega}")
        u = np.asarray(self.u, dtype=np.float64)
        if u.shape != (self.grid.size,):
            raise ValidationError(f"u has shape {u.shape}")
        if not np.all(np.isfinite(u)):
            raise NonFiniteError(
                f"u became non-finite at t={self.t:g}", t=self.t, step=self.step
            )
        object.__setattr__(self, "u", u)


def _d(values, grid: Grid1D, kind: Stencil):
    return stencil(values, grid.dx, kind, periodic=True)


def mhs_initial_state(wave: Wave) -> MhsState:
    """Start from the sampled travelling wave at t = 0."""
    if wave.spec.system is not WaveSystem.MHS:
        raise ValidationError(f"expected an mhs wave, got {wave.spec.system}")
    return MhsState(wave.grid, 0.0, np.array(wave.phi.values), wave.spec.omega)


def mhs_ms_forcing(u: np.ndarray, grid: Grid1D, omega: float) -> np.ndarray:
    """delta_x((delta_x u)^2)/2 - delta_x^2(u delta_x u) + 2 omega delta_x u, wide second difference."""
    ux = _d(u, grid, Stencil.CENTERED)
    return (
        0.5 * _d(ux**2, grid, Stencil.CENTERED)
        - _d(u * ux, grid, Stencil.WIDE_SECOND)
        + 2 * omega * ux
    )


def mhs_ms_step(
    state: MhsState, dt: float, pinv: CirculantPinv | None = None
) -> MhsState:
    """
    One leapfrog step of the multi-symplectic scheme with the wide pseudo-inverse.

    The first step, without a previous level, is forward Euler.
    """
    grid = state.grid
    pinv = resolve_pinv(pinv, grid, Stencil.WIDE_SECOND)
    rate = pinv.apply(mhs_ms_forcing(state.u, grid, state.omega))
    if state.previous is None:
        u_new = state.u + dt * rate
    else:
        u_new = state.previous.u + 2 * dt * rate
    return MhsState(
        grid,
        state.t + dt,
        u_new,
        state.omega,
        previous=replace(state, previous=None),
        step=state.step + 1,
    )


def mhs_h1_residual(
    x: np.ndarray,
    u_old: np.ndarray,
    grid: Grid1D,
    omega: float,
    dt: float,
    pinv: CirculantPinv,
) -> np.ndarray:
    """
    (u_new - u_old) + dt P[(d~2 ub)(d ub) + d(ub d~2 ub) - 2 omega d ub]

    with P the narrow pseudo-inverse and ub the midpoint average.
    """
    ubar = 0.5 * (u_old + x)
    d2 = _d(ubar, grid, Stencil.NARROW_SECOND)
    d1 = _d(ubar, grid, Stencil.CENTERED)
    forcing = d2 * d1 + _d(ubar * d2, grid, Stencil.CENTERED) - 2 * omega * d1
    return x - u_old + dt * pinv.apply(forcing)


def mhs_h1_step(
    state: MhsState,
    dt: float,
    pinv: CirculantPinv | None = None,
    cfg: SolveConfig | None = None,
) -> MhsState:
    """One step of the implicit H1-preserving scheme."""
    grid = state.grid
    pinv = resolve_pinv(pinv, grid, Stencil.NARROW_SECOND)
    u_old = state.u
    x, report = solve(
        lambda x: mhs_h1_residual(x, u_old, grid, state.omega, dt, pinv), u_old, cfg
    )
    return MhsState(grid, state.t + dt, x, state.omega, step=state.step + 1, report=report)


def mhs_invariants(state: MhsState) -> tuple[float, float]:
    """
    H1d = sum dx (delta+ u)^2 / 2 and
    H2d = sum dx (u (delta+ u)^2 + 2 omega u^2) / 2 over one period.
    """
    dx = state.grid.dx
    u = state.u
    forward = _d(u, state.grid, Stencil.FORWARD)
    h1 = dx * float(np.sum(forward**2)) / 2
    h2 = dx * float(np.sum(u * forward**2 + 2 * state.omega * u**2)) / 2
    return h1, h2


def mhs_state_constants(state: MhsState) -> IntegrationConstants:
    """Integration constants a(t), h(t) of the current profile."""
    return mhs_integration_constants(Field(state.grid, state.u), state.omega)
