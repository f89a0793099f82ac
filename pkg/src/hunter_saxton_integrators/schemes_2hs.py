"""
Periodic solvers for the two-component Hunter-Saxton system in (u, rho).
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import NonFiniteError, ValidationError
from .grid import Grid1D, Stencil, stencil
from .logs import get_logger
from .pinv import CirculantPinv, resolve_pinv
from .solver import SolveConfig, SolveReport, solve
from .waves import Wave, WaveSystem

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class Hs2State:
    grid: Grid1D
    t: float
    u: np.ndarray
    rho: np.ndarray
    kappa: int = 1
    previous: "Hs2State | None" = None
    step: int = 0
    report: SolveReport | None = None

    def __post_init__(self):
        if not self.grid.periodic:
            raise ValidationError("Hs2State lives on a periodic grid")
        if self.kappa not in (-1, 1):
            raise ValidationError(f"kappa must be -1 or 1, got {self.kappa}")
        for name in ("u", "rho"):
            values = np.asarray(getattr(self, name), dtype=np.float64)
            if values.shape != (self.grid.size,):
                raise ValidationError(f"{name} has shape {values.shape}")
            if not np.all(np.isfinite(values)):
                raise NonFiniteError(
                    f"{name} became non-finite at t={self.t:g}", t=self.t, step=self.step
                )
            object.__setattr__(self, name, values)


def _d(values, grid: Grid1D, kind: Stencil):
    return stencil(values, grid.dx, kind, periodic=True)


def hs2_initial_state(wave: Wave, kappa: int = 1) -> Hs2State:
    """Start from the sampled travelling wave: u = phi, rho = psi."""
    if wave.spec.system is not WaveSystem.HS2:
        raise ValidationError(f"expected an hs2 wave, got {wave.spec.system}")
    return Hs2State(
        wave.grid, 0.0, np.array(wave.phi.values), np.array(wave.psi.values), kappa
    )


def hs2_ms_rates(
    u: np.ndarray, rho: np.ndarray, grid: Grid1D, kappa: int, pinv: CirculantPinv
) -> tuple[np.ndarray, np.ndarray]:
    """Right-hand sides of the explicit scheme for u and rho."""
    ux = _d(u, grid, Stencil.CENTERED)
    forcing = (
        0.5 * _d(ux**2, grid, Stencil.CENTERED)
        - _d(u * ux, grid, Stencil.WIDE_SECOND)
        + 0.5 * kappa * _d(rho**2, grid, Stencil.CENTERED)
    )
    return pinv.apply(forcing), -_d(u * rho, grid, Stencil.CENTERED)


def hs2_ms_step(
    state: Hs2State, dt: float, pinv: CirculantPinv | None = None
) -> Hs2State:
    """
    One leapfrog step of the multi-symplectic scheme.

    The first step, without a previous level, is forward Euler.
    """
    grid = state.grid
    pinv = resolve_pinv(pinv, grid, Stencil.WIDE_SECOND)
    du, drho = hs2_ms_rates(state.u, state.rho, grid, state.kappa, pinv)
    if state.previous is None:
        u_new = state.u + dt * du
        rho_new = state.rho + dt * drho
    else:
        u_new = state.previous.u + 2 * dt * du
        rho_new = state.previous.rho + 2 * dt * drho
    return Hs2State(
        grid,
        state.t + dt,
        u_new,
        rho_new,
        state.kappa,
        previous=replace(state, previous=None),
        step=state.step + 1,
    )


def hs2_h1_residual(
    x: np.ndarray,
    u_old: np.ndarray,
    rho_old: np.ndarray,
    grid: Grid1D,
    kappa: int,
    dt: float,
    pinv: CirculantPinv,
) -> np.ndarray:
    """
    Stacked residual of the implicit scheme for x = (u_new, rho_new).

    The coupling term kappa rb (delta_x rb) is a product of midpoint averages.
    """
    N = grid.N
    u_new, rho_new = x[:N], x[N:]
    ubar = 0.5 * (u_old + u_new)
    rbar = 0.5 * (rho_old + rho_new)
    d2 = _d(ubar, grid, Stencil.NARROW_SECOND)
    d1 = _d(ubar, grid, Stencil.CENTERED)
    forcing = (
        d2 * d1
        + _d(ubar * d2, grid, Stencil.CENTERED)
        - kappa * rbar * _d(rbar, grid, Stencil.CENTERED)
    )
    return np.concatenate(
        (
            u_new - u_old + dt * pinv.apply(forcing),
            rho_new - rho_old + dt * _d(ubar * rbar, grid, Stencil.CENTERED),
        )
    )


def hs2_h1_step(
    state: Hs2State,
    dt: float,
    pinv: CirculantPinv | None = None,
    cfg: SolveConfig | None = None,
) -> Hs2State:
    """One step of the implicit H1-preserving scheme, solved as one coupled system."""
    grid = state.grid
    pinv = resolve_pinv(pinv, grid, Stencil.NARROW_SECOND)
    u_old, rho_old = state.u, state.rho
    x, report = solve(
        lambda x: hs2_h1_residual(x, u_old, rho_old, grid, state.kappa, dt, pinv),
        np.concatenate((u_old, rho_old)),
        cfg,
    )
    N = grid.N
    return Hs2State(
        grid,
        state.t + dt,
        x[:N],
        x[N:],
        state.kappa,
        step=state.step + 1,
        report=report,
    )


def hs2_invariants(state: Hs2State) -> tuple[float, float]:
    """
    H1d = sum dx ((delta+ u)^2 + kappa rho^2) / 2 and
    H2d = sum dx (kappa u rho^2 + u (delta+ u)^2) / 2.
    """
    dx = state.grid.dx
    u, rho, kappa = state.u, state.rho, state.kappa
    forward = _d(u, state.grid, Stencil.FORWARD)
    h1 = dx * float(np.sum(forward**2 + kappa * rho**2)) / 2
    h2 = dx * float(np.sum(kappa * u * rho**2 + u * forward**2)) / 2
    return h1, h2


def rho_mass(state: Hs2State) -> float:
    """Total density sum rho^n dx."""
    return state.grid.dx * float(np.sum(state.rho))
