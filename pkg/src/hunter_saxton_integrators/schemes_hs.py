"""
Hunter-Saxton solvers on the truncated half-line [-L, L].

Two explicit multi-symplectic box schemes (leapfrog in time) and two implicit
schemes preserving a discrete Hamiltonian. Every scheme keeps u^0 = 0 and uses
the ghost rule from ``h1_ghost_rule`` on the right.
"""

from dataclasses import dataclass, replace

import numpy as np
import scipy.linalg

from .errors import NonFiniteError, SingularSystemError, ValidationError
from .grid import (
    GHOST_WIDTH,
    Field,
    GhostRule,
    Grid1D,
    Stencil,
    even_rule,
    h1_ghost_rule,
    stencil,
    trapz_doubleprime,
)
from .logs import get_logger
from .pinv import alternating_mean
from .solver import SolveConfig, SolveMethod, SolveReport, solve
from .waves import hs_exact

logger = get_logger(__name__)

NODES = slice(GHOST_WIDTH, -GHOST_WIDTH)


@dataclass(frozen=True, eq=False)
class HsState:
    """
    Solution of the half-line problem at one time level.

    ``v`` is carried by the first box scheme, ``alpha`` and ``P`` by the
    second. ``previous`` holds level i - 1 for the leapfrog schemes and is
    None right after the start. ``report`` is the solver report of the step
    that produced the state, for implicit schemes.
    """

    grid: Grid1D
    t: float
    u: np.ndarray
    v: np.ndarray | None = None
    alpha: np.ndarray | None = None
    P: np.ndarray | None = None
    previous: "HsState | None" = None
    step: int = 0
    report: SolveReport | None = None

    def __post_init__(self):
        if self.grid.periodic:
            raise ValidationError("HsState lives on a half-line grid")
        for name in ("u", "v", "alpha", "P"):
            values = getattr(self, name)
            if values is None:
                continue
            values = np.asarray(values, dtype=np.float64)
            if values.shape != (self.grid.size,):
                raise ValidationError(f"{name} has shape {values.shape}")
            if not np.all(np.isfinite(values)):
                raise NonFiniteError(
                    f"{name} became non-finite at t={self.t:g}", t=self.t, step=self.step
                )
            object.__setattr__(self, name, values)


def _derivative(values: np.ndarray, grid: Grid1D, kind: Stencil, rule: GhostRule):
    return stencil(rule.apply(values), grid.dx, kind, periodic=False)[NODES]


def centered_difference(u: np.ndarray, grid: Grid1D) -> np.ndarray:
    """v = delta_x u at n = 0..N with the half-line ghosts; v^0 = v^N = 0."""
    return _derivative(u, grid, Stencil.CENTERED, h1_ghost_rule(grid))


def cumulative_inverse_difference(w: np.ndarray, dx: float) -> np.ndarray:
    """
    Discrete inverse of the centered difference on the half-line.

    Returns s with s^0 = s^1 = 0, s^{2m} = 2dx (w^1 + w^3 + ... + w^{2m-1})
    and s^{2m+1} = 2dx (w^2 + w^4 + ... + w^{2m}), so that
    (s^{n+1} - s^{n-1}) / (2dx) = w^n for n = 1..N-1.
    """
    w = np.asarray(w, dtype=np.float64)
    s = np.zeros_like(w)
    even = s[2::2]
    odd = s[3::2]
    even[:] = np.cumsum(2 * dx * w[1::2])[: even.size]
    odd[:] = np.cumsum(2 * dx * w[2::2])[: odd.size]
    return s


def solve_pressure(alpha: np.ndarray, grid: Grid1D) -> np.ndarray:
    """
    Solve -delta_x^2 P = alpha / 2 with the wide second difference.

    Row m reads P^{m+2} - 2P^m + P^{m-2} = -2 dx^2 alpha^m for m = 0..N-1.
    Mirror ghosts P^{-1} = P^1 and P^{-2} = P^2 make the discrete P_x vanish
    at n = 0 and both parity chains start at zero, so each chain is a double
    cumulative sum of its right-hand sides. Returns P^0..P^{N+1}.
    """
    N = grid.N
    rhs = -2 * grid.dx**2 * np.asarray(alpha, dtype=np.float64)[:N]
    P = np.zeros(N + 2)
    even = P[2::2]
    odd = P[3::2]
    # On the even chain the mirror ghost halves the first increment.
    increments = rhs[0::2].copy()
    increments[0] *= 0.5
    even[:] = np.cumsum(np.cumsum(increments))[: even.size]
    odd[:] = np.cumsum(np.cumsum(rhs[1::2]))[: odd.size]
    if not np.all(np.isfinite(P)):
        raise SingularSystemError("pressure recursion overflowed")
    return P


def hs_initial_state(grid: Grid1D, t: float = 0.0) -> HsState:
    """
    Sample the exact weak solution and derive v, alpha and P from it.
    """
    u = hs_exact(grid.x, t)
    u[0] = 0.0
    v = centered_difference(u, grid)
    alpha = v**2
    P = solve_pressure(alpha, grid)[: grid.size]
    return HsState(grid, t, u, v=v, alpha=alpha, P=P)


def _advance(state: HsState, dt: float, **fields) -> HsState:
    return HsState(
        state.grid,
        state.t + dt,
        previous=replace(state, previous=None),
        step=state.step + 1,
        **fields,
    )


def eb1_step(state: HsState, dt: float) -> HsState:
    """
    One step of the first box scheme.

    v^{i+1} = v^{i-1} + 2dt (v^2/2 - delta_x(u v)) at n = 1..N-1 with
    v^0 = v^N = 0, then u is rebuilt from v through the centered-difference
    recursion seeded with u^0 = u^1 = 0. Without a previous level the step is
    forward Euler.
    """
    grid = state.grid
    dx = grid.dx
    u = state.u
    v = state.v if state.v is not None else centered_difference(u, grid)
    uv = u * v
    rhs = np.zeros_like(v)
    rhs[1:-1] = 0.5 * v[1:-1] ** 2 - (uv[2:] - uv[:-2]) / (2 * dx)
    if state.previous is None:
        v_new = v + dt * rhs
    else:
        v_new = state.previous.v + 2 * dt * rhs
    v_new[0] = v_new[-1] = 0.0
    u_new = cumulative_inverse_difference(v_new, dx)
    return _advance(state, dt, u=u_new, v=v_new)


def eb2_step(state: HsState, dt: float) -> HsState:
    """
    One step of the second box scheme on (u, alpha, P).

    alpha is transported by delta_t alpha + delta_x(u alpha) = 0 at n = 0..N
    with mirror ghosts; P solves the wide elliptic problem; u follows
    delta_t u + delta_x(u^2)/2 + delta_x P = 0 at n = 1..N.
    """
    grid = state.grid
    dx = grid.dx
    u = state.u
    alpha = state.alpha if state.alpha is not None else centered_difference(u, grid) ** 2

    dalpha = -_derivative(u * alpha, grid, Stencil.CENTERED, even_rule(grid))
    pressure = solve_pressure(alpha, grid)
    # delta_x P at n = 1..N
    dP = (pressure[2:] - pressure[:-2]) / (2 * dx)
    du = np.zeros_like(u)
    du[1:] = -0.5 * _derivative(u**2, grid, Stencil.CENTERED, h1_ghost_rule(grid))[1:]
    du[1:] -= dP

    if state.previous is None:
        alpha_new = alpha + dt * dalpha
        u_new = u + dt * du
    else:
        alpha_new = state.previous.alpha + 2 * dt * dalpha
        u_new = state.previous.u + 2 * dt * du
    u_new[0] = 0.0
    P_new = solve_pressure(alpha_new, grid)[: grid.size]
    return _advance(state, dt, u=u_new, alpha=alpha_new, P=P_new)


def _narrow_second_matrix(grid: Grid1D) -> np.ndarray:
    """Banded (1, 1) storage of delta~_x^2 on u^1..u^N with u^0 = 0, u^{N+1} = u^{N-1}."""
    N = grid.N
    scale = 1 / grid.dx**2
    banded = np.zeros((3, N))
    banded[0, 1:] = scale
    banded[1, :] = -2 * scale
    banded[2, :-1] = scale
    banded[2, N - 2] = 2 * scale
    return banded


def h1_residual(x: np.ndarray, u_old: np.ndarray, grid: Grid1D, dt: float) -> np.ndarray:
    """
    H1-preserving scheme written for the unknowns u^1..u^N of the new level.

    Returns, at n = 1..N,
    delta~^2 (u_new - u_old) + dt [(delta~^2 ub)(delta ub) + delta(ub delta~^2 ub)]
    with ub the midpoint average.
    """
    rule = h1_ghost_rule(grid)
    dx = grid.dx
    u_new = np.concatenate(([0.0], x))
    ubar = rule.apply(0.5 * (u_old + u_new))
    d2 = stencil(ubar, dx, Stencil.NARROW_SECOND, periodic=False)
    d1 = stencil(ubar, dx, Stencil.CENTERED, periodic=False)
    transport = stencil(ubar * d2, dx, Stencil.CENTERED, periodic=False)
    change = stencil(rule.apply(u_new - u_old), dx, Stencil.NARROW_SECOND, periodic=False)
    rows = slice(GHOST_WIDTH + 1, GHOST_WIDTH + grid.N + 1)
    return change[rows] + dt * (d2[rows] * d1[rows] + transport[rows])


def h1_step(state: HsState, dt: float, cfg: SolveConfig | None = None) -> HsState:
    """
    One step of the implicit H1-preserving scheme.

    Newton works on ``h1_residual`` directly; the fixed-point iteration uses
    the same residual premultiplied by the inverse of the half-line
    delta~_x^2, which turns it into x - Phi(x) form.
    """
    cfg = cfg or SolveConfig()
    grid = state.grid
    u_old = state.u

    def residual(x):
        return h1_residual(x, u_old, grid, dt)

    if cfg.method is SolveMethod.FIXED_POINT:
        banded = _narrow_second_matrix(grid)

        def preconditioned(x):
            return scipy.linalg.solve_banded((1, 1), banded, residual(x))

        x, report = solve(preconditioned, u_old[1:], cfg)
    else:
        x, report = solve(residual, u_old[1:], cfg)
    u_new = np.concatenate(([0.0], x))
    return replace(_advance(state, dt, u=u_new), previous=None, report=report)


def h2_residual(x: np.ndarray, u_old: np.ndarray, grid: Grid1D, dt: float) -> np.ndarray:
    """
    H2-preserving scheme at n = 1..N:
    (u_new - u_old) + dt [ub vb - delta_x^{-1}((v_new^2 + v_old^2)/4)].
    """
    u_new = np.concatenate(([0.0], x))
    v_old = centered_difference(u_old, grid)
    v_new = centered_difference(u_new, grid)
    ubar = 0.5 * (u_old + u_new)
    vbar = 0.5 * (v_old + v_new)
    source = cumulative_inverse_difference((v_new**2 + v_old**2) / 4, grid.dx)
    return ((u_new - u_old) + dt * (ubar * vbar - source))[1:]


def h2_step(state: HsState, dt: float, cfg: SolveConfig | None = None) -> HsState:
    """One step of the implicit H2-preserving scheme."""
    cfg = cfg or SolveConfig()
    grid = state.grid
    u_old = state.u
    x, report = solve(lambda x: h2_residual(x, u_old, grid, dt), u_old[1:], cfg)
    u_new = np.concatenate(([0.0], x))
    return replace(_advance(state, dt, u=u_new), previous=None, report=report)


def hs_invariants(state: HsState, rule: GhostRule | None = None) -> tuple[float, float]:
    """
    Discrete Hamiltonians (H1d, H2d).

    H1d = sum'' ((delta+ u)^2 + (delta- u)^2) / 4 dx and
    H2d = sum'' u (delta u)^2 / 2 dx, with ghosts from ``rule`` (the
    half-line rule by default).
    """
    grid = state.grid
    rule = rule or h1_ghost_rule(grid)
    forward = _derivative(state.u, grid, Stencil.FORWARD, rule)
    backward = _derivative(state.u, grid, Stencil.BACKWARD, rule)
    centered = _derivative(state.u, grid, Stencil.CENTERED, rule)
    h1 = trapz_doubleprime(Field(grid, (forward**2 + backward**2) / 4))
    h2 = trapz_doubleprime(Field(grid, state.u * centered**2 / 2))
    return h1, h2


def h2_balance_residual(before: HsState, after: HsState, dt: float) -> float:
    """
    Residual of the discrete H2 balance law across one step.

    (H2d' - H2d)/dt minus the boundary flux
    (delta_t u^{N-1})(delta_t u^N)/2 + ub^{N-1} vb^{N-1} (delta_t u^N)/2.
    """
    grid = before.grid
    N = grid.N
    _, h2_before = hs_invariants(before)
    _, h2_after = hs_invariants(after)
    rate = (after.u - before.u) / dt
    ubar = 0.5 * (before.u + after.u)
    vbar = 0.5 * (centered_difference(before.u, grid) + centered_difference(after.u, grid))
    flux = 0.5 * rate[N - 1] * rate[N] + 0.5 * ubar[N - 1] * vbar[N - 1] * rate[N]
    return (h2_after - h2_before) / dt - flux


def checkerboard_amplitude(state: HsState) -> float:
    """Magnitude of the alternating mode of delta_x u."""
    return abs(alternating_mean(centered_difference(state.u, state.grid)))
