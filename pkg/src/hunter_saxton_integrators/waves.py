"""
Reference solutions: the exact weak HS solution, periodic travelling waves of
the modified and two-component systems, and the integration constants of the
periodic modified system.
"""

import functools
from dataclasses import dataclass, replace
from enum import StrEnum

import numpy as np
from scipy.integrate import cumulative_trapezoid, solve_ivp
from scipy.interpolate import CubicSpline

from .errors import ParameterOrderError, PeriodNotFoundError, ValidationError
from .grid import Field, Grid1D, GridKind, Stencil, stencil
from .logs import get_logger

logger = get_logger(__name__)

# Tolerances of the travelling-wave ODE integration.
ODE_RTOL = 1e-11
ODE_ATOL = 1e-11
# The orbit must close within this multiple of the amplitude (M - m or Z - z).
PERIOD_BUDGET_FACTOR = 100.0


class WaveSystem(StrEnum):
    MHS = "mhs"
    HS2 = "hs2"


def hs_exact(x, t: float):
    """
    Exact weak solution of the HS equation.

    Args:
        x: Position or array of positions.
        t: Time, t >= 0.

    Returns:
        0 for x <= 0, x / (t/2 + 1) for 0 < x < (t/2 + 1)^2 and t/2 + 1 beyond.
    """
    if t < 0:
        raise ValidationError(f"t must be non-negative, got {t}")
    x = np.asarray(x, dtype=np.float64)
    s = 0.5 * t + 1
    value = np.select([x <= 0, x < s**2], [0.0, x / s], default=s)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True)
class WaveSpec:
    """
    Travelling-wave parameters.

    mhs uses (omega, m, M, c) with omega > 0 and m < M < c. hs2 uses
    (b, z, Z, c, kappa) with b > 0, z < Z < c and kappa = 1. ``L_per`` is
    filled in by ``generate_wave``.
    """

    system: WaveSystem
    c: float
    omega: float | None = None
    m: float | None = None
    M: float | None = None
    b: float | None = None
    z: float | None = None
    Z: float | None = None
    kappa: int = 1
    L_per: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "system", WaveSystem(self.system))
        if self.system is WaveSystem.MHS:
            if None in (self.omega, self.m, self.M):
                raise ValidationError("mhs waves need omega, m and M")
            if not self.omega > 0:
                raise ParameterOrderError(f"omega must be positive, got {self.omega}")
            if not self.m < self.M < self.c:
                raise ParameterOrderError(
                    f"mhs waves need m < M < c, got m={self.m}, M={self.M}, c={self.c}"
                )
        else:
            if None in (self.b, self.z, self.Z):
                raise ValidationError("hs2 waves need b, z and Z")
            if not self.b > 0:
                raise ParameterOrderError(f"b must be positive, got {self.b}")
            if not self.z < self.Z < self.c:
                raise ParameterOrderError(
                    f"hs2 waves need z < Z < c, got z={self.z}, Z={self.Z}, c={self.c}"
                )
            if self.kappa not in (-1, 1):
                raise ValidationError(f"kappa must be -1 or 1, got {self.kappa}")
            if self.kappa == -1:
                raise ValidationError("travelling waves are only generated for kappa = 1")

    @classmethod
    def mhs(cls, omega: float, m: float, M: float, c: float) -> "WaveSpec":
        return cls(WaveSystem.MHS, c=c, omega=omega, m=m, M=M)

    @classmethod
    def hs2(cls, b: float, z: float, Z: float, c: float, kappa: int = 1) -> "WaveSpec":
        return cls(WaveSystem.HS2, c=c, b=b, z=z, Z=Z, kappa=kappa)

    @property
    def lower(self) -> float:
        return self.m if self.system is WaveSystem.MHS else self.z

    @property
    def upper(self) -> float:
        return self.M if self.system is WaveSystem.MHS else self.Z

    @property
    def a(self) -> float:
        """Amplitude constant of the density profile, sqrt(b (c - z)(c - Z))."""
        if self.system is not WaveSystem.HS2:
            raise ValidationError("a is only defined for hs2 waves")
        return float(np.sqrt(self.b * (self.c - self.z) * (self.c - self.Z)))

    def potential(self, phi):
        """F(phi), with (phi')^2 = F(phi) along the wave."""
        g = (self.upper - phi) * (phi - self.lower)
        if self.system is WaveSystem.MHS:
            return 2 * self.omega * g / (self.c - phi)
        return self.b * g / (self.c - phi) ** 2

    def potential_derivative(self, phi):
        """F'(phi)."""
        g = (self.upper - phi) * (phi - self.lower)
        dg = -2 * phi + self.upper + self.lower
        if self.system is WaveSystem.MHS:
            return 2 * self.omega * (dg * (self.c - phi) + g) / (self.c - phi) ** 2
        return self.b * (dg * (self.c - phi) + 2 * g) / (self.c - phi) ** 3


@dataclass(frozen=True, eq=False)
class Wave:
    """
    A travelling wave sampled on a periodic grid over one period.

    ``phi_max`` and ``half_period`` come from the located turning point, not
    from the samples.
    """

    spec: WaveSpec
    grid: Grid1D
    phi: Field
    dphi: Field
    psi: Field | None
    period: float
    half_period: float
    phi_max: float

    @property
    def amplitude(self) -> float:
        return float(np.ptp(self.phi.values))


@dataclass(frozen=True)
class IntegrationConstants:
    a: float
    h: float


def _turning_point(spec: WaveSpec, y0, t_max: float, direction: int):
    def rhs(_, y):
        return [y[1], 0.5 * spec.potential_derivative(y[0])]

    def slope_zero(_, y):
        return y[1]

    slope_zero.terminal = True
    slope_zero.direction = direction

    sol = solve_ivp(
        rhs,
        (0.0, t_max),
        y0,
        method="DOP853",
        rtol=ODE_RTOL,
        atol=ODE_ATOL,
        events=slope_zero,
        dense_output=True,
    )
    if sol.status != 1 or not len(sol.t_events[0]):
        raise PeriodNotFoundError(
            f"no turning point within {t_max:g} for {spec} ({sol.message})"
        )
    return sol, float(sol.t_events[0][0]), sol.y_events[0][0]


@functools.lru_cache(maxsize=32)
def generate_wave(spec: WaveSpec, N: int) -> Wave:
    """
    Integrate one period of a travelling wave and sample it on N nodes.

    The regularised ODE phi'' = F'(phi)/2 is integrated from phi = lower,
    phi' = 0 up to the maximum and then back down to the next minimum, each
    leg ending on a located zero of phi'. The period is the sum of both legs.

    Args:
        spec: Wave parameters; ``spec.L_per`` is ignored.
        N: Number of periodic grid nodes.

    Returns:
        Wave with read-only sample arrays and ``spec.L_per`` filled in.

    Raises:
        PeriodNotFoundError: a leg exceeded the length budget.
    """
    spec = replace(spec, L_per=None)
    budget = PERIOD_BUDGET_FACTOR * (spec.upper - spec.lower)
    rising, t_rise, top = _turning_point(spec, [spec.lower, 0.0], budget, direction=-1)
    falling, t_fall, _ = _turning_point(spec, top, budget, direction=1)
    period = t_rise + t_fall

    grid = Grid1D(GridKind.PERIODIC, period, int(N))
    x = grid.x
    samples = np.empty((2, x.size))
    up = x <= t_rise
    samples[:, up] = rising.sol(x[up])
    samples[:, ~up] = falling.sol(x[~up] - t_rise)
    # x_0 = 0 is the starting minimum.
    samples[:, 0] = (spec.lower, 0.0)
    samples.setflags(write=False)

    psi = None
    if spec.system is WaveSystem.HS2:
        psi_values = spec.a / (spec.c - samples[0])
        psi_values.setflags(write=False)
        psi = Field(grid, psi_values)

    spec = replace(spec, L_per=period)
    logger.info(f"Generated {spec.system} wave with period {period:.10f} on N={N}")
    return Wave(
        spec=spec,
        grid=grid,
        phi=Field(grid, samples[0]),
        dphi=Field(grid, samples[1]),
        psi=psi,
        period=period,
        half_period=t_rise,
        phi_max=float(top[0]),
    )


@functools.lru_cache(maxsize=32)
def _periodic_spline(wave: Wave, component: str) -> CubicSpline:
    values = wave.phi.values if component == "phi" else wave.psi.values
    knots = np.append(wave.grid.x, wave.period)
    return CubicSpline(knots, np.append(values, values[0]), bc_type="periodic")


def exact_shifted(spec: WaveSpec, wave: Wave, t: float, x, component: str = "phi"):
    """
    Travelling-wave profile phi((x - c t) mod L_per) by periodic cubic interpolation.

    ``component="psi"`` returns the density profile of an hs2 wave.
    """
    if component not in ("phi", "psi"):
        raise ValidationError(f"unknown wave component {component!r}")
    if component == "psi" and wave.psi is None:
        raise ValidationError("only hs2 waves carry a psi profile")
    xi = np.mod(np.asarray(x, dtype=np.float64) - spec.c * t, wave.period)
    value = _periodic_spline(wave, component)(xi)
    return float(value) if np.ndim(value) == 0 else value


def mean_constant_h(f: Field) -> float:
    """
    Integration constant h = (1/L) * integral of f over one period.

    On a uniform periodic grid this is the arithmetic mean of the samples.
    """
    if not f.grid.periodic:
        raise ValidationError("mean_constant_h needs a periodic field")
    return float(np.mean(f.values))


def _periodic_antiderivative(values: np.ndarray, dx: float) -> np.ndarray:
    return cumulative_trapezoid(values, dx=dx, initial=0.0)


def mhs_integration_constants(u: Field, omega: float) -> IntegrationConstants:
    """
    Integration constants a(t), h(t) of the periodic modified equation.

    a = -(1/L) * integral(u_x^2/2 + 2 omega u), the unique value making the
    rank -1 equation periodic. h is the mean of the rank 0 flux
    f(u) = u u_x - antiderivative(u_x^2/2 + 2 omega u + a), taken from x = 0.
    """
    if not u.grid.periodic:
        raise ValidationError("integration constants need a periodic field")
    dx = u.grid.dx
    ux = stencil(u.values, dx, Stencil.CENTERED, periodic=True)
    source = 0.5 * ux**2 + 2 * omega * u.values
    a = -float(np.mean(source))
    flux = u.values * ux - _periodic_antiderivative(source + a, dx)
    return IntegrationConstants(a=a, h=mean_constant_h(Field(u.grid, flux)))
