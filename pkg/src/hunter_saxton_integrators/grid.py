"""
Uniform grids, finite-difference stencils, ghost-point extensions and the
trapezoidal quadrature used by every scheme.

Half-line fields are extended into a buffer carrying two ghost cells on each
side before a stencil is applied; undefined ghosts are stored as NaN so that a
stencil reaching them produces NaN instead of a silently wrong number.
Periodic fields wrap around with ``np.roll``.
"""

from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy.integrate import trapezoid

from .errors import MissingGhostError, NonFiniteError, ValidationError
from .logs import get_logger

logger = get_logger(__name__)

# Ghost cells carried on each side of an extended half-line buffer.
GHOST_WIDTH = 2


class GridKind(StrEnum):
    HALF_LINE = "half_line"
    PERIODIC = "periodic"


class Stencil(StrEnum):
    FORWARD = "forward"
    BACKWARD = "backward"
    CENTERED = "centered"
    NARROW_SECOND = "narrow_second"
    WIDE_SECOND = "wide_second"


@dataclass(frozen=True)
class Grid1D:
    """
    Uniform one-dimensional grid.

    On the truncated half-line the nodes are x_0 = -L, ..., x_N = L. On a
    periodic grid of period L the nodes are x_0 = 0, ..., x_{N-1} and index
    N maps back to 0.
    """

    kind: GridKind
    L: float
    N: int

    def __post_init__(self):
        if self.N < 4:
            raise ValidationError(f"N must be at least 4, got {self.N}")
        if not self.L > 0:
            raise ValidationError(f"L must be positive, got {self.L}")

    @property
    def periodic(self) -> bool:
        return self.kind is GridKind.PERIODIC

    @property
    def dx(self) -> float:
        if self.periodic:
            return self.L / self.N
        return 2 * self.L / self.N

    @property
    def size(self) -> int:
        """Number of stored nodes."""
        return self.N if self.periodic else self.N + 1

    @property
    def x(self) -> np.ndarray:
        n = np.arange(self.size)
        if self.periodic:
            return n * self.dx
        return -self.L + n * self.dx


def build_grid(kind: GridKind | str, L: float, N: int) -> Grid1D:
    """
    Build a grid, validating N >= 4 and L > 0.
    """
    return Grid1D(kind=GridKind(kind), L=float(L), N=int(N))


@dataclass(frozen=True, eq=False)
class Field:
    """
    Real values on the nodes of a grid.
    """

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape != (self.grid.size,):
            raise ValidationError(
                f"field has shape {values.shape}, grid needs ({self.grid.size},)"
            )
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("field contains non-finite values")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True, eq=False)
class GhostedField:
    """
    A half-line field stored with ``GHOST_WIDTH`` ghost cells on each side.

    ``extended[n + GHOST_WIDTH]`` holds u^n for n = -2, ..., N + 2. Undefined
    ghosts are NaN.
    """

    grid: Grid1D
    extended: np.ndarray

    @classmethod
    def from_values(cls, grid: Grid1D, values, left=(), right=()) -> "GhostedField":
        """
        Build an extended field from interior values and explicit ghosts.

        Args:
            grid: Half-line grid.
            values: Interior values u^0..u^N.
            left: Ghost values for indices -1, -2 (in that order); missing ones stay undefined.
            right: Ghost values for indices N+1, N+2.
        """
        interior = Field(grid, values).values
        extended = np.full(grid.size + 2 * GHOST_WIDTH, np.nan)
        extended[GHOST_WIDTH:-GHOST_WIDTH] = interior
        for offset, value in enumerate(left[:GHOST_WIDTH]):
            extended[GHOST_WIDTH - 1 - offset] = value
        for offset, value in enumerate(right[:GHOST_WIDTH]):
            extended[GHOST_WIDTH + grid.size + offset] = value
        return cls(grid, extended)

    @property
    def interior(self) -> np.ndarray:
        return self.extended[GHOST_WIDTH:-GHOST_WIDTH]

    def ghost(self, index: int) -> float:
        return float(self.extended[index + GHOST_WIDTH])


# A ghost entry is (ghost index, ((interior index, weight), ...)).
GhostEntry = tuple[int, tuple[tuple[int, float], ...]]


@dataclass(frozen=True)
class GhostRule:
    """
    Linear boundary extension of a half-line field with N + 1 nodes.

    Each ghost value is a linear combination of interior values. Ghosts the
    rule does not mention stay undefined.
    """

    N: int
    left: tuple[GhostEntry, ...] = ()
    right: tuple[GhostEntry, ...] = ()

    def __post_init__(self):
        for ghost, combination in self.left:
            if not -GHOST_WIDTH <= ghost < 0:
                raise ValidationError(f"left ghost index {ghost} is not in [-2, -1]")
            self._check_combination(ghost, combination)
        for ghost, combination in self.right:
            if not self.N < ghost <= self.N + GHOST_WIDTH:
                raise ValidationError(
                    f"right ghost index {ghost} is not in [{self.N + 1}, {self.N + 2}]"
                )
            self._check_combination(ghost, combination)

    def _check_combination(self, ghost, combination):
        for index, _ in combination:
            if not 0 <= index <= self.N:
                raise ValidationError(
                    f"ghost {ghost} references index {index} outside the interior"
                )

    def apply(self, values: np.ndarray) -> np.ndarray:
        """
        Return the extended buffer (length N + 5) for interior ``values``.

        Works on a trailing axis so a batch of fields can be extended at once.
        """
        values = np.asarray(values, dtype=np.float64)
        shape = values.shape[:-1] + (values.shape[-1] + 2 * GHOST_WIDTH,)
        extended = np.full(shape, np.nan)
        extended[..., GHOST_WIDTH:-GHOST_WIDTH] = values
        for ghost, combination in self.left + self.right:
            extended[..., ghost + GHOST_WIDTH] = sum(
                weight * values[..., index] for index, weight in combination
            )
        return extended


def h1_ghost_rule(grid: Grid1D) -> GhostRule:
    """
    Ghosts u^{-1} = u^1, u^{N+1} = u^{N-1}, u^{N+2} = 2u^N - u^{N-2}.

    Together with u^0 = 0 these encode u(-L) = 0, u_x(-L) = 0, u_x(L) = 0 and
    u_xx(L) = 0. u^{-2} stays undefined.
    """
    N = grid.N
    return GhostRule(
        N=N,
        left=((-1, ((1, 1.0),)),),
        right=(
            (N + 1, ((N - 1, 1.0),)),
            (N + 2, ((N, 2.0), (N - 2, -1.0))),
        ),
    )


def linear_extension_rule(grid: Grid1D) -> GhostRule:
    """Ghosts obtained by extending the boundary secant line."""
    N = grid.N
    return GhostRule(
        N=N,
        left=(
            (-1, ((0, 2.0), (1, -1.0))),
            (-2, ((0, 3.0), (1, -2.0))),
        ),
        right=(
            (N + 1, ((N, 2.0), (N - 1, -1.0))),
            (N + 2, ((N, 3.0), (N - 1, -2.0))),
        ),
    )


def even_rule(grid: Grid1D) -> GhostRule:
    """Mirror ghosts on both sides: u^{-k} = u^k and u^{N+k} = u^{N-k}."""
    N = grid.N
    return GhostRule(
        N=N,
        left=((-1, ((1, 1.0),)), (-2, ((2, 1.0),))),
        right=((N + 1, ((N - 1, 1.0),)), (N + 2, ((N - 2, 1.0),))),
    )


def extend_halfline_ghosts(u: Field, rule: GhostRule) -> GhostedField:
    """
    Fill the ghost slots of a half-line field from a ghost rule.

    Args:
        u: Field on a half-line grid.
        rule: Ghost rule built for the same N.

    Returns:
        GhostedField with the interior untouched.
    """
    if u.grid.periodic:
        raise ValidationError("ghost extension only applies to half-line grids")
    if rule.N != u.grid.N:
        raise ValidationError(f"ghost rule built for N={rule.N}, field has N={u.grid.N}")
    return GhostedField(u.grid, rule.apply(u.values))


def stencil(values: np.ndarray, dx: float, kind: Stencil, periodic: bool) -> np.ndarray:
    """
    Apply a difference stencil along the last axis.

    Periodic arrays wrap around. Non-periodic arrays keep their length; nodes
    whose stencil would leave the array are NaN.
    """
    f = np.asarray(values, dtype=np.float64)
    if periodic:
        right = np.roll(f, -1, axis=-1)
        left = np.roll(f, 1, axis=-1)
        match kind:
            case Stencil.FORWARD:
                return (right - f) / dx
            case Stencil.BACKWARD:
                return (f - left) / dx
            case Stencil.CENTERED:
                return (right - left) / (2 * dx)
            case Stencil.NARROW_SECOND:
                return (right - 2 * f + left) / dx**2
            case Stencil.WIDE_SECOND:
                right2 = np.roll(f, -2, axis=-1)
                left2 = np.roll(f, 2, axis=-1)
                return (right2 - 2 * f + left2) / (4 * dx**2)
        raise ValidationError(f"unknown stencil {kind!r}")

    out = np.full_like(f, np.nan)
    match kind:
        case Stencil.FORWARD:
            out[..., :-1] = (f[..., 1:] - f[..., :-1]) / dx
        case Stencil.BACKWARD:
            out[..., 1:] = (f[..., 1:] - f[..., :-1]) / dx
        case Stencil.CENTERED:
            out[..., 1:-1] = (f[..., 2:] - f[..., :-2]) / (2 * dx)
        case Stencil.NARROW_SECOND:
            out[..., 1:-1] = (f[..., 2:] - 2 * f[..., 1:-1] + f[..., :-2]) / dx**2
        case Stencil.WIDE_SECOND:
            out[..., 2:-2] = (f[..., 4:] - 2 * f[..., 2:-2] + f[..., :-4]) / (
                4 * dx**2
            )
        case _:
            raise ValidationError(f"unknown stencil {kind!r}")
    return out


def apply_difference(f: Field | GhostedField, kind: Stencil | str) -> Field:
    """
    Apply a difference stencil at every node of the grid.

    Periodic fields wrap around. Half-line fields must come with their ghosts;
    a stencil that reaches an undefined ghost raises ``MissingGhostError``.
    """
    kind = Stencil(kind)
    grid = f.grid
    if isinstance(f, GhostedField):
        result = stencil(f.extended, grid.dx, kind, periodic=False)
        result = result[GHOST_WIDTH:-GHOST_WIDTH]
        missing = np.flatnonzero(~np.isfinite(result))
        if missing.size:
            raise MissingGhostError(
                f"{kind} stencil needs undefined ghosts at nodes {missing.tolist()}"
            )
        return Field(grid, result)
    if not grid.periodic:
        raise MissingGhostError(
            "half-line fields need ghost values; use extend_halfline_ghosts first"
        )
    return Field(grid, stencil(f.values, grid.dx, kind, periodic=True))


def trapz_doubleprime(f: Field) -> float:
    """
    Trapezoidal sum with half weights at n = 0 and n = N, times dx.
    """
    if f.grid.periodic:
        raise ValidationError("the double-prime sum is defined on half-line grids")
    return float(trapezoid(f.values, dx=f.grid.dx))


def sbp_residual(f: GhostedField, g: GhostedField) -> float:
    """
    Residual of the summation-by-parts identity.

    Returns

        sum'' f (d+ g) dx + sum'' (d- f) g dx - [ (f^n g^{n+1} + f^{n-1} g^n) / 2 ]_0^N

    which vanishes to rounding. Needs f^{-1} and g^{N+1}.
    """
    grid = f.grid
    dx = grid.dx
    N = grid.N
    fe = f.extended
    ge = g.extended
    if not (np.isfinite(f.ghost(-1)) and np.isfinite(g.ghost(N + 1))):
        raise MissingGhostError("summation by parts needs f^{-1} and g^{N+1}")
    forward_g = stencil(ge, dx, Stencil.FORWARD, periodic=False)
    backward_f = stencil(fe, dx, Stencil.BACKWARD, periodic=False)
    interior = slice(GHOST_WIDTH, GHOST_WIDTH + N + 1)
    lhs = trapz_doubleprime(Field(grid, fe[interior] * forward_g[interior]))
    lhs += trapz_doubleprime(Field(grid, backward_f[interior] * ge[interior]))

    def boundary(n):
        return 0.5 * (f.ghost(n) * g.ghost(n + 1) + f.ghost(n - 1) * g.ghost(n))

    return lhs - (boundary(N) - boundary(0))
