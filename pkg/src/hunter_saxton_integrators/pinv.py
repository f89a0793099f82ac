"""
Minimum-norm pseudo-inverses of the periodic second-difference operators.

Both operators are circulant, so they are diagonal in the discrete Fourier
basis. The pseudo-inverse multiplies every mode by the reciprocal of the
operator symbol and zeroes the kernel modes. A dense SVD path is kept as an
independent oracle for tests.
"""

import functools
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.fft import irfft, rfft

from .errors import SizeLimitError, ValidationError
from .grid import Field, Grid1D, Stencil, stencil
from .logs import get_logger

logger = get_logger(__name__)

# Largest N for which the dense oracle builds an N x N matrix.
DENSE_ORACLE_MAX_N = 1024

SECOND_DIFFERENCES = (Stencil.NARROW_SECOND, Stencil.WIDE_SECOND)


@dataclass(frozen=True, eq=False)
class CirculantPinv:
    """
    Pseudo-inverse of a periodic second-difference operator.

    ``symbol`` and ``spectrum`` are indexed by the half-spectrum modes
    k = 0..N//2 returned by ``rfft``. ``kernel_dim`` counts zeroed modes over
    the full spectrum k = 0..N-1.
    """

    grid: Grid1D
    stencil_kind: Stencil
    symbol: np.ndarray
    spectrum: np.ndarray
    kernel_dim: int

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Apply the pseudo-inverse to raw nodal values (last axis)."""
        return irfft(rfft(values, axis=-1) * self.spectrum, n=self.grid.N, axis=-1)

    def apply_operator(self, values: np.ndarray) -> np.ndarray:
        """Apply the difference operator itself."""
        return stencil(values, self.grid.dx, self.stencil_kind, periodic=True)


def _kernel_mask(stencil_kind: Stencil, N: int) -> np.ndarray:
    k = np.arange(N // 2 + 1)
    if stencil_kind is Stencil.NARROW_SECOND:
        return k == 0
    # 2cos(2 theta) - 2 vanishes at theta = 0 and, for even N, at theta = pi.
    return (2 * k) % N == 0


@functools.lru_cache(maxsize=64)
def build_pinv(grid: Grid1D, stencil_kind: Stencil | str) -> CirculantPinv:
    """
    Precompute the Fourier multipliers of the pseudo-inverse.

    Args:
        grid: Periodic grid.
        stencil_kind: ``narrow_second`` or ``wide_second``.

    Returns:
        CirculantPinv, shared between calls with the same arguments.
    """
    stencil_kind = Stencil(stencil_kind)
    if not grid.periodic:
        raise ValidationError("pseudo-inverses are only built on periodic grids")
    if stencil_kind not in SECOND_DIFFERENCES:
        raise ValidationError(
            f"no pseudo-inverse for {stencil_kind}, expected one of {SECOND_DIFFERENCES}"
        )
    N = grid.N
    theta = 2 * np.pi * np.arange(N // 2 + 1) / N
    if stencil_kind is Stencil.NARROW_SECOND:
        symbol = (2 * np.cos(theta) - 2) / grid.dx**2
    else:
        symbol = (2 * np.cos(2 * theta) - 2) / (4 * grid.dx**2)
    kernel = _kernel_mask(stencil_kind, N)
    symbol = np.where(kernel, 0.0, symbol)
    spectrum = np.where(kernel, 0.0, 1.0 / np.where(kernel, 1.0, symbol))
    symbol.setflags(write=False)
    spectrum.setflags(write=False)

    # Every mode except k = 0 and k = N/2 appears twice in the full spectrum.
    k = np.arange(N // 2 + 1)
    multiplicity = np.where((k == 0) | (2 * k == N), 1, 2)
    kernel_dim = int(multiplicity[kernel].sum())
    logger.debug(f"Built {stencil_kind} pseudo-inverse for N={N}, kernel_dim={kernel_dim}")
    return CirculantPinv(grid, stencil_kind, symbol, spectrum, kernel_dim)


def _check_grid(P: CirculantPinv, f: Field):
    if f.grid != P.grid:
        raise ValidationError(f"field lives on {f.grid}, pseudo-inverse on {P.grid}")


def apply_pinv(P: CirculantPinv, f: Field) -> Field:
    """
    Minimum-norm least-squares solution g of A g = f.

    g is orthogonal to the kernel of A, and A g is the projection of f onto
    the range of A.
    """
    _check_grid(P, f)
    return Field(P.grid, P.apply(f.values))


def kernel_projection(P: CirculantPinv, f: Field) -> Field:
    """Component of f in the kernel of A, i.e. f - A^+(A f)."""
    _check_grid(P, f)
    return Field(P.grid, f.values - P.apply(P.apply_operator(f.values)))


def operator_matrix(grid: Grid1D, stencil_kind: Stencil | str) -> np.ndarray:
    """
    Dense circulant matrix of a periodic second difference.
    """
    stencil_kind = Stencil(stencil_kind)
    N = grid.N
    column = np.zeros(N)
    if stencil_kind is Stencil.NARROW_SECOND:
        scale = 1 / grid.dx**2
        column[0] -= 2 * scale
        column[1] += scale
        column[N - 1] += scale
    elif stencil_kind is Stencil.WIDE_SECOND:
        scale = 1 / (4 * grid.dx**2)
        column[0] -= 2 * scale
        column[2 % N] += scale
        column[(N - 2) % N] += scale
    else:
        raise ValidationError(f"no dense matrix for {stencil_kind}")
    return scipy.linalg.circulant(column)


def dense_pinv_oracle(grid: Grid1D, stencil_kind: Stencil | str, f: Field) -> Field:
    """
    Moore-Penrose pseudo-inverse applied to f through a dense SVD.

    Raises:
        SizeLimitError: if N exceeds ``DENSE_ORACLE_MAX_N``.
    """
    if grid.N > DENSE_ORACLE_MAX_N:
        raise SizeLimitError(
            f"dense oracle is capped at N={DENSE_ORACLE_MAX_N}, got N={grid.N}"
        )
    A = operator_matrix(grid, stencil_kind)
    return Field(grid, scipy.linalg.pinv(A) @ f.values)


def alternating_mean(values: np.ndarray) -> float:
    """Checkerboard mean sum (-1)^n f^n / N."""
    values = np.asarray(values, dtype=np.float64)
    signs = np.where(np.arange(values.shape[-1]) % 2 == 0, 1.0, -1.0)
    return float(np.mean(signs * values))


def resolve_pinv(
    P: CirculantPinv | None, grid: Grid1D, stencil_kind: Stencil
) -> CirculantPinv:
    """
    Return ``P`` after checking it matches grid and stencil, or build one.
    """
    if P is None:
        return build_pinv(grid, stencil_kind)
    if P.grid != grid or P.stencil_kind is not stencil_kind:
        raise ValidationError(
            f"scheme needs a {stencil_kind} pseudo-inverse on {grid}, "
            f"got {P.stencil_kind} on {P.grid}"
        )
    return P
