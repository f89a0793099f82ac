"""
Nonlinear solve engine for the implicit time steps.

``newton_fd`` is Newton's method with a dense forward-difference Jacobian;
``fixed_point`` iterates x <- x - residual(x) and expects the caller to supply
a residual already written in that contractive form.
"""

from collections.abc import Callable
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
import scipy.linalg

from .errors import (
    NoConvergenceError,
    NonFiniteError,
    SingularJacobianError,
    ValidationError,
)
from .logs import get_logger
from .metrics import SOLVER_FAILURES, SOLVER_ITERATIONS

logger = get_logger(__name__)

Residual = Callable[[np.ndarray], np.ndarray]


class SolveMethod(StrEnum):
    FIXED_POINT = "fixed_point"
    NEWTON_FD = "newton_fd"


@dataclass(frozen=True)
class SolveConfig:
    """
    Solver settings.

    The default tolerance is tight because the conservation checks on the
    implicit schemes only hold to the accuracy the nonlinear solve reaches.
    """

    method: SolveMethod = SolveMethod.NEWTON_FD
    tol: float = 1e-12
    max_iter: int = 50
    fd_eps: float = 1e-7

    def __post_init__(self):
        object.__setattr__(self, "method", SolveMethod(self.method))
        if not self.tol > 0:
            raise ValidationError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ValidationError(f"max_iter must be at least 1, got {self.max_iter}")
        if not self.fd_eps > 0:
            raise ValidationError(f"fd_eps must be positive, got {self.fd_eps}")


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    final_residual: float
    converged: bool


def _checked(r: np.ndarray, iterations: int) -> np.ndarray:
    if not np.all(np.isfinite(r)):
        SOLVER_FAILURES.labels(reason="nan").inc()
        raise NonFiniteError(f"residual became non-finite after {iterations} iterations")
    return r


def _fd_jacobian(residual: Residual, x: np.ndarray, r: np.ndarray, fd_eps: float):
    jacobian = np.empty((r.size, x.size))
    for j in range(x.size):
        xh = x.copy()
        xh[j] += fd_eps * max(1.0, abs(x[j]))
        # Step actually taken after rounding.
        h = xh[j] - x[j]
        jacobian[:, j] = (residual(xh) - r) / h
    return jacobian


def solve(
    residual: Residual, x0: np.ndarray, cfg: SolveConfig | None = None
) -> tuple[np.ndarray, SolveReport]:
    """
    Drive ``residual`` to zero starting from ``x0``.

    Args:
        residual: Deterministic map from a vector to a vector of the same size.
        x0: Finite starting guess, not modified.
        cfg: Solver settings, defaults to ``SolveConfig()``.

    Returns:
        Tuple of (solution, SolveReport). ``iterations`` counts updates, so a
        starting guess that already satisfies the tolerance reports 0.

    Raises:
        NoConvergenceError: max_iter updates did not reach tol.
        SingularJacobianError: the Newton linear solve failed.
        NonFiniteError: x0 or a residual is not finite.
    """
    cfg = cfg or SolveConfig()
    x = np.array(x0, dtype=np.float64, copy=True).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise NonFiniteError("initial guess is not finite")

    iterations = 0
    r = _checked(np.asarray(residual(x), dtype=np.float64).reshape(-1), iterations)
    norm = float(np.max(np.abs(r)))
    while norm > cfg.tol:
        if iterations >= cfg.max_iter:
            report = SolveReport(iterations, norm, False)
            SOLVER_ITERATIONS.labels(method=cfg.method).inc(iterations)
            SOLVER_FAILURES.labels(reason="no_convergence").inc()
            raise NoConvergenceError(
                f"{cfg.method} did not converge in {iterations} iterations "
                f"(residual {norm:.3e} > tol {cfg.tol:.1e})",
                report=report,
            )
        if cfg.method is SolveMethod.NEWTON_FD:
            jacobian = _fd_jacobian(residual, x, r, cfg.fd_eps)
            try:
                update = scipy.linalg.solve(jacobian, r)
            except (scipy.linalg.LinAlgError, ValueError) as e:
                SOLVER_FAILURES.labels(reason="singular_jacobian").inc()
                raise SingularJacobianError(
                    f"Newton linear solve failed at iteration {iterations + 1}: {e}"
                ) from e
            x = x - update
        else:
            x = x - r
        iterations += 1
        r = _checked(np.asarray(residual(x), dtype=np.float64).reshape(-1), iterations)
        norm = float(np.max(np.abs(r)))
        logger.debug(f"{cfg.method} iteration {iterations}: residual {norm:.3e}")

    SOLVER_ITERATIONS.labels(method=cfg.method).inc(iterations)
    return x, SolveReport(iterations, norm, True)
