"""
Tests for the nonlinear solve engine.
"""

import numpy as np
import pytest

from src.hunter_saxton_integrators.errors import (
    NoConvergenceError,
    NonFiniteError,
    SingularJacobianError,
    ValidationError,
)
from src.hunter_saxton_integrators.metrics import SOLVER_FAILURES
from src.hunter_saxton_integrators.solver import SolveConfig, SolveMethod, solve


def quadratic(x):
    return x**2 - 4


class TestSolveConfig:
    """Test solver settings validation."""

    def test_defaults(self):
        cfg = SolveConfig()
        assert cfg.method is SolveMethod.NEWTON_FD
        assert (cfg.tol, cfg.max_iter, cfg.fd_eps) == (1e-12, 50, 1e-7)

    def test_method_from_text(self):
        assert SolveConfig(method="fixed_point").method is SolveMethod.FIXED_POINT

    @pytest.mark.parametrize(
        "kwargs",
        [{"tol": 0.0}, {"max_iter": 0}, {"fd_eps": -1e-7}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValidationError):
            SolveConfig(**kwargs)


class TestNewton:
    """Test Newton's method with a finite-difference Jacobian."""

    def test_affine_in_one_iteration(self):
        """x - 3 from 0 converges after one update."""
        x, report = solve(lambda x: x - 3, np.array([0.0]), SolveConfig(tol=1e-6))
        assert report.iterations == 1
        assert report.converged
        assert x[0] == pytest.approx(3.0, abs=1e-6)

    def test_quadratic(self):
        """x^2 - 4 from 3 reaches 2 within 8 iterations."""
        x, report = solve(quadratic, np.array([3.0]))
        assert x[0] == pytest.approx(2.0, abs=1e-12)
        assert report.iterations <= 8
        assert report.converged
        assert report.final_residual <= 1e-12

    def test_converged_guess_takes_no_iterations(self):
        x0 = np.array([2.0])
        x, report = solve(quadratic, x0)
        assert report.iterations == 0
        assert x is not x0
        np.testing.assert_array_equal(x, x0)

    def test_system(self):
        """A coupled 2 x 2 system converges to its root."""

        def residual(x):
            return np.array([x[0] ** 2 + x[1] ** 2 - 1, x[0] - x[1]])

        x, report = solve(residual, np.array([1.0, 0.5]))
        np.testing.assert_allclose(x, np.sqrt(0.5), atol=1e-12)
        assert report.converged

    def test_iteration_cap(self):
        """max_iter = 1 on the quadratic fails with a report attached."""
        with pytest.raises(NoConvergenceError) as excinfo:
            solve(quadratic, np.array([3.0]), SolveConfig(max_iter=1))
        report = excinfo.value.report
        assert report.iterations == 1
        assert not report.converged
        assert report.final_residual > 1e-12

    def test_singular_jacobian(self):
        """A residual that ignores x gives a zero Jacobian."""
        before = SOLVER_FAILURES.labels(reason="singular_jacobian")._value.get()
        with pytest.raises(SingularJacobianError):
            solve(lambda x: np.ones_like(x), np.zeros(3))
        after = SOLVER_FAILURES.labels(reason="singular_jacobian")._value.get()
        assert after == before + 1

    def test_deterministic(self):
        x1, r1 = solve(quadratic, np.array([3.0]))
        x2, r2 = solve(quadratic, np.array([3.0]))
        np.testing.assert_array_equal(x1, x2)
        assert r1 == r2


class TestFixedPoint:
    """Test the x <- x - residual(x) iteration."""

    def test_contraction(self):
        """x - cos(x), written as a contraction, converges to the Dottie number."""

        def residual(x):
            return 0.5 * (x - np.cos(x))

        x, report = solve(residual, np.array([1.0]), SolveConfig(method="fixed_point"))
        assert x[0] == pytest.approx(0.7390851332151607, abs=1e-11)
        assert report.converged
        assert report.iterations > 1

    def test_divergence_hits_cap(self):
        cfg = SolveConfig(method=SolveMethod.FIXED_POINT, max_iter=5)
        with pytest.raises(NoConvergenceError) as excinfo:
            solve(lambda x: -x, np.array([1.0]), cfg)
        assert excinfo.value.report.iterations == 5


class TestNonFinite:
    """Test NaN detection."""

    def test_initial_guess(self):
        with pytest.raises(NonFiniteError):
            solve(quadratic, np.array([np.nan]))

    def test_residual(self):
        with pytest.raises(NonFiniteError):
            solve(lambda x: x / 0.0, np.array([0.0]))
