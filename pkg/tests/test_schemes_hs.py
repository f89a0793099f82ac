"""
Tests for the half-line Hunter-Saxton schemes.
"""

import numpy as np
import pytest

from src.hunter_saxton_integrators.errors import NonFiniteError, ValidationError
from src.hunter_saxton_integrators.grid import (
    Stencil,
    build_grid,
    linear_extension_rule,
    stencil,
)
from src.hunter_saxton_integrators.schemes_hs import (
    HsState,
    centered_difference,
    checkerboard_amplitude,
    cumulative_inverse_difference,
    eb1_step,
    eb2_step,
    h1_step,
    h2_balance_residual,
    h2_step,
    hs_initial_state,
    hs_invariants,
    solve_pressure,
)
from src.hunter_saxton_integrators.solver import SolveConfig, SolveMethod
from tests.oracles import (
    eb1_step_oracle,
    eb2_step_oracle,
    h1_residual_oracle,
    h2_residual_oracle,
    hs_invariants_oracle,
    pressure_oracle,
)

STEPPERS = {
    "eb1": eb1_step,
    "eb2": eb2_step,
    "h1": h1_step,
    "h2": h2_step,
}


def zero_state(grid):
    zeros = np.zeros(grid.size)
    return HsState(grid, 0.0, zeros, v=zeros, alpha=zeros, P=zeros)


def run(state, step, dt, n):
    states = [state]
    for _ in range(n):
        states.append(step(states[-1], dt))
    return states


class TestHsState:
    """Test state validation."""

    def test_periodic_grid_refused(self):
        grid = build_grid("periodic", 1, 8)
        with pytest.raises(ValidationError):
            HsState(grid, 0.0, np.zeros(8))

    def test_wrong_shape(self, half_line_grid):
        with pytest.raises(ValidationError):
            HsState(half_line_grid, 0.0, np.zeros(3))

    def test_non_finite_carries_time(self, half_line_grid):
        u = np.zeros(half_line_grid.size)
        u[5] = np.inf
        with pytest.raises(NonFiniteError) as excinfo:
            HsState(half_line_grid, 0.3, u, step=30)
        assert excinfo.value.t == 0.3
        assert excinfo.value.step == 30

    def test_initial_state(self, hs_start, half_line_grid):
        assert hs_start.u[0] == 0.0
        assert hs_start.v[0] == 0.0
        assert hs_start.v[-1] == 0.0
        np.testing.assert_array_equal(hs_start.alpha, hs_start.v**2)
        assert hs_start.P.shape == (half_line_grid.size,)
        assert hs_start.previous is None


class TestDiscreteOperators:
    """Test the half-line inverse difference and the pressure solve."""

    def test_inverse_of_zero(self):
        np.testing.assert_array_equal(cumulative_inverse_difference(np.zeros(11), 0.1), 0.0)

    def test_inverse_difference(self, rng):
        """delta_x s = w at n = 1..N-1 and s^0 = s^1 = 0."""
        dx = 0.05
        w = rng.standard_normal(21)
        s = cumulative_inverse_difference(w, dx)
        assert s[0] == s[1] == 0.0
        np.testing.assert_allclose((s[2:] - s[:-2]) / (2 * dx), w[1:-1], atol=1e-12)

    def test_inverse_difference_parity_sums(self):
        """s^{2m} sums odd entries and s^{2m+1} even entries."""
        w = np.arange(7.0)
        s = cumulative_inverse_difference(w, 0.5)
        np.testing.assert_array_equal(s, [0, 0, 1, 2, 4, 6, 9])

    def test_pressure_equation(self, hs_start, half_line_grid):
        """-delta_x^2 P = alpha/2 with the wide stencil at n = 0..N-1."""
        grid = half_line_grid
        P = solve_pressure(hs_start.alpha, grid)
        assert P.shape == (grid.N + 2,)
        assert P[0] == P[1] == 0.0
        mirrored = np.concatenate((P[2:0:-1], P))
        wide = stencil(mirrored, grid.dx, Stencil.WIDE_SECOND, periodic=False)[2:-2]
        np.testing.assert_allclose(
            -wide[: grid.N], hs_start.alpha[: grid.N] / 2, rtol=0, atol=1e-10
        )

    def test_pressure_matches_marching(self, hs_start, half_line_grid):
        P = solve_pressure(hs_start.alpha, half_line_grid)
        expected = pressure_oracle(hs_start.alpha, half_line_grid.dx)
        np.testing.assert_allclose(P, expected, rtol=0, atol=1e-14)


class TestEb1:
    """Test the first box scheme."""

    def test_zero_is_fixed(self, half_line_grid):
        states = run(zero_state(half_line_grid), eb1_step, 0.01, 3)
        for state in states:
            np.testing.assert_array_equal(state.u, 0.0)
            np.testing.assert_array_equal(state.v, 0.0)

    def test_startup_step_matches_oracle(self, hs_start, half_line):
        dx, dt = hs_start.grid.dx, half_line["dt"]
        state = eb1_step(hs_start, dt)
        u, v = eb1_step_oracle(hs_start.u, hs_start.v, None, dx, dt)
        np.testing.assert_allclose(state.u, u, rtol=0, atol=1e-14)
        np.testing.assert_allclose(state.v, v, rtol=0, atol=1e-14)
        assert state.previous.u is hs_start.u

    def test_leapfrog_step_matches_oracle(self, hs_start, half_line):
        dx, dt = hs_start.grid.dx, half_line["dt"]
        first = eb1_step(hs_start, dt)
        second = eb1_step(first, dt)
        u, v = eb1_step_oracle(first.u, first.v, hs_start.v, dx, dt)
        np.testing.assert_allclose(second.u, u, rtol=0, atol=1e-14)
        np.testing.assert_allclose(second.v, v, rtol=0, atol=1e-14)
        assert second.previous.previous is None

    def test_boundary_values_pinned(self, hs_start, half_line):
        for state in run(hs_start, eb1_step, half_line["dt"], 10)[1:]:
            assert state.u[0] == 0.0
            assert state.u[1] == 0.0
            assert state.v[0] == 0.0
            assert state.v[-1] == 0.0

    def test_hamiltonians_over_run(self, hs_start, half_line):
        """
        H1 stays near 0.5 and H2 grows like t/8 + 1/4 up to t = 0.5.

        The kinks of the sampled profile fall between nodes, which already puts
        the discrete H1 at 0.487 on this grid.
        """
        dt = half_line["dt"]
        n = round(half_line["tend"] / dt)
        states = run(hs_start, eb1_step, dt, n)
        t = np.array([s.t for s in states])
        h1, h2 = np.array([hs_invariants(s) for s in states]).T
        assert np.all(np.abs(h1 - half_line["H1"]) <= 0.03)
        slope = np.polyfit(t, h2, 1)[0]
        assert slope == pytest.approx(half_line["H2_slope"], abs=0.0125)


class TestEb2:
    """Test the second box scheme."""

    def test_zero_is_fixed(self, half_line_grid):
        state = eb2_step(eb2_step(zero_state(half_line_grid), 0.01), 0.01)
        np.testing.assert_array_equal(state.u, 0.0)
        np.testing.assert_array_equal(state.alpha, 0.0)

    def test_startup_step_matches_oracle(self, hs_start, half_line):
        dx, dt = hs_start.grid.dx, half_line["dt"]
        state = eb2_step(hs_start, dt)
        u, alpha = eb2_step_oracle(hs_start.u, hs_start.alpha, None, None, dx, dt)
        np.testing.assert_allclose(state.u, u, rtol=0, atol=1e-14)
        np.testing.assert_allclose(state.alpha, alpha, rtol=0, atol=1e-14)

    def test_leapfrog_step_matches_oracle(self, hs_start, half_line):
        dx, dt = hs_start.grid.dx, half_line["dt"]
        first = eb2_step(hs_start, dt)
        second = eb2_step(first, dt)
        u, alpha = eb2_step_oracle(
            first.u, first.alpha, hs_start.u, hs_start.alpha, dx, dt
        )
        np.testing.assert_allclose(second.u, u, rtol=0, atol=1e-14)
        np.testing.assert_allclose(second.alpha, alpha, rtol=0, atol=1e-14)

    def test_close_to_first_scheme(self, hs_start, half_line):
        """Both box schemes give similar profiles at t = 0.5."""
        dt = half_line["dt"]
        n = round(half_line["tend"] / dt)
        eb1_final = run(hs_start, eb1_step, dt, n)[-1]
        eb2_final = run(hs_start, eb2_step, dt, n)[-1]
        assert np.abs(eb1_final.u - eb2_final.u).max() <= 0.05


class TestH1Scheme:
    """Test the implicit H1-preserving scheme."""

    def test_zero_is_fixed(self, half_line_grid):
        state = h1_step(zero_state(half_line_grid), 0.01)
        np.testing.assert_array_equal(state.u, 0.0)
        assert state.report.iterations == 0

    def test_one_step_conserves_h1(self, hs_start, half_line):
        state = h1_step(hs_start, half_line["dt"])
        before, _ = hs_invariants(hs_start)
        after, _ = hs_invariants(state)
        assert abs(after - before) <= 1e-9
        assert state.report.converged
        assert state.previous is None

    def test_returned_state_solves_scheme(self, hs_start, half_line):
        dt = half_line["dt"]
        state = h1_step(hs_start, dt)
        residual = h1_residual_oracle(state.u, hs_start.u, hs_start.grid.dx, dt)
        assert np.abs(residual).max() <= 1e-11

    def test_fixed_point_agrees_with_newton(self, hs_start, half_line):
        dt = half_line["dt"]
        newton = h1_step(hs_start, dt)
        fixed = h1_step(hs_start, dt, SolveConfig(method=SolveMethod.FIXED_POINT))
        np.testing.assert_allclose(fixed.u, newton.u, rtol=0, atol=1e-9)

    def test_conservation_over_fifty_steps(self, hs_start, half_line):
        states = run(hs_start, h1_step, half_line["dt"], 50)
        h1 = np.array([hs_invariants(s)[0] for s in states])
        assert np.abs(h1 - h1[0]).max() <= 1e-9 * max(1.0, h1[0])


class TestH2Scheme:
    """Test the implicit H2-preserving scheme."""

    def test_zero_is_fixed(self, half_line_grid):
        state = h2_step(zero_state(half_line_grid), 0.01)
        np.testing.assert_array_equal(state.u, 0.0)

    def test_returned_state_solves_scheme(self, hs_start, half_line):
        dt = half_line["dt"]
        state = h2_step(hs_start, dt)
        residual = h2_residual_oracle(state.u, hs_start.u, hs_start.grid.dx, dt)
        assert np.abs(residual).max() <= 1e-11

    def test_balance_law_every_step(self, hs_start, half_line):
        dt = half_line["dt"]
        states = run(hs_start, h2_step, dt, 50)
        for before, after in zip(states, states[1:]):
            assert abs(h2_balance_residual(before, after, dt)) <= 1e-9

    def test_balance_of_zero(self, half_line_grid):
        state = zero_state(half_line_grid)
        assert h2_balance_residual(state, h2_step(state, 0.01), 0.01) == 0.0


@pytest.mark.parametrize("scheme", sorted(STEPPERS))
def test_left_boundary_stays_zero(scheme, hs_start, half_line):
    """u^0 = 0 exactly at every step of every scheme."""
    for state in run(hs_start, STEPPERS[scheme], half_line["dt"], 5):
        assert state.u[0] == 0.0
        assert state.step == round(state.t / half_line["dt"])


class TestHsInvariants:
    """Test the discrete Hamiltonians."""

    def test_zero(self, half_line_grid):
        assert hs_invariants(zero_state(half_line_grid)) == (0.0, 0.0)

    def test_unit_slope(self):
        """u = x on [-6, 6] with linear ghosts: H1 = 6 and H2 = 0."""
        grid = build_grid("half_line", 6, 24)
        state = HsState(grid, 0.0, grid.x)
        h1, h2 = hs_invariants(state, linear_extension_rule(grid))
        assert h1 == pytest.approx(6.0, rel=1e-13)
        assert h2 == pytest.approx(0.0, abs=1e-13)

    def test_exact_solution_values(self, hs_start, half_line):
        """Sampling loses part of the slope on the two cells holding a kink."""
        h1, h2 = hs_invariants(hs_start)
        assert h1 == pytest.approx(half_line["H1"], abs=0.02)
        assert h2 == pytest.approx(half_line["H2_initial"], abs=0.015)
        assert h1 < half_line["H1"]

    def test_matches_oracle(self, hs_start):
        h1, h2 = hs_invariants(hs_start)
        expected = hs_invariants_oracle(hs_start.u, hs_start.grid.dx)
        assert h1 == pytest.approx(expected[0], rel=1e-13)
        assert h2 == pytest.approx(expected[1], rel=1e-13)

    def test_checkerboard_amplitude(self):
        """u^n = (-1)^n n gives delta_x u = (-1)^{n+1}/dx inside and 0 at both ends."""
        grid = build_grid("half_line", 1, 8)
        assert checkerboard_amplitude(HsState(grid, 0.0, np.zeros(9))) == 0.0
        n = np.arange(9)
        state = HsState(grid, 0.0, (-1.0) ** n * n)
        assert checkerboard_amplitude(state) == pytest.approx(7 / (9 * grid.dx))

    def test_centered_difference_zero_at_ends(self, hs_start):
        v = centered_difference(hs_start.u, hs_start.grid)
        assert v[0] == 0.0
        assert v[-1] == 0.0
