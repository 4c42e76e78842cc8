import numpy as np
import pytest

from lqgames import (
    CareProblem,
    IndefiniteWeightError,
    NoConvergenceError,
    NonHurwitzError,
    solve_care,
    solve_coupled_care,
    solve_lyapunov,
)
from oracles import care_hamiltonian_oracle, coupled_fixed_point_oracle, lyapunov_oracle


def care_residual(a, b, q, r, p):
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.asarray(b, dtype=float).reshape(a.shape[0], -1)
    return np.linalg.norm(
        a.T @ p + p @ a - p @ b @ np.linalg.solve(r, b.T @ p) + q, "fro"
    )


class TestLyapunov:
    def test_scalar(self):
        assert abs(solve_lyapunov([[-1.0]], [[2.0]])[0, 0] - 1.0) <= 1e-12

    def test_diagonal(self):
        x = solve_lyapunov(-np.eye(2), np.eye(2))
        np.testing.assert_allclose(x, 0.5 * np.eye(2), atol=1e-12)

    def test_shifted_benchmark_plant(self):
        a = np.array([[0.0, 1.0], [0.0, -2.5]]) - 0.1 * np.eye(2)
        q = np.eye(2)
        x = solve_lyapunov(a, q)
        assert np.linalg.norm(a.T @ x + x @ a + q, "fro") <= 1e-10 * (1 + np.linalg.norm(q))
        np.testing.assert_allclose(x, lyapunov_oracle(a, q), atol=1e-10)

    @pytest.mark.parametrize("a", [[[0.0]], [[1.0]], [[-1e-13]]])
    def test_non_hurwitz_rejected(self, a):
        with pytest.raises(NonHurwitzError):
            solve_lyapunov(a, [[1.0]])

    def test_asymmetric_q_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            solve_lyapunov(-np.eye(2), [[1.0, 2.0], [0.0, 1.0]])


class TestCare:
    def test_scalar_unit(self):
        sol = solve_care(CareProblem(a=[[0.0]], b=[[1.0]], q=[[1.0]], r=[[1.0]]))
        assert abs(sol.p[0, 0] - 1.0) <= 1e-9
        assert abs(sol.gain[0, 0] - 1.0) <= 1e-9

    def test_stable_plant_zero_state_weight(self):
        sol = solve_care(CareProblem(a=[[-1.0]], b=[[1.0]], q=[[0.0]], r=[[1.0]]))
        assert abs(sol.p[0, 0]) <= 1e-12
        assert abs(sol.gain[0, 0]) <= 1e-12

    def test_benchmark_single_agent(self, plant_ss):
        q = np.diag([1.0, 1e-4])
        r = np.array([[5e-4]])
        sol = solve_care(CareProblem(a=plant_ss.a, b=plant_ss.b_h, q=q, r=r))
        assert sol.residual <= 1e-9 * (1 + np.linalg.norm(q, "fro"))
        closed = np.linalg.eigvals(plant_ss.a - plant_ss.b_h @ sol.gain)
        assert np.max(closed.real) < 0
        oracle = care_hamiltonian_oracle(plant_ss.a, plant_ss.b_h, q, r)
        assert np.max(np.abs(sol.p - oracle)) <= 1e-6

    def test_indefinite_r_rejected(self):
        with pytest.raises(IndefiniteWeightError):
            CareProblem(a=[[0.0]], b=[[1.0]], q=[[1.0]], r=[[-1.0]])

    def test_indefinite_q_rejected(self):
        with pytest.raises(ValueError, match="semi-definite"):
            CareProblem(a=[[0.0]], b=[[1.0]], q=[[-1.0]], r=[[1.0]])

    def test_gain_monotone_in_effort_weight(self):
        # Scalar plant: a costlier input never yields a larger gain.
        gains = []
        for r in np.logspace(-1.0, 0.0, 8):
            sol = solve_care(CareProblem(a=[[1.0]], b=[[1.0]], q=[[2.0]], r=[[r]]))
            gains.append(abs(sol.gain[0, 0]))
        assert all(g1 >= g2 - 1e-12 for g1, g2 in zip(gains, gains[1:]))

    def test_randomized_residual_and_oracle_agreement(self):
        rng = np.random.default_rng(3)
        for _ in range(25):
            n = int(rng.integers(1, 5))
            m = int(rng.integers(1, n + 1))
            a = rng.normal(size=(n, n))
            shift = np.max(np.linalg.eigvals(a).real)
            if shift > 1.0:
                a -= (shift - 1.0) * np.eye(n)
            b = rng.normal(size=(n, m))
            g = rng.normal(size=(n, n))
            q = g.T @ g
            h = rng.normal(size=(m, m))
            r = h.T @ h + 0.1 * np.eye(m)
            oracle = care_hamiltonian_oracle(a, b, q, r)
            if np.linalg.norm(oracle, "fro") > 1e4:
                continue
            sol = solve_care(CareProblem(a=a, b=b, q=q, r=r))
            assert sol.residual <= 1e-9 * (1 + np.linalg.norm(q, "fro"))
            assert np.max(np.linalg.eigvals(a - b @ sol.gain).real) < -1e-10
            assert np.max(np.abs(sol.p - oracle)) / (1 + np.max(np.abs(oracle))) <= 1e-6


class TestCoupled:
    def test_scalar_symmetric_closed_form(self):
        sol_h, sol_r = solve_coupled_care(
            ([[0.0]], [[1.0]], [[1.0]]), [[1.0]], [[1.0]], [[1.0]], [[1.0]]
        )
        expected = 1.0 / np.sqrt(3.0)
        assert abs(sol_h.p[0, 0] - expected) <= 1e-9
        assert abs(sol_r.p[0, 0] - expected) <= 1e-9
        assert abs(sol_h.gain[0, 0] - expected) <= 1e-9
        p_h, p_r = coupled_fixed_point_oracle(
            [[0.0]], [[1.0]], [[1.0]], [[1.0]], [[1.0]], [[1.0]], [[1.0]]
        )
        assert abs(sol_h.p[0, 0] - p_h[0, 0]) <= 1e-9

    def test_inactive_robot_collapses_to_single_care(self, plant_ss):
        q_h = np.diag([1.0, 1e-4])
        zero = np.zeros((2, 2))
        r = np.array([[5e-4]])
        sol_h, sol_r = solve_coupled_care(plant_ss, q_h, zero, r, r)
        assert np.max(np.abs(sol_r.p)) <= 1e-12
        single = solve_care(CareProblem(a=plant_ss.a, b=plant_ss.b_h, q=q_h, r=r))
        assert np.max(np.abs(sol_h.p - single.p)) <= 1e-8

    def test_benchmark_residuals_and_nash_deviation(self, plant_ss):
        q = 0.5 * np.diag([1.0, 1e-4])
        r = np.array([[5e-4]])
        sol_h, sol_r = solve_coupled_care(plant_ss, q, q, r, r)
        tol = 1e-8 * (1 + np.linalg.norm(q, "fro"))
        assert sol_h.residual <= tol and sol_r.residual <= tol
        joint = plant_ss.a - plant_ss.b_h @ sol_h.gain - plant_ss.b_r @ sol_r.gain
        assert np.max(np.linalg.eigvals(joint).real) < 0
        # Best-response fixed point: re-solving either player against the
        # other's frozen gain returns the same gain.
        re_h = solve_care(
            CareProblem(a=plant_ss.a - plant_ss.b_r @ sol_r.gain, b=plant_ss.b_h, q=q, r=r)
        )
        assert np.max(np.abs(re_h.gain - sol_h.gain)) <= 1e-6

    def test_cross_effort_weight_enters_residual(self):
        plant = ([[0.0]], [[1.0]], [[1.0]])
        r_hr = np.array([[0.3]])
        sol_h, sol_r = solve_coupled_care(
            plant, [[1.0]], [[1.0]], [[1.0]], [[1.0]], r_hr=r_hr
        )
        a = np.array([[0.0]])
        p_h, p_r = sol_h.p, sol_r.p
        res_h = (
            (a - p_r).T @ p_h + p_h @ (a - p_r) - p_h @ p_h + np.eye(1) + p_r @ r_hr @ p_r
        )
        assert abs(np.linalg.norm(res_h) - sol_h.residual) <= 1e-9
        assert sol_h.residual <= 1e-8 * 2

    def test_unstabilizable_game_reports_no_convergence(self):
        with pytest.raises(NoConvergenceError):
            solve_coupled_care(
                ([[1.0]], [[0.0]], [[0.0]]), [[1.0]], [[1.0]], [[1.0]], [[1.0]]
            )
