import warnings

import numpy as np
import pytest

from lqgames import (
    AgentObjective,
    References,
    SingularWeightError,
    State,
    cgt_aggregate,
    control_action,
    impedance_equivalent,
    shared_reference,
    synthesize_cgt,
    synthesize_lqr,
    synthesize_ncgt,
)
from lqgames.controllers import CgtAggregate
from oracles import blend_position_oracle, steady_state_oracle

SIM2_Q_RR = np.diag([0.1, 1e-4])


class TestAggregate:
    def test_benchmark_alpha_half(self, human_objective, robot_objective):
        agg = cgt_aggregate(0.5, human_objective, robot_objective)
        np.testing.assert_array_equal(agg.q_gt, np.diag([1.0, 1e-4]))
        np.testing.assert_array_equal(agg.q_h_agg, np.diag([0.5, 5e-5]))
        np.testing.assert_array_equal(agg.q_r_agg, np.diag([0.5, 5e-5]))
        np.testing.assert_array_equal(agg.r_gt, np.diag([2.5e-4, 2.5e-4]))

    def test_low_robot_state_weight_alpha_tenth(self, human_objective):
        robot = AgentObjective(q_on_href=np.zeros((2, 2)), q_on_rref=SIM2_Q_RR, r_self=[[5e-4]])
        agg = cgt_aggregate(0.1, human_objective, robot)
        np.testing.assert_allclose(agg.q_h_agg, np.diag([0.1, 1e-5]), rtol=1e-14)
        np.testing.assert_allclose(agg.q_r_agg, np.diag([0.09, 9e-5]), rtol=1e-14)

    def test_zero_weights(self, human_objective):
        zero = AgentObjective(
            q_on_href=np.zeros((2, 2)), q_on_rref=np.zeros((2, 2)), r_self=[[1.0]]
        )
        agg = cgt_aggregate(0.3, zero, zero)
        assert not np.any(agg.q_gt)
        assert not np.any(agg.q_h_agg)
        assert not np.any(agg.q_r_agg)

    @pytest.mark.parametrize("alpha", [0.0, 1.0, -0.2, 1.2])
    def test_alpha_domain(self, alpha, human_objective, robot_objective):
        with pytest.raises(ValueError, match="alpha"):
            cgt_aggregate(alpha, human_objective, robot_objective)

    def test_combined_weight_is_sum_of_aggregates(self, human_objective, robot_objective):
        for alpha in np.linspace(0.01, 0.99, 23):
            agg = cgt_aggregate(alpha, human_objective, robot_objective)
            np.testing.assert_array_equal(agg.q_gt, agg.q_h_agg + agg.q_r_agg)


class TestSharedReference:
    @pytest.mark.parametrize("alpha,expected", [(0.5, 0.75), (0.9, 0.95), (0.2, 0.6)])
    def test_benchmark_blend(self, alpha, expected, human_objective, robot_objective, refs):
        agg = cgt_aggregate(alpha, human_objective, robot_objective)
        z_ref = shared_reference(agg, refs)
        assert abs(z_ref[0] - expected) <= 1e-12
        assert abs(z_ref[1]) <= 1e-12

    def test_one_sided_weighting(self, refs):
        human = AgentObjective(q_on_href=np.eye(2), q_on_rref=np.zeros((2, 2)), r_self=[[1.0]])
        robot = AgentObjective(
            q_on_href=np.zeros((2, 2)), q_on_rref=np.zeros((2, 2)), r_self=[[1.0]]
        )
        agg = cgt_aggregate(0.5, human, robot)
        np.testing.assert_allclose(shared_reference(agg, refs), refs.z_ref_h, atol=1e-15)

    def test_low_robot_weight_matches_minimization_oracle(self, human_objective, refs):
        robot = AgentObjective(q_on_href=np.zeros((2, 2)), q_on_rref=SIM2_Q_RR, r_self=[[5e-4]])
        agg = cgt_aggregate(0.1, human_objective, robot)
        z_ref = shared_reference(agg, refs)
        expected = (0.1 * 1.0 + 0.09 * 0.5) / 0.19
        assert abs(z_ref[0] - expected) <= 1e-12
        oracle = blend_position_oracle(agg.q_h_agg[0, 0], agg.q_r_agg[0, 0], 1.0, 0.5)
        assert abs(z_ref[0] - oracle) <= 1e-9

    def test_convex_combination_for_scalar_weights(self, refs):
        rng = np.random.default_rng(11)
        for _ in range(20):
            w_h, w_r = rng.uniform(0.01, 5.0, size=2)
            agg = CgtAggregate(
                alpha=0.5,
                q_gt=(w_h + w_r) * np.eye(2),
                r_gt=np.eye(2),
                q_h_agg=w_h * np.eye(2),
                q_r_agg=w_r * np.eye(2),
            )
            z_ref = shared_reference(agg, refs)
            expected = (w_h * refs.z_ref_h + w_r * refs.z_ref_r) / (w_h + w_r)
            np.testing.assert_allclose(z_ref, expected, atol=1e-12)

    def test_singular_consistent_weight_warns_and_zeroes(self, refs):
        agg = CgtAggregate(
            alpha=0.5,
            q_gt=np.diag([1.0, 0.0]),
            r_gt=np.eye(2),
            q_h_agg=np.diag([1.0, 0.0]),
            q_r_agg=np.zeros((2, 2)),
        )
        with pytest.warns(UserWarning, match="singular"):
            z_ref = shared_reference(agg, refs)
        assert z_ref[0] == pytest.approx(1.0, abs=1e-12)
        assert z_ref[1] == 0.0

    def test_singular_inconsistent_weight_rejected(self, refs):
        agg = CgtAggregate(
            alpha=0.5,
            q_gt=np.diag([1.0, 0.0]),
            r_gt=np.eye(2),
            q_h_agg=np.diag([1.0, 1.0]),
            q_r_agg=np.zeros((2, 2)),
        )
        bad_refs = References(z_ref_h=[1.0, 1.0], z_ref_r=[0.5, 0.0])
        with pytest.raises(SingularWeightError):
            shared_reference(agg, bad_refs)


class TestSynthesis:
    def test_cgt_equilibrium_is_shared_reference(
        self, plant_ss, human_objective, robot_objective, refs
    ):
        sol = synthesize_cgt(plant_ss, 0.5, human_objective, robot_objective, refs)
        m = plant_ss.a - plant_ss.b_h @ sol.k_h - plant_ss.b_r @ sol.k_r
        assert np.max(np.linalg.eigvals(m).real) < 0
        c = plant_ss.b_h @ (sol.k_h @ sol.z_ref) + plant_ss.b_r @ (sol.k_r @ sol.z_ref)
        np.testing.assert_allclose(steady_state_oracle(m, c), sol.z_ref, atol=1e-10)

    def test_cgt_gain_split_consistency(self, plant_ss, human_objective, robot_objective, refs):
        sol = synthesize_cgt(plant_ss, 0.5, human_objective, robot_objective, refs)
        agg = cgt_aggregate(0.5, human_objective, robot_objective)
        stacked = np.vstack([sol.k_h, sol.k_r])
        expected = np.linalg.solve(agg.r_gt, plant_ss.stacked_b().T @ sol.p_matrices[0])
        assert np.max(np.abs(stacked - expected)) <= 1e-12 * (1 + np.abs(expected).max())

    @pytest.mark.parametrize("alpha,expected", [(0.9, 0.95), (0.2, 0.6)])
    def test_cgt_reference_ordering(
        self, alpha, expected, plant_ss, human_objective, robot_objective, refs
    ):
        sol = synthesize_cgt(plant_ss, alpha, human_objective, robot_objective, refs)
        assert abs(sol.z_ref[0] - expected) <= 1e-12

    def test_lqr_inactive_robot(self, plant_ss, human_objective, refs):
        robot = AgentObjective(
            q_on_href=np.zeros((2, 2)), q_on_rref=np.zeros((2, 2)), r_self=[[5e-4]]
        )
        sol = synthesize_lqr(plant_ss, 0.5, human_objective, robot, refs)
        assert np.max(np.abs(sol.k_r)) <= 1e-12
        assert np.max(np.abs(sol.k_h)) > 0
        assert sol.z_ref is None

    def test_lqr_symmetric_objectives_give_equal_gains(
        self, plant_ss, human_objective, robot_objective, refs
    ):
        sol = synthesize_lqr(plant_ss, 0.5, human_objective, robot_objective, refs)
        np.testing.assert_allclose(sol.k_h, sol.k_r, rtol=1e-12)
        joint = plant_ss.a - plant_ss.b_h @ sol.k_h - plant_ss.b_r @ sol.k_r
        assert np.max(np.linalg.eigvals(joint).real) < 0

    def test_ncgt_benchmark_equilibrium_between_targets(
        self, plant_ss, human_objective, robot_objective, refs
    ):
        sol = synthesize_ncgt(plant_ss, 0.5, human_objective, robot_objective, refs)
        m = plant_ss.a - plant_ss.b_h @ sol.k_h - plant_ss.b_r @ sol.k_r
        assert np.max(np.linalg.eigvals(m).real) < 0
        c = plant_ss.b_h @ (sol.k_h @ refs.z_ref_h) + plant_ss.b_r @ (sol.k_r @ refs.z_ref_r)
        z_star = steady_state_oracle(m, c)
        assert 0.5 < z_star[0] < 1.0

    def test_lqr_ncgt_persistent_effort_at_equilibrium(
        self, plant_ss, human_objective, robot_objective, refs
    ):
        for synth in (synthesize_lqr, synthesize_ncgt):
            sol = synth(plant_ss, 0.5, human_objective, robot_objective, refs)
            m = plant_ss.a - plant_ss.b_h @ sol.k_h - plant_ss.b_r @ sol.k_r
            c = plant_ss.b_h @ (sol.k_h @ refs.z_ref_h) + plant_ss.b_r @ (sol.k_r @ refs.z_ref_r)
            z_star = steady_state_oracle(m, c)
            u_h = control_action(sol.k_h, z_star, refs.z_ref_h)
            u_r = control_action(sol.k_r, z_star, refs.z_ref_r)
            assert np.linalg.norm(u_h) > 0
            assert np.linalg.norm(u_r) > 0

    def test_cgt_zero_effort_at_reference(self, plant_ss, human_objective, robot_objective, refs):
        sol = synthesize_cgt(plant_ss, 0.5, human_objective, robot_objective, refs)
        at_ref = State(pos=sol.z_ref[:1], vel=sol.z_ref[1:])
        assert np.array_equal(control_action(sol.k_h, at_ref, sol.z_ref), np.zeros(1))
        assert np.array_equal(control_action(sol.k_r, at_ref, sol.z_ref), np.zeros(1))


class TestControlAction:
    def test_at_reference(self):
        assert control_action([[3.0, 1.0]], State(pos=[2.0], vel=[0.5]), [2.0, 0.5])[0] == 0.0

    def test_unit_gain(self):
        out = control_action([[1.0, 0.0]], State(pos=[2.0], vel=[0.0]), [1.0, 0.0])
        assert out[0] == -1.0

    def test_initial_push_toward_reference(
        self, plant_ss, human_objective, robot_objective, refs
    ):
        sol = synthesize_cgt(plant_ss, 0.5, human_objective, robot_objective, refs)
        u0 = control_action(sol.k_h, State(pos=[0.0], vel=[0.0]), sol.z_ref)
        np.testing.assert_allclose(u0, sol.k_h @ sol.z_ref, atol=1e-15)
        assert u0[0] > 0

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            control_action([[1.0, 0.0]], State(pos=[1.0, 2.0], vel=[0.0, 0.0]), [1.0, 0.0])


class TestImpedanceEquivalent:
    def test_no_robot_action(self, plant):
        modified, forcing = impedance_equivalent(plant, np.zeros((1, 2)), [0.75])
        np.testing.assert_array_equal(modified.d, plant.d)
        np.testing.assert_array_equal(modified.k, plant.k)
        np.testing.assert_array_equal(forcing, [0.0])

    def test_block_assembly(self, plant):
        modified, forcing = impedance_equivalent(plant, np.array([[5.0, 2.0]]), [0.75])
        np.testing.assert_array_equal(modified.d, [[27.0]])
        np.testing.assert_array_equal(modified.k, [[5.0]])
        np.testing.assert_allclose(forcing, [3.75], atol=1e-15)

    def test_inertia_untouched(self, plant):
        modified, _ = impedance_equivalent(plant, np.array([[5.0, 2.0]]), [0.75])
        np.testing.assert_array_equal(modified.m, plant.m)
