"""Shared fixtures: the benchmark 1-DOF plant and objectives."""

import numpy as np
import pytest

from lqgames import AgentObjective, ImpedanceParams, References, Scenario, build_state_space

# Benchmark scenario constants: 10 kg virtual mass, 25 Ns/m damping, no
# spring; both agents weight position error 1 and velocity error 1e-4
# against their own target only; effort weight 5e-4; targets 1 m and 0.5 m.
M_I = 10.0
D_I = 25.0
K_I = 0.0
Q_OWN = np.diag([1.0, 1e-4])
R_EFFORT = np.array([[5e-4]])
X_REF_H = 1.0
X_REF_R = 0.5


@pytest.fixture
def plant():
    return ImpedanceParams(m=[[M_I]], d=[[D_I]], k=[[K_I]])


@pytest.fixture
def plant_ss(plant):
    return build_state_space(plant)


@pytest.fixture
def human_objective():
    return AgentObjective(q_on_href=Q_OWN, q_on_rref=np.zeros((2, 2)), r_self=R_EFFORT)


@pytest.fixture
def robot_objective():
    return AgentObjective(q_on_href=np.zeros((2, 2)), q_on_rref=Q_OWN, r_self=R_EFFORT)


@pytest.fixture
def refs():
    return References(z_ref_h=[X_REF_H, 0.0], z_ref_r=[X_REF_R, 0.0])


@pytest.fixture
def make_scenario(plant, human_objective, robot_objective, refs):
    def _make(alpha=0.5, controller="cgt", duration=10.0, dt=1e-3, **overrides):
        kwargs = dict(
            plant=plant,
            human=human_objective,
            robot=robot_objective,
            refs=refs,
            alpha=alpha,
            controller=controller,
            duration=duration,
            dt=dt,
        )
        kwargs.update(overrides)
        return Scenario(**kwargs)

    return _make
