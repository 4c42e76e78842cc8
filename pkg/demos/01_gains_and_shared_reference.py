"""Synthesize all three controllers on the 1-DOF benchmark and compare them.

The plant is a 10 kg virtual mass with 25 Ns/m damping and no spring. The
human aims at 1.0 m, the robot at 0.5 m, and both pay 5e-4 per unit of
squared effort. With the blend weight alpha = 0.5 the cooperative agreed
reference lands exactly between the two targets; raising alpha pulls it
toward the human.
"""

import numpy as np

from lqgames import (
    AgentObjective,
    ImpedanceParams,
    References,
    build_state_space,
    cgt_aggregate,
    impedance_equivalent,
    shared_reference,
    synthesize_cgt,
    synthesize_lqr,
    synthesize_ncgt,
)

plant = ImpedanceParams(m=[[10.0]], d=[[25.0]], k=[[0.0]])
ss = build_state_space(plant)
human = AgentObjective(q_on_href=np.diag([1, 1e-4]), q_on_rref=np.zeros((2, 2)), r_self=[[5e-4]])
robot = AgentObjective(q_on_href=np.zeros((2, 2)), q_on_rref=np.diag([1, 1e-4]), r_self=[[5e-4]])
refs = References(z_ref_h=[1.0, 0.0], z_ref_r=[0.5, 0.0])

print("agreed reference as alpha moves from robot-led to human-led:")
for alpha in (0.1, 0.2, 0.5, 0.9):
    agg = cgt_aggregate(alpha, human, robot)
    print(f"  alpha={alpha:.1f}: z_ref = {shared_reference(agg, refs)[0]:.4f} m")

print("\ngains at alpha = 0.5:")
for name, synth in (("cgt", synthesize_cgt), ("lqr", synthesize_lqr), ("ncgt", synthesize_ncgt)):
    sol = synth(ss, 0.5, human, robot, refs)
    print(f"  {name:4s}: K_h = {np.round(sol.k_h, 3)}  K_r = {np.round(sol.k_r, 3)}")

sol = synthesize_cgt(ss, 0.5, human, robot, refs)
modified, forcing = impedance_equivalent(plant, sol.k_r, sol.z_ref[:1])
print("\nthe robot's cooperative feedback is the same as rendering a stiffer plant:")
print(f"  damping  25.0 -> {modified.d[0, 0]:.3f} Ns/m")
print(f"  stiffness 0.0 -> {modified.k[0, 0]:.3f} N/m")
print(f"  plus a constant force of {forcing[0]:.3f} N toward the agreed reference")
