"""How the robot's effort price reshapes the interaction at alpha = 0.5.

A cheaper robot (smaller effort weight) works harder everywhere. Under the
cooperative controller that only changes who carries the transient load;
the agreed equilibrium stays put. The competitive controllers instead land
somewhere else entirely for each price.
"""

from dataclasses import replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lqgames import load_scenario_file, sweep

HERE = Path(__file__).resolve().parent
OUT = HERE / "output"
OUT.mkdir(exist_ok=True)

base = load_scenario_file(HERE.parent / "scenarios" / "benchmark_effort_sweep.yaml")
values = list(base.sweep.values)

fig, axes = plt.subplots(1, 3, figsize=(12, 3.6), sharey=True)
for ax, controller in zip(axes, ("cgt", "lqr", "ncgt")):
    scn = replace(base.scenario, controller=controller)
    results = sweep(scn, "r_r", values)
    for res in results:
        ax.plot(res.trajectory.times, res.trajectory.pos[:, 0], label=f"R_r={res.value:g}")
    finals = [res.trajectory.pos[-1, 0] for res in results]
    spread = max(finals) - min(finals)
    peaks = [float(np.max(np.abs(res.trajectory.u_r))) for res in results]
    ax.set_title(f"{controller}: equilibrium spread {spread:.2e} m")
    ax.set_xlabel("time [s]")
    ax.legend(fontsize=8)
    print(f"{controller:4s}: peak robot force per R_r {['%.1f' % p for p in peaks]} N, "
          f"equilibrium spread {spread:.2e} m")
axes[0].set_ylabel("position [m]")
fig.tight_layout()
fig.savefig(OUT / "robot_effort_weight.png", dpi=120)
print(f"\nfigure saved to {OUT / 'robot_effort_weight.png'}")
