"""Windowed agent costs against the blend weight.

Costs integrate each agent's own quadratic stage cost over the first
3.5 s. The cooperative controller's human cost falls monotonically with
alpha and, past a crossover, undercuts both competitive controllers:
leading is cheap for a human whose partner actually helps.
"""

from dataclasses import replace
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from lqgames import load_scenario_file, run_closed_loop
from lqgames.simulation import compute_costs

HERE = Path(__file__).resolve().parent
OUT = HERE / "output"
OUT.mkdir(exist_ok=True)

base = load_scenario_file(HERE.parent / "scenarios" / "benchmark_cgt_alpha05.yaml").scenario
base = replace(base, duration=3.5)
alphas = np.round(np.arange(0.1, 0.95, 0.1), 10)

fig, (ax_h, ax_r) = plt.subplots(1, 2, figsize=(10, 3.8))
for controller, style in (("cgt", "-o"), ("lqr", "--s"), ("ncgt", ":^")):
    j_h, j_r = [], []
    for alpha in alphas:
        scn = replace(base, controller=controller, alpha=float(alpha))
        costs = compute_costs(run_closed_loop(scn), scn)
        j_h.append(costs.j_h)
        j_r.append(costs.j_r)
    ax_h.plot(alphas, j_h, style, label=controller)
    ax_r.plot(alphas, j_r, style, label=controller)
    print(f"{controller:4s}: J_h over alpha = {np.round(j_h, 3)}")
ax_h.set_xlabel("alpha")
ax_h.set_ylabel("human cost (3.5 s window)")
ax_r.set_xlabel("alpha")
ax_r.set_ylabel("robot cost (3.5 s window)")
ax_h.legend()
ax_r.legend()
fig.tight_layout()
fig.savefig(OUT / "cost_vs_alpha.png", dpi=120)
print(f"\nfigure saved to {OUT / 'cost_vs_alpha.png'}")
