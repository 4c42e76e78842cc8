"""Closed-loop episodes, windowed agent costs, and parameter sweeps.

A run integrates the plant under the synthesized feedback of one of the
three controllers. Feedback is evaluated continuously inside the
integrator stages (the closed loop is an affine ODE), so folding the robot
gain into the plant via the impedance equivalence reproduces trajectories
to machine precision. An external human force stream, when supplied,
replaces the modeled human input sample-by-sample while the model
prediction is still recorded for the effort-error metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .controllers import (
    CONTROLLER_KINDS,
    AgentObjective,
    GameSolution,
    References,
    control_action,
    impedance_equivalent,
    synthesize_cgt,
    synthesize_lqr,
    synthesize_ncgt,
)
from .dynamics import (
    MAGNITUDE_GUARD,
    ImpedanceParams,
    State,
    StateSpace,
    build_state_space,
    rk4_affine_step,
)
from .errors import DegenerateNormalizerError, DivergenceError, LqGamesError

__all__ = [
    "Scenario",
    "Trajectory",
    "CostReport",
    "SweepResult",
    "SWEEP_PARAMETERS",
    "synthesize",
    "run_closed_loop",
    "run_equivalent_impedance",
    "agent_cost",
    "effort_error",
    "sweep",
]

SWEEP_PARAMETERS = ("alpha", "q_rr_scale", "r_r")

DEFAULT_COST_WINDOW = (0.0, 3.5)


@dataclass(frozen=True)
class Scenario:
    """Full configuration of one closed-loop episode."""

    plant: ImpedanceParams
    human: AgentObjective
    robot: AgentObjective
    refs: References
    alpha: float
    controller: str
    duration: float
    dt: float = 1e-3
    initial_state: State | None = None
    cost_window: tuple[float, float] = DEFAULT_COST_WINDOW

    def __post_init__(self):
        if self.controller not in CONTROLLER_KINDS:
            raise ValueError(
                f"controller must be one of {CONTROLLER_KINDS}, got {self.controller!r}"
            )
        if not self.duration > 0.0:
            raise ValueError(f"duration must be positive, got {self.duration}")
        if not self.dt > 0.0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.dt > self.duration:
            raise ValueError(f"dt={self.dt} exceeds duration={self.duration}")
        lo, hi = self.cost_window
        if not (0.0 <= lo < hi):
            raise ValueError(f"cost window must satisfy 0 <= lo < hi, got {self.cost_window}")
        if self.initial_state is not None and self.initial_state.n != self.plant.n:
            raise ValueError("initial state DOF count does not match the plant")

    def initial_vector(self) -> np.ndarray:
        if self.initial_state is None:
            return np.zeros(2 * self.plant.n)
        return self.initial_state.as_vector()


@dataclass(frozen=True)
class Trajectory:
    """Time-indexed record of one closed-loop run.

    All arrays share the sample count ``floor(duration/dt) + 1``; forces
    are per-sample rows. ``z_ref_used`` stacks the human and robot
    effective references (identical rows for the cooperative controller).
    """

    times: np.ndarray
    pos: np.ndarray
    vel: np.ndarray
    u_h: np.ndarray
    u_r: np.ndarray
    u_h_nominal: np.ndarray
    z_ref_used: np.ndarray

    @property
    def n(self) -> int:
        return self.pos.shape[1]

    def state_at(self, i: int) -> State:
        return State(pos=self.pos[i], vel=self.vel[i])

    def state_vectors(self) -> np.ndarray:
        """(N, 2n) array of stacked [pos, vel] rows."""
        return np.hstack([self.pos, self.vel])


@dataclass(frozen=True)
class CostReport:
    """Windowed realized costs of the two agents."""

    j_h: float
    j_r: float
    window: tuple[float, float]


@dataclass(frozen=True)
class SweepResult:
    value: float
    trajectory: Trajectory | None = None
    costs: CostReport | None = None
    error: str | None = field(default=None)


def synthesize(scenario: Scenario, ss: StateSpace | None = None) -> GameSolution:
    """Synthesize the scenario's controller on its plant."""
    if ss is None:
        ss = build_state_space(scenario.plant)
    if scenario.controller == "cgt":
        return synthesize_cgt(ss, scenario.alpha, scenario.human, scenario.robot, scenario.refs)
    if scenario.controller == "lqr":
        return synthesize_lqr(ss, scenario.alpha, scenario.human, scenario.robot, scenario.refs)
    return synthesize_ncgt(ss, scenario.alpha, scenario.human, scenario.robot, scenario.refs)


def effective_references(scenario: Scenario, solution: GameSolution) -> tuple[np.ndarray, np.ndarray]:
    """Per-agent reference vectors actually fed back on."""
    if solution.kind == "cgt":
        return solution.z_ref, solution.z_ref
    return scenario.refs.z_ref_h, scenario.refs.z_ref_r


def closed_loop_affine(
    ss: StateSpace, solution: GameSolution, ref_h: np.ndarray, ref_r: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Affine closed-loop form dz/dt = m z + c under both feedbacks."""
    m = ss.a - ss.b_h @ solution.k_h - ss.b_r @ solution.k_r
    c = ss.b_h @ (solution.k_h @ ref_h) + ss.b_r @ (solution.k_r @ ref_r)
    return m, c


def sample_count(duration: float, dt: float) -> int:
    """floor(duration / dt) + 1 with protection against float noise."""
    return int(np.floor(duration / dt + 1e-9)) + 1


def _guard(z: np.ndarray):
    if not np.all(np.isfinite(z)) or np.max(np.abs(z)) > MAGNITUDE_GUARD:
        raise DivergenceError("closed-loop state exceeded the magnitude guard")


def run_closed_loop(scenario: Scenario, human_force_source=None) -> Trajectory:
    """Simulate the scenario's closed loop on its fixed grid.

    Parameters
    ----------
    scenario : Scenario
        Plant, objectives, references, controller selection, and grid.
    human_force_source : callable, optional
        ``f(t, z) -> (n,) force``. When given, it replaces the modeled
        human input (held constant over each step) while the model
        prediction is still recorded in ``u_h_nominal``.

    Returns
    -------
    Trajectory
        States and efforts on the grid ``0, dt, ..., floor(duration/dt)*dt``.
    """
    ss = build_state_space(scenario.plant)
    solution = synthesize(scenario, ss)
    ref_h, ref_r = effective_references(scenario, solution)
    return _integrate(scenario, ss, solution, ref_h, ref_r, human_force_source)


def _integrate(scenario, ss, solution, ref_h, ref_r, human_force_source, m_c=None):
    n = ss.n
    steps = sample_count(scenario.duration, scenario.dt)
    dt = scenario.dt
    times = np.arange(steps) * dt
    pos = np.empty((steps, n))
    vel = np.empty((steps, n))
    u_h = np.empty((steps, n))
    u_r = np.empty((steps, n))
    u_nom = np.empty((steps, n))

    if m_c is None:
        m_mod, c_mod = closed_loop_affine(ss, solution, ref_h, ref_r)
    else:
        m_mod, c_mod = m_c
    live = human_force_source is not None
    if live:
        m_live = ss.a - ss.b_r @ solution.k_r
        c_live_base = ss.b_r @ (solution.k_r @ ref_r)

    z = scenario.initial_vector()
    for i in range(steps):
        pos[i] = z[:n]
        vel[i] = z[n:]
        nominal = -solution.k_h @ (z - ref_h)
        u_nom[i] = nominal
        u_r[i] = -solution.k_r @ (z - ref_r)
        if live:
            force = np.asarray(human_force_source(times[i], z), dtype=float).reshape(-1)
            if force.shape != (n,) or not np.all(np.isfinite(force)):
                raise ValueError(f"human force source must yield a finite ({n},) vector")
            u_h[i] = force
        else:
            u_h[i] = nominal
        if i + 1 < steps:
            if live:
                z = rk4_affine_step(m_live, c_live_base + ss.b_h @ force, z, dt)
            else:
                z = rk4_affine_step(m_mod, c_mod, z, dt)
            _guard(z)

    z_ref_used = np.vstack([ref_h, ref_r])
    return Trajectory(
        times=times, pos=pos, vel=vel, u_h=u_h, u_r=u_r, u_h_nominal=u_nom, z_ref_used=z_ref_used
    )


def run_equivalent_impedance(scenario: Scenario) -> Trajectory:
    """Re-run the scenario with the robot feedback folded into the plant.

    The robot's gain becomes extra virtual damping/stiffness plus a
    constant force on the human's input channel; only the human feedback
    remains explicit. States match `run_closed_loop` to machine precision,
    which is the content of the impedance-equivalence identity.
    """
    ss = build_state_space(scenario.plant)
    solution = synthesize(scenario, ss)
    ref_h, ref_r = effective_references(scenario, solution)
    x_ref = ref_r[: ss.n]
    modified, forcing = impedance_equivalent(scenario.plant, solution.k_r, x_ref)
    ss_eq = build_state_space(modified)
    m = ss_eq.a - ss_eq.b_h @ solution.k_h
    c = ss_eq.b_h @ (solution.k_h @ ref_h) + ss_eq.b_h @ forcing
    return _integrate(scenario, ss, solution, ref_h, ref_r, None, m_c=(m, c))


def _window_slice(times: np.ndarray, window: tuple[float, float]) -> np.ndarray:
    lo, hi = float(window[0]), float(window[1])
    if lo >= hi:
        raise ValueError(f"window must satisfy lo < hi, got {window}")
    tol = 1e-9
    if lo < times[0] - tol or hi > times[-1] + tol:
        raise ValueError(
            f"window {window} outside trajectory range [{times[0]}, {times[-1]}]"
        )
    mask = (times >= lo - tol) & (times <= hi + tol)
    idx = np.nonzero(mask)[0]
    if idx.size < 2:
        raise ValueError(f"window {window} covers fewer than two samples")
    return idx


def agent_cost(
    traj: Trajectory,
    objective: AgentObjective,
    refs: References,
    window: tuple[float, float],
    player: str = "human",
) -> float:
    """Trapezoidal integral of one agent's realized cost over a window.

    The integrand is the agent's quadratic stage cost evaluated with its
    own measured effort: deviation from the human target under
    ``q_on_href``, deviation from the robot target under ``q_on_rref``,
    and the effort term under ``r_self``.
    """
    if player not in ("human", "robot"):
        raise ValueError(f"player must be 'human' or 'robot', got {player!r}")
    idx = _window_slice(traj.times, window)
    z = traj.state_vectors()[idx]
    u = (traj.u_h if player == "human" else traj.u_r)[idx]
    e_h = z - refs.z_ref_h
    e_r = z - refs.z_ref_r
    integrand = (
        np.einsum("ij,jk,ik->i", e_h, objective.q_on_href, e_h)
        + np.einsum("ij,jk,ik->i", e_r, objective.q_on_rref, e_r)
        + np.einsum("ij,jk,ik->i", u, objective.r_self, u)
    )
    return float(np.trapezoid(integrand, traj.times[idx]))


def effort_error(traj: Trajectory, window: tuple[float, float]) -> float:
    """Normalized deviation of measured from nominal human effort.

    Integrates ``||u_h - u_h_nominal||`` over the window (trapezoid) and
    divides by the peak nominal effort norm over the same window.

    Raises
    ------
    DegenerateNormalizerError
        If the peak nominal norm is below 1e-12.
    """
    idx = _window_slice(traj.times, window)
    nominal = np.linalg.norm(traj.u_h_nominal[idx], axis=1)
    peak = float(np.max(nominal))
    if peak < 1e-12:
        raise DegenerateNormalizerError(
            "nominal human effort is identically ~0 over the window; cannot normalize"
        )
    deviation = np.linalg.norm(traj.u_h[idx] - traj.u_h_nominal[idx], axis=1)
    return float(np.trapezoid(deviation, traj.times[idx]) / peak)


def compute_costs(traj: Trajectory, scenario: Scenario) -> CostReport:
    window = scenario.cost_window
    return CostReport(
        j_h=agent_cost(traj, scenario.human, scenario.refs, window, "human"),
        j_r=agent_cost(traj, scenario.robot, scenario.refs, window, "robot"),
        window=window,
    )


def apply_sweep_value(base: Scenario, parameter: str, value: float) -> Scenario:
    """Derive the scenario for one sweep point."""
    if parameter == "alpha":
        return replace(base, alpha=float(value))
    if parameter == "q_rr_scale":
        robot = AgentObjective(
            q_on_href=base.robot.q_on_href,
            q_on_rref=float(value) * base.robot.q_on_rref,
            r_self=base.robot.r_self,
        )
        return replace(base, robot=robot)
    if parameter == "r_r":
        robot = AgentObjective(
            q_on_href=base.robot.q_on_href,
            q_on_rref=base.robot.q_on_rref,
            r_self=float(value) * np.eye(base.plant.n),
        )
        return replace(base, robot=robot)
    raise ValueError(f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}")


def sweep(base: Scenario, parameter: str, values) -> list[SweepResult]:
    """Run the scenario once per value, collecting costs; errors don't abort.

    Results come back in input order. A value whose run fails carries the
    error text instead of a trajectory.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(
            f"unknown sweep parameter {parameter!r}; expected one of {SWEEP_PARAMETERS}"
        )
    values = list(values)
    if not values:
        raise ValueError("sweep requires at least one value")
    results = []
    for value in values:
        try:
            scn = apply_sweep_value(base, parameter, value)
            traj = run_closed_loop(scn)
            costs = compute_costs(traj, scn)
            results.append(SweepResult(value=float(value), trajectory=traj, costs=costs))
        except (LqGamesError, ValueError) as exc:
            results.append(SweepResult(value=float(value), error=str(exc)))
    return results
