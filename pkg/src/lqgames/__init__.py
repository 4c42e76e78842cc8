"""Two-player linear-quadratic game controllers for impedance-coupled plants.

The toolkit synthesizes cooperative (shared-reference), independent LQR,
and feedback-Nash controllers for a human and a robot acting on one
virtual mass-spring-damper, simulates the closed loop, scores windowed
agent costs, and runs a live human-in-the-loop session over a WebSocket.
"""

from .controllers import (
    AgentObjective,
    CgtAggregate,
    GameSolution,
    References,
    cgt_aggregate,
    control_action,
    impedance_equivalent,
    shared_reference,
    synthesize_cgt,
    synthesize_lqr,
    synthesize_ncgt,
)
from .dynamics import ImpedanceParams, State, StateSpace, build_state_space, step
from .errors import (
    DegenerateNormalizerError,
    DivergenceError,
    IndefiniteWeightError,
    LqGamesError,
    NoConvergenceError,
    NonHurwitzError,
    NoStabilizingSolutionError,
    ScenarioValidationError,
    SingularInertiaError,
    SingularWeightError,
)
from .riccati import CareProblem, CareSolution, solve_care, solve_coupled_care, solve_lyapunov
from .scenario import ScenarioFile, SweepSpec, load_scenario_file, parse_scenario_file
from .simulation import (
    CostReport,
    Scenario,
    SweepResult,
    Trajectory,
    agent_cost,
    effort_error,
    run_closed_loop,
    run_equivalent_impedance,
    sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AgentObjective",
    "CareProblem",
    "CareSolution",
    "CgtAggregate",
    "CostReport",
    "DegenerateNormalizerError",
    "DivergenceError",
    "GameSolution",
    "ImpedanceParams",
    "IndefiniteWeightError",
    "LqGamesError",
    "NoConvergenceError",
    "NonHurwitzError",
    "NoStabilizingSolutionError",
    "References",
    "Scenario",
    "ScenarioFile",
    "ScenarioValidationError",
    "SingularInertiaError",
    "SingularWeightError",
    "State",
    "StateSpace",
    "SweepResult",
    "SweepSpec",
    "Trajectory",
    "agent_cost",
    "build_state_space",
    "cgt_aggregate",
    "control_action",
    "effort_error",
    "impedance_equivalent",
    "load_scenario_file",
    "parse_scenario_file",
    "run_closed_loop",
    "run_equivalent_impedance",
    "shared_reference",
    "solve_care",
    "solve_coupled_care",
    "solve_lyapunov",
    "step",
    "sweep",
    "synthesize_cgt",
    "synthesize_lqr",
    "synthesize_ncgt",
]
