"""Scenario file schema: versioned YAML documents describing an episode.

Matrices are written row-major with explicit dimensions so shape mistakes
fail loudly instead of broadcasting silently:

    inertia: {rows: 1, cols: 1, data: [10.0]}

Units: inertia kg, damping N*s/m, stiffness N/m, positions m, velocities
m/s, durations s, forces N. See the README for the full schema.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .controllers import CONTROLLER_KINDS, AgentObjective, References
from .dynamics import ImpedanceParams, State
from .errors import IndefiniteWeightError, ScenarioValidationError
from .simulation import DEFAULT_COST_WINDOW, SWEEP_PARAMETERS, Scenario

SCHEMA_TAG = "lqgames-scenario/1"

__all__ = [
    "SCHEMA_TAG",
    "SweepSpec",
    "ScenarioFile",
    "parse_scenario_file",
    "load_scenario_file",
    "render_scenario_file",
    "scenario_to_mapping",
]


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]


@dataclass(frozen=True)
class ScenarioFile:
    """A parsed scenario document: the episode plus an optional sweep block."""

    scenario: Scenario
    sweep: SweepSpec | None = None


def _fail(path: str, message: str):
    raise ScenarioValidationError(f"{path}: {message}")


def _get(mapping, key, path, required=True, default=None):
    if not isinstance(mapping, dict):
        _fail(path, f"expected a mapping, got {type(mapping).__name__}")
    if key not in mapping:
        if required:
            _fail(f"{path}.{key}" if path else key, "missing required field")
        return default
    return mapping[key]


def _number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(path, f"expected a number, got {value!r}")
    if not np.isfinite(value):
        _fail(path, "must be finite")
    return float(value)


def _matrix(node, path) -> np.ndarray:
    rows = _get(node, "rows", path)
    cols = _get(node, "cols", path)
    data = _get(node, "data", path)
    if not isinstance(rows, int) or not isinstance(cols, int) or rows < 1 or cols < 1:
        _fail(path, "rows and cols must be positive integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        _fail(f"{path}.data", f"expected {rows * cols} row-major entries")
    values = [_number(v, f"{path}.data[{i}]") for i, v in enumerate(data)]
    return np.array(values, dtype=float).reshape(rows, cols)


def _vector(node, path, length=None) -> np.ndarray:
    if not isinstance(node, list) or not node:
        _fail(path, "expected a non-empty list of numbers")
    vec = np.array([_number(v, f"{path}[{i}]") for i, v in enumerate(node)], dtype=float)
    if length is not None and vec.shape[0] != length:
        _fail(path, f"expected length {length}, got {vec.shape[0]}")
    return vec


def parse_scenario_file(text: str) -> ScenarioFile:
    """Parse and validate a scenario document.

    Raises
    ------
    ScenarioValidationError
        Naming the offending field on any schema or invariant violation.
    """
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioValidationError(f"not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioValidationError("document root must be a mapping")

    schema = _get(doc, "schema", "")
    if schema != SCHEMA_TAG:
        _fail("schema", f"unrecognized schema {schema!r}; expected {SCHEMA_TAG!r}")

    plant_node = _get(doc, "plant", "")
    m = _matrix(_get(plant_node, "inertia", "plant"), "plant.inertia")
    n = m.shape[0]
    d = _matrix(_get(plant_node, "damping", "plant"), "plant.damping")
    k = _matrix(_get(plant_node, "stiffness", "plant"), "plant.stiffness")
    try:
        plant = ImpedanceParams(m=m, d=d, k=k)
    except ValueError as exc:
        raise ScenarioValidationError(f"plant: {exc}") from exc

    objectives = {}
    for who in ("human", "robot"):
        node = _get(doc, f"{who}_objective", "")
        path = f"{who}_objective"
        try:
            objectives[who] = AgentObjective(
                q_on_href=_matrix(_get(node, "q_on_human_ref", path), f"{path}.q_on_human_ref"),
                q_on_rref=_matrix(_get(node, "q_on_robot_ref", path), f"{path}.q_on_robot_ref"),
                r_self=_matrix(_get(node, "effort_weight", path), f"{path}.effort_weight"),
            )
        except (ValueError, IndefiniteWeightError) as exc:
            raise ScenarioValidationError(f"{path}: {exc}") from exc

    refs_node = _get(doc, "references", "")
    ref_vecs = {}
    for who in ("human", "robot"):
        node = _get(refs_node, who, "references")
        path = f"references.{who}"
        position = _vector(_get(node, "position", path), f"{path}.position", n)
        vel_node = _get(node, "velocity", path, required=False)
        velocity = (
            np.zeros(n) if vel_node is None else _vector(vel_node, f"{path}.velocity", n)
        )
        ref_vecs[who] = np.concatenate([position, velocity])
    refs = References(z_ref_h=ref_vecs["human"], z_ref_r=ref_vecs["robot"])

    game = _get(doc, "game", "")
    alpha = _number(_get(game, "alpha", "game"), "game.alpha")
    controller = _get(game, "controller", "game")
    if controller not in CONTROLLER_KINDS:
        _fail("game.controller", f"must be one of {list(CONTROLLER_KINDS)}, got {controller!r}")
    if not 0.0 < alpha < 1.0:
        _fail("game.alpha", f"must lie in the open interval (0, 1), got {alpha}")

    run = _get(doc, "run", "")
    duration = _number(_get(run, "duration", "run"), "run.duration")
    dt = _number(_get(run, "dt", "run"), "run.dt")
    init_pos_node = _get(run, "initial_position", "run", required=False)
    init_vel_node = _get(run, "initial_velocity", "run", required=False)
    # Parsed scenarios always carry an explicit initial state so that
    # serialize -> parse round-trips to the identical Scenario.
    pos = (
        np.zeros(n) if init_pos_node is None else _vector(init_pos_node, "run.initial_position", n)
    )
    vel = (
        np.zeros(n) if init_vel_node is None else _vector(init_vel_node, "run.initial_velocity", n)
    )
    initial_state = State(pos=pos, vel=vel)
    window_node = _get(run, "cost_window", "run", required=False)
    if window_node is None:
        cost_window = DEFAULT_COST_WINDOW
    else:
        w = _vector(window_node, "run.cost_window", 2)
        cost_window = (float(w[0]), float(w[1]))

    try:
        scenario = Scenario(
            plant=plant,
            human=objectives["human"],
            robot=objectives["robot"],
            refs=refs,
            alpha=alpha,
            controller=controller,
            duration=duration,
            dt=dt,
            initial_state=initial_state,
            cost_window=cost_window,
        )
    except ValueError as exc:
        raise ScenarioValidationError(str(exc)) from exc

    sweep_spec = None
    sweep_node = _get(doc, "sweep", "", required=False)
    if sweep_node is not None:
        parameter = _get(sweep_node, "parameter", "sweep")
        if parameter not in SWEEP_PARAMETERS:
            _fail("sweep.parameter", f"must be one of {list(SWEEP_PARAMETERS)}")
        values = _get(sweep_node, "values", "sweep")
        if not isinstance(values, list) or not values:
            _fail("sweep.values", "expected a non-empty list of numbers")
        sweep_spec = SweepSpec(
            parameter=parameter,
            values=tuple(_number(v, f"sweep.values[{i}]") for i, v in enumerate(values)),
        )

    return ScenarioFile(scenario=scenario, sweep=sweep_spec)


def load_scenario_file(path) -> ScenarioFile:
    text = Path(path).read_text(encoding="utf-8")
    return parse_scenario_file(text)


def _matrix_node(mat: np.ndarray) -> dict:
    mat = np.atleast_2d(mat)
    return {
        "rows": int(mat.shape[0]),
        "cols": int(mat.shape[1]),
        "data": [float(v) for v in mat.reshape(-1)],
    }


def scenario_to_mapping(sf: ScenarioFile) -> dict:
    """Plain mapping form of a scenario file; inverse of parsing."""
    scn = sf.scenario
    doc = {
        "schema": SCHEMA_TAG,
        "plant": {
            "inertia": _matrix_node(scn.plant.m),
            "damping": _matrix_node(scn.plant.d),
            "stiffness": _matrix_node(scn.plant.k),
        },
        "human_objective": {
            "q_on_human_ref": _matrix_node(scn.human.q_on_href),
            "q_on_robot_ref": _matrix_node(scn.human.q_on_rref),
            "effort_weight": _matrix_node(scn.human.r_self),
        },
        "robot_objective": {
            "q_on_human_ref": _matrix_node(scn.robot.q_on_href),
            "q_on_robot_ref": _matrix_node(scn.robot.q_on_rref),
            "effort_weight": _matrix_node(scn.robot.r_self),
        },
        "references": {
            "human": {
                "position": [float(v) for v in scn.refs.z_ref_h[: scn.plant.n]],
                "velocity": [float(v) for v in scn.refs.z_ref_h[scn.plant.n :]],
            },
            "robot": {
                "position": [float(v) for v in scn.refs.z_ref_r[: scn.plant.n]],
                "velocity": [float(v) for v in scn.refs.z_ref_r[scn.plant.n :]],
            },
        },
        "game": {"alpha": float(scn.alpha), "controller": scn.controller},
        "run": {
            "duration": float(scn.duration),
            "dt": float(scn.dt),
            "initial_position": [float(v) for v in scn.initial_vector()[: scn.plant.n]],
            "initial_velocity": [float(v) for v in scn.initial_vector()[scn.plant.n :]],
            "cost_window": [float(scn.cost_window[0]), float(scn.cost_window[1])],
        },
    }
    if sf.sweep is not None:
        doc["sweep"] = {
            "parameter": sf.sweep.parameter,
            "values": [float(v) for v in sf.sweep.values],
        }
    return doc


def render_scenario_file(sf: ScenarioFile) -> str:
    return yaml.safe_dump(scenario_to_mapping(sf), sort_keys=False)
