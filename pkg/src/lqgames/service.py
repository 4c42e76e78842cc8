"""Live human-in-the-loop service.

A session runs the closed loop at a fixed internal tick rate (250 Hz) and
streams decimated telemetry (50 Hz) over a WebSocket. The human side of
the loop starts out modeled; the first applied force switches the session
to live input, which is held for 200 ms and then ramped to zero over
100 ms so a silent client cannot leave a stale force on the plant.

`SessionCore` is the deterministic engine: one sequential owner of the
state, advanced tick by tick, with inputs applied only at tick boundaries.
All timing lives in the async wrapper, so replaying a recorded force trace
through a fresh core reproduces the telemetry stream exactly.

Wire protocol (JSON text messages, schema version 1):

    client -> server: {"v": 1, "session": id, "type": "apply_force",
                       "force": [..]}
                      {"v": 1, "session": id, "type": "set_alpha",
                       "alpha": x}
                      {"v": 1, "session": id, "type": "set_controller",
                       "controller": "cgt"|"lqr"|"ncgt"}
                      {"v": 1, "session": id, "type": "reset"}
    server -> client: telemetry, gains_changed, error (all carry "v",
                      "session", "type").
"""

from __future__ import annotations

import asyncio
import json
import uuid
from dataclasses import replace
from pathlib import Path

import numpy as np
from fastapi import FastAPI, WebSocket, WebSocketDisconnect

from .controllers import CONTROLLER_KINDS
from .dynamics import MAGNITUDE_GUARD, build_state_space, rk4_affine_step
from .errors import DivergenceError, LqGamesError
from .simulation import (
    Scenario,
    closed_loop_affine,
    effective_references,
    synthesize,
)

SCHEMA_VERSION = 1
TICK_RATE_HZ = 250
TELEMETRY_DECIMATION = 5  # 250 Hz / 5 = 50 Hz
HOLD_SECONDS = 0.2
DECAY_SECONDS = 0.1
FORCE_LIMIT_N = 50.0

__all__ = ["SessionCore", "start_session", "replay_trace", "build_app"]


class SessionCore:
    """Deterministic tick engine for one live session.

    The plant integrates at ``1 / tick_rate`` seconds per tick with the
    same affine Runge-Kutta kernel as the batch simulator, so a session
    left in modeled-human mode reproduces `run_closed_loop` exactly on the
    shared grid.
    """

    def __init__(
        self,
        scenario: Scenario,
        session_id: str | None = None,
        tick_rate: int = TICK_RATE_HZ,
        telemetry_decimation: int = TELEMETRY_DECIMATION,
        hold_seconds: float = HOLD_SECONDS,
        decay_seconds: float = DECAY_SECONDS,
        force_limit: float = FORCE_LIMIT_N,
    ):
        self.session_id = session_id or uuid.uuid4().hex[:12]
        self.dt = 1.0 / float(tick_rate)
        self.telemetry_decimation = int(telemetry_decimation)
        self.hold_ticks = int(round(hold_seconds * tick_rate))
        self.decay_ticks = int(round(decay_seconds * tick_rate))
        self.force_limit = float(force_limit)
        # The service owns its grid; the scenario's batch dt is not used here.
        self.scenario = replace(scenario, dt=self.dt)
        self.ss = build_state_space(scenario.plant)
        self._synthesize(self.scenario)
        self.z = self.scenario.initial_vector()
        self.tick_count = 0
        self.mode = "modeled-human"
        self._force = np.zeros(self.ss.n)
        self._force_tick = None
        self.input_trace: list[tuple[int, list[float]]] = []

    def _synthesize(self, scenario: Scenario):
        solution = synthesize(scenario, self.ss)
        ref_h, ref_r = effective_references(scenario, solution)
        m, c = closed_loop_affine(self.ss, solution, ref_h, ref_r)
        self.solution = solution
        self.ref_h, self.ref_r = ref_h, ref_r
        self._m_modeled, self._c_modeled = m, c
        self._m_live = self.ss.a - self.ss.b_r @ solution.k_r
        self._c_live_base = self.ss.b_r @ (solution.k_r @ ref_r)
        self.scenario = scenario

    # -- input ---------------------------------------------------------

    def apply_force(self, force) -> None:
        """Hold a live human force starting at the current tick."""
        force = np.asarray(force, dtype=float).reshape(-1)
        if force.shape != (self.ss.n,) or not np.all(np.isfinite(force)):
            raise ValueError(f"force must be a finite ({self.ss.n},) vector")
        force = np.clip(force, -self.force_limit, self.force_limit)
        self.mode = "live-human"
        self._force = force
        self._force_tick = self.tick_count
        self.input_trace.append((self.tick_count, [float(v) for v in force]))

    def held_force(self) -> np.ndarray:
        """Live force after zero-order hold and linear decay to zero."""
        if self._force_tick is None:
            return np.zeros(self.ss.n)
        age = self.tick_count - self._force_tick
        if age <= self.hold_ticks:
            return self._force
        if age < self.hold_ticks + self.decay_ticks:
            fade = 1.0 - (age - self.hold_ticks) / float(self.decay_ticks)
            return self._force * fade
        return np.zeros(self.ss.n)

    # -- control changes -----------------------------------------------

    def set_alpha(self, alpha: float) -> dict:
        """Re-synthesize with a new blending weight, atomically between ticks.

        On synthesis failure the previous gains stay active and the error
        propagates.
        """
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in the open interval (0, 1), got {alpha}")
        self._synthesize(replace(self.scenario, alpha=alpha))
        return self.gains_payload()

    def set_controller(self, kind: str) -> dict:
        if kind not in CONTROLLER_KINDS:
            raise ValueError(f"controller must be one of {CONTROLLER_KINDS}, got {kind!r}")
        self._synthesize(replace(self.scenario, controller=kind))
        return self.gains_payload()

    def reset(self) -> None:
        """Back to the initial state; tick restarts, live input cleared."""
        self.z = self.scenario.initial_vector()
        self.tick_count = 0
        self.mode = "modeled-human"
        self._force = np.zeros(self.ss.n)
        self._force_tick = None
        self.input_trace = []

    # -- stepping --------------------------------------------------------

    def tick(self) -> dict | None:
        """Emit telemetry for the current tick (if due), then advance one tick."""
        telemetry = None
        if self.tick_count % self.telemetry_decimation == 0:
            telemetry = self._telemetry()
        if self.mode == "live-human":
            u = self.held_force()
            self.z = rk4_affine_step(
                self._m_live, self._c_live_base + self.ss.b_h @ u, self.z, self.dt
            )
        else:
            self.z = rk4_affine_step(self._m_modeled, self._c_modeled, self.z, self.dt)
        if not np.all(np.isfinite(self.z)) or np.max(np.abs(self.z)) > MAGNITUDE_GUARD:
            raise DivergenceError("session state diverged")
        self.tick_count += 1
        return telemetry

    def _telemetry(self) -> dict:
        n = self.ss.n
        z = self.z
        nominal = -self.solution.k_h @ (z - self.ref_h)
        u_r = -self.solution.k_r @ (z - self.ref_r)
        u_h = self.held_force() if self.mode == "live-human" else nominal
        return {
            "v": SCHEMA_VERSION,
            "session": self.session_id,
            "type": "telemetry",
            "tick": self.tick_count,
            "time": self.tick_count * self.dt,
            "pos": [float(v) for v in z[:n]],
            "vel": [float(v) for v in z[n:]],
            "u_h": [float(v) for v in u_h],
            "u_r": [float(v) for v in u_r],
            "u_h_nominal": [float(v) for v in nominal],
            "z_ref": None
            if self.solution.z_ref is None
            else [float(v) for v in self.solution.z_ref],
            "mode": self.mode,
        }

    def gains_payload(self) -> dict:
        sol = self.solution
        return {
            "v": SCHEMA_VERSION,
            "session": self.session_id,
            "type": "gains_changed",
            "controller": sol.kind,
            "alpha": self.scenario.alpha,
            "k_h": [[float(v) for v in row] for row in np.atleast_2d(sol.k_h)],
            "k_r": [[float(v) for v in row] for row in np.atleast_2d(sol.k_r)],
            "z_ref": None if sol.z_ref is None else [float(v) for v in sol.z_ref],
            "targets": {
                "human": [float(v) for v in self.scenario.refs.z_ref_h],
                "robot": [float(v) for v in self.scenario.refs.z_ref_r],
            },
        }

    def error_payload(self, message: str) -> dict:
        return {
            "v": SCHEMA_VERSION,
            "session": self.session_id,
            "type": "error",
            "message": message,
        }


def start_session(scenario: Scenario, **kwargs) -> SessionCore:
    """Create the session engine, synthesizing the controller up front.

    Raises the underlying solver/validation error if the scenario cannot
    be synthesized, so no session exists on failure.
    """
    return SessionCore(scenario, **kwargs)


def replay_trace(scenario: Scenario, trace, ticks: int, **kwargs) -> list[dict]:
    """Re-run a recorded (tick, force) input trace; returns the telemetry stream."""
    core = SessionCore(scenario, session_id="replay", **kwargs)
    pending = sorted(trace, key=lambda item: item[0])
    idx = 0
    telemetry = []
    for _ in range(ticks):
        while idx < len(pending) and pending[idx][0] == core.tick_count:
            core.apply_force(pending[idx][1])
            idx += 1
        frame = core.tick()
        if frame is not None:
            telemetry.append(frame)
    return telemetry


# -- network layer -------------------------------------------------------


def build_app(scenario_dir=None, static_dir=None, pace: float = 1.0):
    """FastAPI app exposing /health, /scenarios, and the /session WebSocket.

    ``pace`` scales the wall-clock tick interval (1.0 = real time, 0 = as
    fast as the event loop allows; the latter is for tests).
    """
    from .scenario import load_scenario_file

    scenario_dir = Path(scenario_dir) if scenario_dir is not None else Path("scenarios")
    app = FastAPI(title="lqgames live service")

    def _scenario_names() -> list[str]:
        if not scenario_dir.is_dir():
            return []
        return sorted(p.stem for p in scenario_dir.glob("*.yaml"))

    @app.get("/health")
    def health():
        return {"status": "ok", "schema_version": SCHEMA_VERSION}

    @app.get("/scenarios")
    def scenarios():
        return {"scenarios": _scenario_names()}

    @app.websocket("/session")
    async def session_socket(ws: WebSocket, scenario: str | None = None):
        await ws.accept()
        names = _scenario_names()
        name = scenario or (names[0] if names else None)
        if name is None or name not in names:
            await ws.send_text(
                json.dumps(
                    {
                        "v": SCHEMA_VERSION,
                        "session": None,
                        "type": "error",
                        "message": f"unknown scenario {name!r}; available: {names}",
                    }
                )
            )
            await ws.close()
            return
        try:
            sf = load_scenario_file(scenario_dir / f"{name}.yaml")
            core = start_session(sf.scenario)
        except (LqGamesError, ValueError) as exc:
            await ws.send_text(
                json.dumps(
                    {
                        "v": SCHEMA_VERSION,
                        "session": None,
                        "type": "error",
                        "message": f"cannot start session: {exc}",
                    }
                )
            )
            await ws.close()
            return

        await ws.send_text(json.dumps(core.gains_payload()))
        inbox: asyncio.Queue = asyncio.Queue()

        async def reader():
            try:
                while True:
                    await inbox.put(await ws.receive_text())
            except WebSocketDisconnect:
                await inbox.put(None)
            except RuntimeError:
                await inbox.put(None)

        reader_task = asyncio.create_task(reader())
        interval = core.dt * pace
        try:
            while True:
                while not inbox.empty():
                    raw = inbox.get_nowait()
                    if raw is None:
                        return
                    reply = _handle_client_message(core, raw)
                    if reply is not None:
                        await ws.send_text(json.dumps(reply))
                try:
                    frame = core.tick()
                except DivergenceError as exc:
                    await ws.send_text(json.dumps(core.error_payload(str(exc))))
                    return
                if frame is not None:
                    await ws.send_text(json.dumps(frame))
                if interval > 0.0:
                    await asyncio.sleep(interval)
                else:
                    await asyncio.sleep(0)
        except (WebSocketDisconnect, RuntimeError):
            pass
        finally:
            reader_task.cancel()

    if static_dir is not None and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="static")

    return app


def _handle_client_message(core: SessionCore, raw: str) -> dict | None:
    """Apply one client message at a tick boundary; returns the reply, if any."""
    try:
        msg = json.loads(raw)
    except json.JSONDecodeError:
        return core.error_payload("message is not valid JSON")
    if not isinstance(msg, dict):
        return core.error_payload("message must be a JSON object")
    if msg.get("v") != SCHEMA_VERSION:
        return core.error_payload(f"unsupported schema version {msg.get('v')!r}")
    if msg.get("session") != core.session_id:
        return core.error_payload("stale session id")
    kind = msg.get("type")
    try:
        if kind == "apply_force":
            core.apply_force(msg.get("force"))
            return None
        if kind == "set_alpha":
            return core.set_alpha(msg.get("alpha"))
        if kind == "set_controller":
            return core.set_controller(msg.get("controller"))
        if kind == "reset":
            core.reset()
            # Re-announce gains so clients have a fresh synchronization point.
            return core.gains_payload()
        return core.error_payload(f"unknown message type {kind!r}")
    except (LqGamesError, ValueError, TypeError) as exc:
        return core.error_payload(str(exc))
