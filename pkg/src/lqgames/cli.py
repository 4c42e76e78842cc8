"""Command-line front end: gains, simulate, sweep, serve.

Exit codes: 0 success, 1 usage, 2 scenario validation, 3 solver failure,
4 I/O. Numeric output uses 17 significant digits so CSV values round-trip
exactly to the doubles that produced them.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import simulation
from .controllers import impedance_equivalent
from .dynamics import build_state_space
from .errors import LqGamesError, ScenarioValidationError
from .scenario import parse_scenario_file
from .simulation import SWEEP_PARAMETERS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_SOLVER = 3
EXIT_IO = 4

__all__ = ["main"]


class _UsageError(Exception):
    pass


class _IoError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that raises instead of calling sys.exit(2)."""

    def error(self, message):
        raise _UsageError(message)


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _fmt_matrix(mat: np.ndarray) -> str:
    mat = np.atleast_2d(mat)
    return "\n".join("  [" + ", ".join(_fmt(v) for v in row) + "]" for row in mat)


def _load(path: str):
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise _IoError(f"cannot read scenario {p}: {exc}") from exc
    return parse_scenario_file(text)


def _write_text(path: Path, text: str):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise _IoError(f"cannot write {path}: {exc}") from exc


def _trajectory_csv(traj) -> str:
    n = traj.n
    cols = (
        ["time"]
        + [f"pos_{i}" for i in range(n)]
        + [f"vel_{i}" for i in range(n)]
        + [f"u_h_{i}" for i in range(n)]
        + [f"u_r_{i}" for i in range(n)]
        + [f"u_h_nominal_{i}" for i in range(n)]
    )
    lines = [",".join(cols)]
    for i in range(traj.times.shape[0]):
        row = [traj.times[i]]
        row.extend(traj.pos[i])
        row.extend(traj.vel[i])
        row.extend(traj.u_h[i])
        row.extend(traj.u_r[i])
        row.extend(traj.u_h_nominal[i])
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _costs_csv(costs) -> str:
    header = "j_h,j_r,window_start,window_end"
    row = ",".join(_fmt(v) for v in (costs.j_h, costs.j_r, costs.window[0], costs.window[1]))
    return header + "\n" + row + "\n"


def _cmd_gains(args) -> int:
    sf = _load(args.scenario)
    scn = sf.scenario
    ss = build_state_space(scn.plant)
    sol = simulation.synthesize(scn, ss)
    out = []
    out.append(f"controller: {sol.kind}")
    out.append(f"alpha: {_fmt(scn.alpha)}")
    out.append("K_h:")
    out.append(_fmt_matrix(sol.k_h))
    out.append("K_r:")
    out.append(_fmt_matrix(sol.k_r))
    if sol.z_ref is not None:
        out.append("z_ref: [" + ", ".join(_fmt(v) for v in sol.z_ref) + "]")
    out.append(
        "ARE residuals: [" + ", ".join(_fmt(r) for r in sol.residuals) + "]"
    )
    closed = np.linalg.eigvals(ss.a - ss.b_h @ sol.k_h - ss.b_r @ sol.k_r)
    out.append(
        "closed-loop eigenvalues: ["
        + ", ".join(f"{v.real:.6g}{v.imag:+.6g}j" for v in closed)
        + "]"
    )
    ref_h, ref_r = simulation.effective_references(scn, sol)
    modified, forcing = impedance_equivalent(scn.plant, sol.k_r, ref_r[: scn.plant.n])
    out.append("equivalent impedance damping D':")
    out.append(_fmt_matrix(modified.d))
    out.append("equivalent impedance stiffness K':")
    out.append(_fmt_matrix(modified.k))
    out.append("equivalent constant force: [" + ", ".join(_fmt(v) for v in forcing) + "]")
    print("\n".join(out))
    return EXIT_OK


def _cmd_simulate(args) -> int:
    sf = _load(args.scenario)
    scn = sf.scenario
    traj = simulation.run_closed_loop(scn)
    costs = simulation.compute_costs(traj, scn)
    out_dir = Path(args.out)
    _write_text(out_dir / "trajectory.csv", _trajectory_csv(traj))
    _write_text(out_dir / "costs.csv", _costs_csv(costs))
    print(f"wrote {out_dir / 'trajectory.csv'} and {out_dir / 'costs.csv'}")
    return EXIT_OK


def _summary_csv(results, n: int) -> str:
    cols = (
        ["value"]
        + [f"equilibrium_{i}" for i in range(n)]
        + ["peak_u_h", "peak_u_r", "j_h", "j_r", "error"]
    )
    lines = [",".join(cols)]
    for res in results:
        if res.error is not None:
            row = [_fmt(res.value)] + [""] * (n + 4) + [res.error.replace(",", ";")]
        else:
            traj = res.trajectory
            row = [_fmt(res.value)]
            row.extend(_fmt(v) for v in traj.pos[-1])
            row.append(_fmt(np.max(np.linalg.norm(traj.u_h, axis=1))))
            row.append(_fmt(np.max(np.linalg.norm(traj.u_r, axis=1))))
            row.append(_fmt(res.costs.j_h))
            row.append(_fmt(res.costs.j_r))
            row.append("")
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def _cmd_sweep(args) -> int:
    sf = _load(args.scenario)
    scn = sf.scenario
    param = args.param or (sf.sweep.parameter if sf.sweep else None)
    if param is None:
        raise _UsageError("no sweep parameter given (use --param or a sweep block)")
    if param not in SWEEP_PARAMETERS:
        raise _UsageError(f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMETERS}")
    if args.values is not None:
        tokens = [t for t in args.values.split(",") if t.strip()]
        if not tokens:
            raise _UsageError("empty --values list")
        try:
            values = [float(t) for t in tokens]
        except ValueError as exc:
            raise _UsageError(f"bad --values entry: {exc}") from exc
    elif sf.sweep is not None:
        values = list(sf.sweep.values)
    else:
        raise _UsageError("no sweep values given (use --values or a sweep block)")
    if not values:
        raise _UsageError("sweep requires at least one value")

    results = simulation.sweep(scn, param, values)
    out_dir = Path(args.out)
    for res in results:
        if res.trajectory is not None:
            name = f"trajectory_{param}_{res.value!r}.csv"
            _write_text(out_dir / name, _trajectory_csv(res.trajectory))
    _write_text(out_dir / "summary.csv", _summary_csv(results, scn.plant.n))
    failures = [r for r in results if r.error is not None]
    print(
        f"swept {param} over {len(values)} values; {len(failures)} failed; "
        f"summary at {out_dir / 'summary.csv'}"
    )
    return EXIT_OK


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    app = build_app(scenario_dir=Path(args.scenarios), static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="lqgames", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gains = sub.add_parser("gains", help="print synthesized gains and references")
    p_gains.add_argument("--scenario", required=True, help="scenario file path")
    p_gains.set_defaults(func=_cmd_gains)

    p_sim = sub.add_parser("simulate", help="run one closed-loop episode to CSV")
    p_sim.add_argument("--scenario", required=True)
    p_sim.add_argument("--out", required=True, help="output directory")
    p_sim.set_defaults(func=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="run a parameter sweep to CSV")
    p_sweep.add_argument("--scenario", required=True)
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--param", choices=SWEEP_PARAMETERS)
    p_sweep.add_argument("--values", help="comma-separated values")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_serve = sub.add_parser("serve", help="run the live human-in-the-loop service")
    p_serve.add_argument("--port", type=int, default=8400)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--scenarios", default="scenarios", help="scenario directory")
    p_serve.add_argument("--static", default=None, help="static asset directory to serve")
    p_serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ScenarioValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except _IoError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (LqGamesError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
