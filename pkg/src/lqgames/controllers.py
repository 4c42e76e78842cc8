"""Controller synthesis: cooperative, per-agent LQR, and feedback-Nash gains.

Each agent carries a quadratic objective over deviations from the two
targets plus its own effort,

    J_i = integral (z - z_h)' Q_{i,h} (z - z_h)
                  + (z - z_r)' Q_{i,r} (z - z_r) + u_i' R_i u_i  dt.

The cooperative controller blends the two objectives with a weight
``alpha`` in (0, 1), reducing the game to a single LQ problem over the
stacked input [u_h, u_r] with

    Q = alpha (Q_hh + Q_hr) + (1 - alpha)(Q_rh + Q_rr),
    R = blockdiag(alpha R_h, (1 - alpha) R_r),

and both agents track one agreed reference, the Q-weighted blend of their
individual targets. The LQR and Nash controllers reuse the same per-agent
aggregated state weights but keep each agent on its own target.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .dynamics import ImpedanceParams, State, StateSpace
from .errors import NoStabilizingSolutionError, SingularWeightError
from .riccati import (
    CareProblem,
    CareSolution,
    _require_pd,
    _require_psd,
    solve_care,
    solve_coupled_care,
)

__all__ = [
    "AgentObjective",
    "References",
    "CgtAggregate",
    "GameSolution",
    "cgt_aggregate",
    "shared_reference",
    "synthesize_cgt",
    "synthesize_lqr",
    "synthesize_ncgt",
    "control_action",
    "impedance_equivalent",
]

CONTROLLER_KINDS = ("cgt", "lqr", "ncgt")


@dataclass(frozen=True)
class AgentObjective:
    """One player's weights: on the human target, the robot target, own effort."""

    q_on_href: np.ndarray
    q_on_rref: np.ndarray
    r_self: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "q_on_href", _require_psd(self.q_on_href, "q_on_href"))
        object.__setattr__(self, "q_on_rref", _require_psd(self.q_on_rref, "q_on_rref"))
        object.__setattr__(self, "r_self", _require_pd(self.r_self, "r_self"))


@dataclass(frozen=True)
class References:
    """Individual target states (length 2n; velocity part usually zero)."""

    z_ref_h: np.ndarray
    z_ref_r: np.ndarray

    def __post_init__(self):
        zh = np.asarray(self.z_ref_h, dtype=float).reshape(-1)
        zr = np.asarray(self.z_ref_r, dtype=float).reshape(-1)
        if zh.shape != zr.shape:
            raise ValueError(f"reference shapes differ: {zh.shape} vs {zr.shape}")
        if not (np.all(np.isfinite(zh)) and np.all(np.isfinite(zr))):
            raise ValueError("references must be finite")
        object.__setattr__(self, "z_ref_h", zh)
        object.__setattr__(self, "z_ref_r", zr)


@dataclass(frozen=True)
class CgtAggregate:
    """Blended cooperative weights for a given alpha.

    ``q_gt = q_h_agg + q_r_agg`` holds by construction; ``r_gt`` is block
    diagonal with blocks ``alpha R_h`` and ``(1 - alpha) R_r``.
    """

    alpha: float
    q_gt: np.ndarray
    r_gt: np.ndarray
    q_h_agg: np.ndarray
    q_r_agg: np.ndarray


@dataclass(frozen=True)
class GameSolution:
    """Synthesized feedback gains of one controller.

    ``z_ref`` is the agreed reference and is present only for the
    cooperative kind; the other controllers feed back on each agent's own
    target. ``p_matrices`` holds the backing Riccati solution(s) and
    ``residuals`` their equation residual norms, in the same order.
    """

    kind: str
    k_h: np.ndarray
    k_r: np.ndarray
    z_ref: np.ndarray | None
    p_matrices: tuple[np.ndarray, ...]
    residuals: tuple[float, ...]


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in the open interval (0, 1), got {alpha}")
    return alpha


def cgt_aggregate(alpha: float, human: AgentObjective, robot: AgentObjective) -> CgtAggregate:
    """Blend the two agents' weights into the cooperative LQ weights.

    The combined state weight collects both agents' full state costs; the
    per-reference aggregates collect the terms multiplying each target:

        q_h_agg = alpha Q_hh + (1 - alpha) Q_rh   (human-target terms)
        q_r_agg = alpha Q_hr + (1 - alpha) Q_rr   (robot-target terms)

    so q_gt = q_h_agg + q_r_agg exactly.
    """
    alpha = _check_alpha(alpha)
    q_h_agg = alpha * human.q_on_href + (1.0 - alpha) * robot.q_on_href
    q_r_agg = alpha * human.q_on_rref + (1.0 - alpha) * robot.q_on_rref
    q_gt = q_h_agg + q_r_agg
    n = human.r_self.shape[0]
    r_gt = np.zeros((2 * n, 2 * n))
    r_gt[:n, :n] = alpha * human.r_self
    r_gt[n:, n:] = (1.0 - alpha) * robot.r_self
    return CgtAggregate(alpha=alpha, q_gt=q_gt, r_gt=r_gt, q_h_agg=q_h_agg, q_r_agg=q_r_agg)


def shared_reference(agg: CgtAggregate, refs: References) -> np.ndarray:
    """Agreed cooperative reference: the weight-blended target.

    Solves ``q_gt z_ref = q_h_agg z_ref_h + q_r_agg z_ref_r``. For scalar
    weight structure this is the convex combination of the two targets.
    When ``q_gt`` is singular, the minimum-norm solution is used, which
    puts zero in the unweighted (null-space) directions; those components
    do not affect the cost and a warning flags them.

    Raises
    ------
    SingularWeightError
        If ``q_gt`` is singular and the weighted right-hand side is not in
        its range, i.e. some weighted component is left undetermined.
    """
    rhs = agg.q_h_agg @ refs.z_ref_h + agg.q_r_agg @ refs.z_ref_r
    q = agg.q_gt
    scale = float(np.abs(q).max()) if q.size else 0.0
    svals = np.linalg.svd(q, compute_uv=False) if q.size else np.array([0.0])
    if scale > 0.0 and svals[-1] > 1e-12 * svals[0]:
        return np.linalg.solve(q, rhs)
    z_ref = np.linalg.pinv(q, hermitian=True) @ rhs
    if not np.allclose(q @ z_ref, rhs, rtol=0.0, atol=1e-9 * (1.0 + np.abs(rhs).max())):
        raise SingularWeightError(
            "combined state weight is singular and the weighted targets are inconsistent"
        )
    warnings.warn(
        "combined state weight is singular; unweighted reference components set to 0",
        stacklevel=2,
    )
    return z_ref


def _require_detectable(a: np.ndarray, q: np.ndarray):
    """PBH detectability of (a, q): unstable modes must be seen by the cost.

    A mode with eigenvalue real part >= 0 lying in the null space of ``q``
    makes the LQ problem degenerate (no stabilizing solution exists).
    """
    n = a.shape[0]
    for lam in np.linalg.eigvals(a):
        if lam.real < -1e-10:
            continue
        stacked = np.vstack([a - lam * np.eye(n), q])
        smin = np.linalg.svd(stacked, compute_uv=False)[-1]
        if smin < 1e-9 * (1.0 + np.abs(a).max() + np.abs(q).max()):
            raise NoStabilizingSolutionError(
                f"combined state weight does not detect the unstable mode at {lam:.4g}; "
                "no stabilizing cooperative solution exists"
            )


def synthesize_cgt(
    ss: StateSpace,
    alpha: float,
    human: AgentObjective,
    robot: AgentObjective,
    refs: References,
) -> GameSolution:
    """Cooperative controller: one Riccati solve over the stacked input.

    The stacked gain splits row-wise into the human gain (first n rows)
    and the robot gain (last n rows); both agents share the agreed
    reference.
    """
    agg = cgt_aggregate(alpha, human, robot)
    _require_detectable(ss.a, agg.q_gt)
    z_ref = shared_reference(agg, refs)
    b = ss.stacked_b()
    sol = solve_care(CareProblem(a=ss.a, b=b, q=agg.q_gt, r=agg.r_gt))
    n = ss.n
    return GameSolution(
        kind="cgt",
        k_h=sol.gain[:n, :],
        k_r=sol.gain[n:, :],
        z_ref=z_ref,
        p_matrices=(sol.p,),
        residuals=(sol.residual,),
    )


def synthesize_lqr(
    ss: StateSpace,
    alpha: float,
    human: AgentObjective,
    robot: AgentObjective,
    refs: References,
) -> GameSolution:
    """Independent per-agent LQR gains, each ignoring the other player.

    State weights are the same per-agent aggregates as in the cooperative
    case; each agent tracks its own target.
    """
    agg = cgt_aggregate(alpha, human, robot)
    sol_h = solve_care(CareProblem(a=ss.a, b=ss.b_h, q=agg.q_h_agg, r=human.r_self))
    sol_r = solve_care(CareProblem(a=ss.a, b=ss.b_r, q=agg.q_r_agg, r=robot.r_self))
    return GameSolution(
        kind="lqr",
        k_h=sol_h.gain,
        k_r=sol_r.gain,
        z_ref=None,
        p_matrices=(sol_h.p, sol_r.p),
        residuals=(sol_h.residual, sol_r.residual),
    )


def synthesize_ncgt(
    ss: StateSpace,
    alpha: float,
    human: AgentObjective,
    robot: AgentObjective,
    refs: References,
    r_hr: np.ndarray | None = None,
    r_rh: np.ndarray | None = None,
) -> GameSolution:
    """Feedback-Nash gains from the coupled Riccati system.

    Same aggregated state weights as the cooperative case, each agent on
    its own target. Cross effort weights default to zero.
    """
    agg = cgt_aggregate(alpha, human, robot)
    sol_h, sol_r = solve_coupled_care(
        ss, agg.q_h_agg, agg.q_r_agg, human.r_self, robot.r_self, r_hr=r_hr, r_rh=r_rh
    )
    return GameSolution(
        kind="ncgt",
        k_h=sol_h.gain,
        k_r=sol_r.gain,
        z_ref=None,
        p_matrices=(sol_h.p, sol_r.p),
        residuals=(sol_h.residual, sol_r.residual),
    )


def control_action(gain: np.ndarray, z, ref: np.ndarray) -> np.ndarray:
    """Feedback force -K (z - ref). ``z`` may be a State or a raw vector."""
    gain = np.atleast_2d(np.asarray(gain, dtype=float))
    vec = z.as_vector() if isinstance(z, State) else np.asarray(z, dtype=float).reshape(-1)
    ref = np.asarray(ref, dtype=float).reshape(-1)
    if gain.shape[1] != vec.shape[0] or vec.shape[0] != ref.shape[0]:
        raise ValueError(
            f"dimension mismatch: gain {gain.shape}, state {vec.shape}, ref {ref.shape}"
        )
    return -gain @ (vec - ref)


def impedance_equivalent(
    params: ImpedanceParams, k_r: np.ndarray, x_ref: np.ndarray
) -> tuple[ImpedanceParams, np.ndarray]:
    """Fold the robot's feedback into the virtual impedance.

    Splitting the robot gain into position and velocity blocks,
    ``k_r = [K_rp K_rv]``, the robot's feedback is equivalent to stiffer
    virtual dynamics plus a constant force:

        damping' = D + K_rv,  stiffness' = K + K_rp,  force = K_rp x_ref.

    Simulating the returned plant with the human input alone reproduces
    the original plant under human input plus robot feedback.
    """
    n = params.n
    k_r = np.atleast_2d(np.asarray(k_r, dtype=float))
    if k_r.shape != (n, 2 * n):
        raise ValueError(f"k_r must be {n}x{2 * n}, got {k_r.shape}")
    x_ref = np.asarray(x_ref, dtype=float).reshape(-1)
    if x_ref.shape != (n,):
        raise ValueError(f"x_ref must have length {n}, got {x_ref.shape}")
    k_rp = k_r[:, :n]
    k_rv = k_r[:, n:]
    modified = ImpedanceParams(m=params.m, d=params.d + k_rv, k=params.k + k_rp)
    return modified, k_rp @ x_ref
