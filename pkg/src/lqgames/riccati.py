"""Continuous-time Lyapunov, Riccati, and coupled-Riccati solvers.

All solvers target the desk-scale problems this toolkit works with (state
dimension up to 20), so the Lyapunov kernel is a dense Kronecker-product
linear solve and the algebraic Riccati equation is solved by Newton
iteration on that kernel. The two-player feedback Nash system is solved by
damped best-response sweeps whose inner step is the single-equation solver.

Every returned solution carries its own residual, and gains are checked to
actually stabilize the closed loop before they are handed back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import StateSpace
from .errors import (
    IndefiniteWeightError,
    NoConvergenceError,
    NonHurwitzError,
    NoStabilizingSolutionError,
)

# Dense Kronecker solves scale as (2n)^6; cap the state dimension at desk scale.
MAX_STATE_DIM = 20

# Eigenvalue real parts must clear this margin for "Hurwitz".
HURWITZ_MARGIN = 1e-10

CARE_TOL_SCALE = 1e-9
LYAP_TOL_SCALE = 1e-10
COUPLED_TOL_SCALE = 1e-8
COUPLED_MAX_SWEEPS = 500

__all__ = [
    "CareProblem",
    "CareSolution",
    "solve_lyapunov",
    "solve_care",
    "solve_coupled_care",
]


def _require_symmetric(mat: np.ndarray, name: str) -> np.ndarray:
    mat = np.atleast_2d(np.asarray(mat, dtype=float))
    if mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got {mat.shape}")
    if not np.allclose(mat, mat.T, rtol=0.0, atol=1e-9 * (1.0 + np.abs(mat).max())):
        raise ValueError(f"{name} must be symmetric")
    return 0.5 * (mat + mat.T)


def _require_psd(mat: np.ndarray, name: str) -> np.ndarray:
    mat = _require_symmetric(mat, name)
    eigs = np.linalg.eigvalsh(mat)
    if eigs.size and eigs[0] < -1e-9 * (1.0 + abs(eigs[-1])):
        raise ValueError(f"{name} must be positive semi-definite (min eig {eigs[0]:.3e})")
    return mat


def _require_pd(mat: np.ndarray, name: str) -> np.ndarray:
    mat = _require_symmetric(mat, name)
    try:
        np.linalg.cholesky(mat)
    except np.linalg.LinAlgError:
        raise IndefiniteWeightError(f"{name} must be symmetric positive definite") from None
    return mat


@dataclass(frozen=True)
class CareProblem:
    """Data (a, b, q, r) of one algebraic Riccati equation.

    The equation solved is ``0 = a' p + p a - p b r^-1 b' p + q`` with
    symmetric PSD ``q`` and symmetric PD ``r``. Stabilizability of (a, b)
    is not checked up front; it surfaces as solver non-convergence.
    """

    a: np.ndarray
    b: np.ndarray
    q: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.a, dtype=float))
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError(f"a must be square, got {a.shape}")
        if n > MAX_STATE_DIM:
            raise ValueError(f"state dimension {n} exceeds the supported maximum {MAX_STATE_DIM}")
        b = np.asarray(self.b, dtype=float).reshape(n, -1)
        if b.shape[1] < 1:
            raise ValueError("b must have at least one column")
        q = _require_psd(self.q, "q")
        if q.shape != (n, n):
            raise ValueError(f"q must be {n}x{n}, got {q.shape}")
        r = _require_pd(self.r, "r")
        if r.shape != (b.shape[1], b.shape[1]):
            raise ValueError(f"r must be {b.shape[1]}x{b.shape[1]}, got {r.shape}")
        for name, mat in (("a", a), ("b", b)):
            if not np.all(np.isfinite(mat)):
                raise ValueError(f"{name} contains non-finite entries")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "r", r)


@dataclass(frozen=True)
class CareSolution:
    """Stabilizing Riccati solution with its feedback gain and residual."""

    p: np.ndarray
    gain: np.ndarray
    residual: float


def solve_lyapunov(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Solve the continuous-time Lyapunov equation ``a' x + x a + q = 0``.

    Parameters
    ----------
    a : (n, n) array_like
        Coefficient matrix; must be Hurwitz (all eigenvalue real parts
        strictly negative).
    q : (n, n) array_like
        Symmetric right-hand side.

    Returns
    -------
    (n, n) ndarray
        The unique symmetric solution, via a dense Kronecker-product solve
        with one step of iterative refinement. Residual is bounded by
        ``1e-10 * (1 + ||q||_F)``.

    Raises
    ------
    NonHurwitzError
        If ``a`` has an eigenvalue with real part >= -1e-12.

    Notes
    -----
    The Kronecker formulation is O(n^6) and only sensible at desk scale;
    ``MAX_STATE_DIM`` guards against misuse.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError(f"a must be square, got {a.shape}")
    if n > MAX_STATE_DIM:
        raise ValueError(f"state dimension {n} exceeds the supported maximum {MAX_STATE_DIM}")
    q = _require_symmetric(q, "q")
    if q.shape != (n, n):
        raise ValueError(f"q must be {n}x{n}, got {q.shape}")
    eigs = np.linalg.eigvals(a)
    if np.max(eigs.real) >= -1e-12:
        raise NonHurwitzError(
            f"a must be Hurwitz; max eigenvalue real part {np.max(eigs.real):.3e}"
        )
    return _lyapunov_kron(a, q)


def _lyapunov_kron(a: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Kronecker solve of a'x + xa + q = 0 with one refinement pass. No checks."""
    n = a.shape[0]
    eye = np.eye(n)
    coeff = np.kron(eye, a.T) + np.kron(a.T, eye)
    rhs = -q.reshape(-1)
    x = np.linalg.solve(coeff, rhs)
    x = x + np.linalg.solve(coeff, rhs - coeff @ x)
    x = x.reshape(n, n)
    return 0.5 * (x + x.T)


def _bass_stabilizing_gain(a: np.ndarray, b: np.ndarray, extra: float) -> np.ndarray:
    """Initial stabilizing gain via the Bass shifted-Lyapunov construction.

    With beta exceeding every |Re eig(a)|, the matrix -(a + beta I) is
    Hurwitz and z from (a + beta I) z + z (a + beta I)' = 2 b b' is the
    (positive semi-definite) controllability Gramian of the shifted system.
    The gain k = b' z^+ then satisfies (a - b k) z + z (a - b k)' = -2 beta z,
    which certifies a stabilizing closed loop whenever z is nonsingular.
    """
    beta = float(np.max(np.abs(np.linalg.eigvals(a).real))) + extra
    g = -(a + beta * np.eye(a.shape[0]))
    # _lyapunov_kron solves a'x + xa + q = 0; with coefficient g' this is
    # g z + z g' + 2bb' = 0, the shifted-Gramian equation.
    z = _lyapunov_kron(g.T, 2.0 * (b @ b.T))
    return b.T @ np.linalg.pinv(z, rcond=1e-13, hermitian=True)


def _initial_stabilizing_gain(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if np.max(np.linalg.eigvals(a).real) < -HURWITZ_MARGIN:
        return np.zeros((b.shape[1], a.shape[0]))
    extra = 0.5
    for _ in range(6):
        k = _bass_stabilizing_gain(a, b, extra)
        if np.max(np.linalg.eigvals(a - b @ k).real) < -HURWITZ_MARGIN:
            return k
        extra *= 4.0
    raise NoStabilizingSolutionError(
        "could not construct an initial stabilizing gain; (a, b) may not be stabilizable"
    )


def _care_residual_norm(a, b, q, rinv, p) -> float:
    res = a.T @ p + p @ a - p @ b @ rinv @ b.T @ p + q
    return float(np.linalg.norm(res, "fro"))


def solve_care(prob: CareProblem) -> CareSolution:
    """Solve one algebraic Riccati equation for its stabilizing solution.

    Newton iteration (Kleinman form): starting from a stabilizing gain,
    each step solves one Lyapunov equation

        (a - b k)' p + p (a - b k) + q + k' r k = 0,   k <- r^-1 b' p,

    which converges quadratically and monotonically to the stabilizing
    solution. The initial gain comes from the Bass shifted-Gramian
    construction when ``a`` is not already Hurwitz. Iteration continues
    past the acceptance tolerance until the residual stops improving, so
    the returned solution sits at the numerical floor of the problem.

    Parameters
    ----------
    prob : CareProblem
        Validated equation data.

    Returns
    -------
    CareSolution
        Symmetric ``p``, gain ``r^-1 b' p``, and the Frobenius norm of the
        equation residual, guaranteed <= ``1e-9 * (1 + ||q||_F)``.

    Raises
    ------
    NoStabilizingSolutionError
        If no stabilizing initial gain can be built, the iteration budget
        runs out above tolerance, or the final closed loop is not Hurwitz.
    """
    a, b, q, r = prob.a, prob.b, prob.q, prob.r
    if not np.any(q):
        # Zero state weight: the optimal policy spends nothing, so p = 0 and
        # gain = 0 regardless of plant stability (an inactive player). The
        # closed loop then simply inherits the open-loop dynamics.
        zero = np.zeros_like(a)
        return CareSolution(p=zero, gain=np.zeros((b.shape[1], a.shape[0])), residual=0.0)
    rinv = np.linalg.inv(r)
    tol = CARE_TOL_SCALE * (1.0 + float(np.linalg.norm(q, "fro")))
    k = _initial_stabilizing_gain(a, b)

    best_p = None
    best_k = None
    best_res = np.inf
    for _ in range(60):
        a_cl = a - b @ k
        if np.max(np.linalg.eigvals(a_cl).real) >= 0.0:
            # Numerical loss of stabilization mid-iteration; fall back to best.
            break
        p = _lyapunov_kron(a_cl, q + k.T @ r @ k)
        k = rinv @ b.T @ p
        res = _care_residual_norm(a, b, q, rinv, p)
        improved = res < best_res
        if improved:
            best_p, best_k, best_res = p, k, res
        if best_res <= tol and not improved:
            # Below tolerance and at the residual floor; stop polishing.
            break

    if best_p is None or best_res > tol:
        raise NoStabilizingSolutionError(
            f"Newton iteration did not reach tolerance {tol:.3e}; best residual {best_res:.3e}"
        )
    closed = np.linalg.eigvals(a - b @ best_k)
    if np.max(closed.real) >= -HURWITZ_MARGIN:
        raise NoStabilizingSolutionError(
            f"converged solution does not stabilize: max closed-loop real part {np.max(closed.real):.3e}"
        )
    return CareSolution(p=0.5 * (best_p + best_p.T), gain=best_k, residual=best_res)


def _coupled_residuals(a, s_h, s_r, q_h, q_r, cross_h, cross_r, p_h, p_r):
    """Residual norms of both players' coupled equations.

    Player i's equation, with j the opponent and S_i = b_i r_ii^-1 b_i':

        0 = (a - S_j p_j)' p_i + p_i (a - S_j p_j) - p_i S_i p_i + q_i
            + p_j b_j r_jj^-1 r_ij r_jj^-1 b_j' p_j

    where the last term is present only for nonzero cross effort weights.
    """
    a_h = a - s_r @ p_r
    a_r = a - s_h @ p_h
    res_h = a_h.T @ p_h + p_h @ a_h - p_h @ s_h @ p_h + q_h
    res_r = a_r.T @ p_r + p_r @ a_r - p_r @ s_r @ p_r + q_r
    if cross_h is not None:
        res_h = res_h + cross_h(p_r)
    if cross_r is not None:
        res_r = res_r + cross_r(p_h)
    return float(np.linalg.norm(res_h, "fro")), float(np.linalg.norm(res_r, "fro"))


def solve_coupled_care(
    ss: StateSpace,
    q_h: np.ndarray,
    q_r: np.ndarray,
    r_h: np.ndarray,
    r_r: np.ndarray,
    r_hr: np.ndarray | None = None,
    r_rh: np.ndarray | None = None,
    damping: float = 0.5,
    max_sweeps: int = COUPLED_MAX_SWEEPS,
) -> tuple[CareSolution, CareSolution]:
    """Solve the two-player feedback-Nash coupled Riccati system.

    Damped Gauss-Seidel best-response iteration from p = 0: each sweep
    re-solves one player's single Riccati equation against the opponent's
    current closed loop and blends the update,

        p_i <- (1 - damping) p_i + damping * care(a - S_j p_j, b_i, q_i~, r_ii),

    where ``q_i~`` absorbs the opponent-effort cross weight ``r_ij`` when one
    is supplied (the opponent's feedback turns ``u_j' r_ij u_j`` into a state
    cost). The fixed point of this map is exactly the feedback Nash
    condition. Sweeps continue past the convergence tolerance while the
    residual keeps improving, then stop at the numerical floor.

    Parameters
    ----------
    ss : StateSpace or (a, b_h, b_r) tuple
        Plant carrying ``a``, ``b_h``, ``b_r``. A plain matrix triple is
        accepted so games of any state dimension (not only the impedance
        plant's even 2n) can be solved.
    q_h, q_r : array_like
        Per-player symmetric PSD state weights.
    r_h, r_r : array_like
        Per-player symmetric PD own-effort weights.
    r_hr, r_rh : array_like, optional
        Cross effort weights (human's weight on robot effort and vice
        versa). Default None means zero, the standard coupled system.
    damping : float
        Blend factor in (0, 1] for the best-response update.
    max_sweeps : int
        Sweep budget before giving up.

    Returns
    -------
    (CareSolution, CareSolution)
        Human and robot solutions; each residual is that player's coupled
        equation residual, both <= ``1e-8 * (1 + max ||q_i||_F)``, and the
        joint closed loop ``a - S_h p_h - S_r p_r`` is Hurwitz.

    Raises
    ------
    NoConvergenceError
        If the budget is exhausted above tolerance, an inner solve fails, or
        the joint closed loop is not stable at the fixed point. Carries the
        last residual pair.
    """
    if isinstance(ss, StateSpace):
        a, b_h, b_r = ss.a, ss.b_h, ss.b_r
    else:
        a, b_h, b_r = ss
        a = np.atleast_2d(np.asarray(a, dtype=float))
        b_h = np.asarray(b_h, dtype=float).reshape(a.shape[0], -1)
        b_r = np.asarray(b_r, dtype=float).reshape(a.shape[0], -1)
    q_h = _require_psd(q_h, "q_h")
    q_r = _require_psd(q_r, "q_r")
    r_h = _require_pd(r_h, "r_h")
    r_r = _require_pd(r_r, "r_r")
    if not 0.0 < damping <= 1.0:
        raise ValueError(f"damping must be in (0, 1], got {damping}")

    rinv_h = np.linalg.inv(r_h)
    rinv_r = np.linalg.inv(r_r)
    s_h = b_h @ rinv_h @ b_h.T
    s_r = b_r @ rinv_r @ b_r.T

    cross_h = cross_r = None
    if r_hr is not None and np.any(np.asarray(r_hr) != 0.0):
        w_h = b_r @ rinv_r @ _require_symmetric(r_hr, "r_hr") @ rinv_r @ b_r.T

        def cross_h(p):
            return p @ w_h @ p

    if r_rh is not None and np.any(np.asarray(r_rh) != 0.0):
        w_r = b_h @ rinv_h @ _require_symmetric(r_rh, "r_rh") @ rinv_h @ b_h.T

        def cross_r(p):
            return p @ w_r @ p

    dim = a.shape[0]
    p_h = np.zeros((dim, dim))
    p_r = np.zeros((dim, dim))
    q_scale = 1.0 + max(float(np.linalg.norm(q_h, "fro")), float(np.linalg.norm(q_r, "fro")))
    tol = COUPLED_TOL_SCALE * q_scale
    floor = 1e-13 * q_scale

    res_h = res_r = np.inf
    best = np.inf
    stall = 0
    for _ in range(max_sweeps):
        try:
            q_h_eff = q_h if cross_h is None else q_h + cross_h(p_r)
            p_h = (1.0 - damping) * p_h + damping * solve_care(
                CareProblem(a=a - s_r @ p_r, b=b_h, q=q_h_eff, r=r_h)
            ).p
            q_r_eff = q_r if cross_r is None else q_r + cross_r(p_h)
            p_r = (1.0 - damping) * p_r + damping * solve_care(
                CareProblem(a=a - s_h @ p_h, b=b_r, q=q_r_eff, r=r_r)
            ).p
        except (NoStabilizingSolutionError, ValueError) as exc:
            raise NoConvergenceError(
                f"best-response sweep failed: {exc}", residuals=(res_h, res_r)
            ) from exc
        res_h, res_r = _coupled_residuals(a, s_h, s_r, q_h, q_r, cross_h, cross_r, p_h, p_r)
        worst = max(res_h, res_r)
        stall = stall + 1 if worst >= 0.9 * best else 0
        best = min(best, worst)
        if worst <= floor or (worst <= tol and stall >= 3):
            break

    if max(res_h, res_r) > tol:
        raise NoConvergenceError(
            f"coupled iteration exhausted {max_sweeps} sweeps; residuals "
            f"({res_h:.3e}, {res_r:.3e}) above tolerance {tol:.3e}",
            residuals=(res_h, res_r),
        )
    joint = np.linalg.eigvals(a - s_h @ p_h - s_r @ p_r)
    if np.max(joint.real) >= -HURWITZ_MARGIN:
        raise NoConvergenceError(
            f"fixed point does not stabilize the joint loop (max real part "
            f"{np.max(joint.real):.3e})",
            residuals=(res_h, res_r),
        )
    k_h = rinv_h @ b_h.T @ p_h
    k_r = rinv_r @ b_r.T @ p_r
    return (
        CareSolution(p=0.5 * (p_h + p_h.T), gain=k_h, residual=res_h),
        CareSolution(p=0.5 * (p_r + p_r.T), gain=k_r, residual=res_r),
    )
