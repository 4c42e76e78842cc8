"""Impedance-modeled plant: state-space construction and fixed-step integration.

The plant is a virtual mass-spring-damper driven by two force inputs,

    M a + D v + K dx = u_h + u_r

written in state-space form with state z = [dx, v]:

    dz/dt = A z + B_h u_h + B_r u_r,
    A = [[0, I], [-M^-1 K, -M^-1 D]],   B_h = B_r = [[0], [M^-1]].

Everything here is a pure function on immutable value types.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, SingularInertiaError

# Reciprocal condition number below which the inertia matrix counts as singular.
RCOND_LIMIT = 1e-12

# Any state entry beyond this magnitude is treated as a diverged integration.
MAGNITUDE_GUARD = 1e12

__all__ = [
    "ImpedanceParams",
    "StateSpace",
    "State",
    "build_state_space",
    "step",
    "rk4_affine_step",
]


def _as_matrix(value, n: int, name: str) -> np.ndarray:
    mat = np.array(value, dtype=float)
    if mat.ndim == 0:
        mat = mat.reshape(1, 1)
    if mat.shape != (n, n):
        raise ValueError(f"{name} must be {n}x{n}, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{name} contains non-finite entries")
    return mat


def _as_vector(value, n: int, name: str) -> np.ndarray:
    vec = np.atleast_1d(np.array(value, dtype=float)).reshape(-1)
    if vec.shape != (n,):
        raise ValueError(f"{name} must have length {n}, got {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ValueError(f"{name} contains non-finite entries")
    return vec


@dataclass(frozen=True)
class ImpedanceParams:
    """Virtual inertia, damping, and stiffness of the rendered plant.

    ``m`` must be symmetric and invertible (physically: symmetric positive
    definite); ``d`` needs a non-negative diagonal and ``k`` may be zero,
    the common choice for force-guided interaction.
    """

    m: np.ndarray
    d: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.array(self.m, dtype=float))
        n = m.shape[0]
        m = _as_matrix(m, n, "m")
        d = _as_matrix(self.d, n, "d")
        k = _as_matrix(self.k, n, "k")
        if not np.allclose(m, m.T, rtol=0.0, atol=1e-9 * (1.0 + np.abs(m).max())):
            raise ValueError("m must be symmetric")
        if np.any(np.diag(d) < 0.0):
            raise ValueError("d must have a non-negative diagonal")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "k", k)

    @property
    def n(self) -> int:
        """Number of Cartesian degrees of freedom."""
        return self.m.shape[0]


@dataclass(frozen=True)
class State:
    """Plant state: displacement from the virtual equilibrium plus velocity."""

    pos: np.ndarray
    vel: np.ndarray

    def __post_init__(self):
        pos = np.atleast_1d(np.array(self.pos, dtype=float)).reshape(-1)
        vel = _as_vector(self.vel, pos.shape[0], "vel")
        if not np.all(np.isfinite(pos)):
            raise ValueError("pos contains non-finite entries")
        object.__setattr__(self, "pos", pos)
        object.__setattr__(self, "vel", vel)

    @property
    def n(self) -> int:
        return self.pos.shape[0]

    def as_vector(self) -> np.ndarray:
        """Stacked [pos, vel] vector of length 2n."""
        return np.concatenate([self.pos, self.vel])

    @staticmethod
    def from_vector(z: np.ndarray) -> "State":
        z = np.asarray(z, dtype=float).reshape(-1)
        n = z.shape[0] // 2
        return State(pos=z[:n], vel=z[n:])


@dataclass(frozen=True)
class StateSpace:
    """Two-input linear system dz/dt = a z + b_h u_h + b_r u_r."""

    a: np.ndarray
    b_h: np.ndarray
    b_r: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.array(self.a, dtype=float))
        if a.shape[0] != a.shape[1] or a.shape[0] % 2 != 0:
            raise ValueError(f"a must be square with even size, got {a.shape}")
        n = a.shape[0] // 2
        b_h = np.array(self.b_h, dtype=float).reshape(2 * n, -1)
        b_r = np.array(self.b_r, dtype=float).reshape(2 * n, -1)
        for name, mat in (("a", a), ("b_h", b_h), ("b_r", b_r)):
            if not np.all(np.isfinite(mat)):
                raise ValueError(f"{name} contains non-finite entries")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b_h", b_h)
        object.__setattr__(self, "b_r", b_r)

    @property
    def n(self) -> int:
        """DOF count (state dimension is 2n)."""
        return self.a.shape[0] // 2

    def stacked_b(self) -> np.ndarray:
        """Both input matrices side by side, [b_h b_r]."""
        return np.hstack([self.b_h, self.b_r])


def build_state_space(params: ImpedanceParams) -> StateSpace:
    """Assemble the two-input state-space plant from impedance parameters.

    Parameters
    ----------
    params : ImpedanceParams
        Virtual inertia/damping/stiffness. The inertia matrix must be
        invertible; its reciprocal condition number is checked against
        ``RCOND_LIMIT``.

    Returns
    -------
    StateSpace
        System with ``a = [[0, I], [-M^-1 K, -M^-1 D]]`` and both input
        matrices equal to ``[[0], [M^-1]]``.

    Raises
    ------
    SingularInertiaError
        If the inertia matrix is singular or numerically close to it.
    """
    n = params.n
    svals = np.linalg.svd(params.m, compute_uv=False)
    rcond = float(svals[-1] / svals[0]) if svals[0] > 0.0 else 0.0
    if rcond < RCOND_LIMIT:
        raise SingularInertiaError(
            f"inertia matrix is singular within rcond {RCOND_LIMIT:g} (rcond={rcond:.3e})"
        )
    m_inv = np.linalg.inv(params.m)
    a = np.zeros((2 * n, 2 * n))
    a[:n, n:] = np.eye(n)
    a[n:, :n] = -m_inv @ params.k
    a[n:, n:] = -m_inv @ params.d
    b = np.vstack([np.zeros((n, n)), m_inv])
    return StateSpace(a=a, b_h=b, b_r=b.copy())


def rk4_affine_step(m: np.ndarray, c: np.ndarray, z: np.ndarray, dt: float) -> np.ndarray:
    """One classical Runge-Kutta step of dz/dt = m z + c with constant m, c."""
    k1 = m @ z + c
    k2 = m @ (z + 0.5 * dt * k1) + c
    k3 = m @ (z + 0.5 * dt * k2) + c
    k4 = m @ (z + dt * k3) + c
    return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def step(ss: StateSpace, z: State, u_h, u_r, dt: float) -> State:
    """Advance the plant by one fixed step under constant inputs.

    Parameters
    ----------
    ss : StateSpace
        The plant.
    z : State
        Current state.
    u_h, u_r : array_like
        Human and robot forces, held constant over the step.
    dt : float
        Step length in seconds, strictly positive.

    Returns
    -------
    State
        The state advanced by ``dt`` with a classical 4th-order step.

    Raises
    ------
    DivergenceError
        If the result is non-finite or exceeds the magnitude guard.
    """
    if not dt > 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    n = ss.n
    uh = _as_vector(u_h, ss.b_h.shape[1], "u_h")
    ur = _as_vector(u_r, ss.b_r.shape[1], "u_r")
    if z.n != n:
        raise ValueError(f"state has {z.n} DOFs, plant has {n}")
    c = ss.b_h @ uh + ss.b_r @ ur
    z_next = rk4_affine_step(ss.a, c, z.as_vector(), dt)
    if not np.all(np.isfinite(z_next)) or np.max(np.abs(z_next)) > MAGNITUDE_GUARD:
        raise DivergenceError("state exceeded the magnitude guard; integration diverged")
    return State.from_vector(z_next)
