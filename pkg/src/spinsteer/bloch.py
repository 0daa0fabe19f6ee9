"""Bloch-vector dynamics under a time-dependent magnetic field.

The spin expectation value S = 2<s>/hbar precesses according to

    dS/dt = gamma * B(t) x S,

with the cross-product sign fixed so that a constant field
B = (0, pi/(gamma*t_f), 0) drives (0,0,1) -> (0,0,-1) over t_f (the
textbook pi pulse).  In spherical coordinates
S = (sin(th) cos(ph), sin(th) sin(ph), cos(th)) this is equivalent to

    th' = gamma (By cos(ph) - Bx sin(ph)),
    ph' = gamma [Bz - cot(th) (Bx cos(ph) + By sin(ph))],

which is the form every synthesis route in this package inverts.

Integration is fixed-step classical RK4 (default 4000 steps per t_f);
deterministic by construction, no adaptive stepping.  Everything here is
a pure function over immutable values and safe to call concurrently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import IntegrationError, PreconditionError

DEFAULT_STEPS = 4000

__all__ = [
    "DEFAULT_STEPS",
    "BlochVector",
    "FieldProtocol",
    "BlochTrajectory",
    "integrate_bloch",
    "bloch_angles",
    "flip_deficit",
]


@dataclass(frozen=True)
class BlochVector:
    """Unit 3-vector of spin expectation values (dimensionless)."""

    sx: float
    sy: float
    sz: float

    def as_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz], dtype=float)

    def norm(self) -> float:
        return float(np.sqrt(self.sx**2 + self.sy**2 + self.sz**2))

    @staticmethod
    def from_array(v, tol: float = 1e-9) -> "BlochVector":
        v = np.asarray(v, dtype=float)
        if v.shape != (3,):
            raise PreconditionError(f"Bloch vector must have 3 components, got shape {v.shape}")
        n = float(np.linalg.norm(v))
        if abs(n - 1.0) > tol:
            raise PreconditionError(f"Bloch vector must be unit norm within {tol}, got |S| = {n!r}")
        return BlochVector(float(v[0]), float(v[1]), float(v[2]))


@dataclass(frozen=True)
class FieldProtocol:
    """Three magnetic-field components on [0, t_f], evaluable at arbitrary t.

    `evaluator` maps an array of times, shape (n,), to field samples of
    shape (n, 3).  Closed-form evaluators are kept so integrators may
    sample off any export grid; every synthesis route guarantees the
    evaluation is finite on all of [0, t_f], including removable
    singularity points.
    """

    t_f: float
    evaluator: Callable[[np.ndarray], np.ndarray]
    metadata: dict = field(default_factory=dict)

    def __call__(self, t) -> np.ndarray:
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.asarray(self.evaluator(t_arr), dtype=float)
        if np.isscalar(t) or np.ndim(t) == 0:
            return out[0]
        return out

    def samples(self, n: int = 2001) -> tuple[np.ndarray, np.ndarray]:
        """Uniform grid export: (times (n,), fields (n, 3))."""
        t = np.linspace(0.0, self.t_f, n)
        return t, self(t)

    def node_samples(self, n_steps: int) -> np.ndarray:
        """Field at the 2*n_steps + 1 RK4 node times (step ends and midpoints)."""
        t = np.linspace(0.0, self.t_f, 2 * n_steps + 1)
        b = self(t)
        bad = ~np.isfinite(b)
        if bad.any():
            i = int(np.argwhere(bad.any(axis=1))[0, 0])
            raise IntegrationError(f"field evaluation is not finite at t = {t[i]!r}")
        return b

    @staticmethod
    def constant(bx: float, by: float, bz: float, t_f: float, **metadata) -> "FieldProtocol":
        vec = np.array([bx, by, bz], dtype=float)

        def evaluator(t: np.ndarray) -> np.ndarray:
            return np.broadcast_to(vec, (t.size, 3)).copy()

        return FieldProtocol(t_f=float(t_f), evaluator=evaluator,
                             metadata={"method": "constant", **metadata})


@dataclass(frozen=True)
class BlochTrajectory:
    """Spin trajectory on a uniform time grid (n_steps + 1 points on [0, t_f])."""

    times: np.ndarray          # (n+1,)
    vectors: np.ndarray        # (n+1, 3)

    @property
    def t_f(self) -> float:
        return float(self.times[-1])

    def final(self) -> BlochVector:
        v = self.vectors[-1]
        return BlochVector(float(v[0]), float(v[1]), float(v[2]))

    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.vectors, axis=1)

    def max_norm_drift(self) -> float:
        return float(np.abs(self.norms() - 1.0).max())


# --------------------------------------------------------------------------
# RK4 kernel
# --------------------------------------------------------------------------

def rk4_spins(s0: np.ndarray, bx: np.ndarray, by: np.ndarray, bz: np.ndarray,
              gammas, dt: float, n_steps: int, store: bool = False) -> np.ndarray:
    """Batched fixed-step RK4 for dS/dt = gamma * B(t) x S.

    s0       : (..., 3) initial vectors; the leading shape is the batch.
    bx,by,bz : field components at the 2*n_steps+1 node times, shape
               (2n+1,) for a shared field or batch_shape + (2n+1,) for
               per-spin fields (broadcast against the batch).
    gammas   : scalar or array broadcastable to the batch shape.
    store    : if True return the full trajectory (n_steps+1, ..., 3),
               otherwise just the final vectors (..., 3).

    The node layout is node[2k] = t_k, node[2k+1] = t_k + dt/2.
    """
    s0 = np.asarray(s0, dtype=float)
    g = np.asarray(gammas, dtype=float)
    sx = np.broadcast_to(s0[..., 0], s0.shape[:-1]).copy()
    sy = np.broadcast_to(s0[..., 1], s0.shape[:-1]).copy()
    sz = np.broadcast_to(s0[..., 2], s0.shape[:-1]).copy()

    if store:
        out = np.empty((n_steps + 1,) + sx.shape + (3,), dtype=float)
        out[0, ..., 0], out[0, ..., 1], out[0, ..., 2] = sx, sy, sz

    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(n_steps):
        i0 = 2 * k
        i1 = i0 + 1
        i2 = i0 + 2
        bx0, by0, bz0 = bx[..., i0], by[..., i0], bz[..., i0]
        bx1, by1, bz1 = bx[..., i1], by[..., i1], bz[..., i1]
        bx2, by2, bz2 = bx[..., i2], by[..., i2], bz[..., i2]

        k1x = g * (by0 * sz - bz0 * sy)
        k1y = g * (bz0 * sx - bx0 * sz)
        k1z = g * (bx0 * sy - by0 * sx)

        ax, ay, az = sx + half * k1x, sy + half * k1y, sz + half * k1z
        k2x = g * (by1 * az - bz1 * ay)
        k2y = g * (bz1 * ax - bx1 * az)
        k2z = g * (bx1 * ay - by1 * ax)

        ax, ay, az = sx + half * k2x, sy + half * k2y, sz + half * k2z
        k3x = g * (by1 * az - bz1 * ay)
        k3y = g * (bz1 * ax - bx1 * az)
        k3z = g * (bx1 * ay - by1 * ax)

        ax, ay, az = sx + dt * k3x, sy + dt * k3y, sz + dt * k3z
        k4x = g * (by2 * az - bz2 * ay)
        k4y = g * (bz2 * ax - bx2 * az)
        k4z = g * (bx2 * ay - by2 * ax)

        sx = sx + sixth * (k1x + 2.0 * (k2x + k3x) + k4x)
        sy = sy + sixth * (k1y + 2.0 * (k2y + k3y) + k4y)
        sz = sz + sixth * (k1z + 2.0 * (k2z + k3z) + k4z)

        if store:
            out[k + 1, ..., 0], out[k + 1, ..., 1], out[k + 1, ..., 2] = sx, sy, sz

    if store:
        return out
    return np.stack([sx, sy, sz], axis=-1)


# --------------------------------------------------------------------------
# Public operations
# --------------------------------------------------------------------------

def integrate_bloch(s0, field: FieldProtocol, gamma: float,
                    n_steps: int = DEFAULT_STEPS) -> BlochTrajectory:
    """Integrate dS/dt = gamma B(t) x S with fixed-step RK4.

    The initial vector must be unit norm within 1e-9 and n_steps >= 16;
    gamma may have either sign but not be zero by convention of use.
    """
    if isinstance(s0, BlochVector):
        v0 = s0.as_array()
    else:
        v0 = np.asarray(s0, dtype=float)
    if abs(np.linalg.norm(v0) - 1.0) > 1e-9:
        raise PreconditionError(
            f"initial spin must be unit norm within 1e-9, got |S0| = {np.linalg.norm(v0)!r}")
    if n_steps < 16:
        raise PreconditionError(f"n_steps must be >= 16, got {n_steps}")

    b = field.node_samples(n_steps)
    dt = field.t_f / n_steps
    traj = rk4_spins(v0, b[:, 0], b[:, 1], b[:, 2], float(gamma), dt, n_steps, store=True)
    times = np.linspace(0.0, field.t_f, n_steps + 1)
    vectors = traj.reshape(n_steps + 1, 3)
    vectors[0] = v0  # endpoint exactly S0
    return BlochTrajectory(times=times, vectors=vectors)


POLE_TOL = 1e-12


def bloch_angles(traj: BlochTrajectory) -> tuple[np.ndarray, np.ndarray]:
    """Spherical angles (theta, phi) along a trajectory.

    theta = arccos(sz) in [0, pi]; phi = atan2(sy, sx) unwrapped to a
    continuous branch.  At poles (|sz| > 1 - 1e-12) the azimuth is
    undefined and carries forward the previous value (0.0 before the
    first off-pole point).
    """
    v = traj.vectors
    theta = np.arccos(np.clip(v[:, 2], -1.0, 1.0))
    at_pole = np.abs(v[:, 2]) > 1.0 - POLE_TOL
    raw = np.arctan2(v[:, 1], v[:, 0])

    phi = np.empty_like(raw)
    last = 0.0
    for i in range(len(raw)):
        if at_pole[i]:
            phi[i] = last
        else:
            # shift by 2*pi*k to stay on the branch closest to the last value
            k = np.round((last - raw[i]) / (2.0 * np.pi))
            phi[i] = raw[i] + 2.0 * np.pi * k
            last = phi[i]
    return theta, phi


def flip_deficit(traj: BlochTrajectory) -> float:
    """Probability (1 + sz(t_f))/2 of having missed the flip, clamped to [0, 1]."""
    return float(np.clip((1.0 + traj.vectors[-1, 2]) / 2.0, 0.0, 1.0))
