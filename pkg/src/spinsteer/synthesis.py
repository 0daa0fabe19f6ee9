"""Field synthesis: invert an imposed state evolution for B(t).

Three independent routes are implemented, each fixing the longitudinal
degree of freedom differently:

* precession route -- impose the Bloch angles theta(s), phi(s) on
  s = t/t_f together with Bz = B0 cos(theta) and solve the precession
  equations for the transverse components:

      Bx = [-theta' sin(phi) - phi' tan(theta) cos(phi)]/(gamma t_f)
           + B0 sin(theta) cos(phi)
      By = [ theta' cos(phi) - phi' tan(theta) sin(phi)]/(gamma t_f)
           + B0 sin(theta) sin(phi)

* evolution-operator route -- parameterize the 2x2 propagator by the
  population amplitude r(t) and relative phase Phi(t), expand
  i dU/dt U* on the Pauli basis:

      Bx = (2/gamma) [r sqrt(1-r^2) Phi' cos(Phi) + (r'/sqrt(1-r^2)) sin(Phi)]
      By = (2/gamma) [r sqrt(1-r^2) Phi' sin(Phi) - (r'/sqrt(1-r^2)) cos(Phi)]
      Bz = (2/gamma) r^2 Phi'

  (signs chosen so the flip example reproduces the constant pi-pulse
  field +pi/(gamma t_f), matching the Bloch convention in `bloch`)

* modulus-phase (Madelung) route -- impose the population imbalance
  Delta_n(t) and relative phase theta(t) of a|+> + b|->:

      Bx = Delta_n' / (gamma sqrt(1-Delta_n^2) sin(theta))
      By = 0
      Bz = [theta' + Delta_n' Delta_n cos(theta)/((1-Delta_n^2) sin(theta))]/gamma

  These formulas follow the amplitude-equation phase convention; see
  `twolevel.integrate_spinor` (sign = -1) for the matching integrator.

Removable singularities (tan(theta) at theta = pi/2 crossings, the
r -> 1 endpoint of flip paths) are evaluated by their analytic limits
inside a window of half-width 1e-6 in s and by the exact closed form
outside it, keeping every synthesized component finite and smooth on
the whole interval.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bloch import FieldProtocol
from .errors import PreconditionError, SynthesisError

SINGULARITY_WINDOW = 1e-6     # half-width in s around a tan(theta) crossing
CROSSING_DPHI_TOL = 1e-10     # |dphi/ds| allowed at a crossing

__all__ = [
    "eval_phi_ansatz",
    "PhiAnsatz",
    "PolarPath",
    "synth_precession",
    "EvolutionOperatorPath",
    "synth_from_evolution_operator",
    "MadelungPath",
    "synth_madelung",
    "family_field_nodes",
]


# --------------------------------------------------------------------------
# Azimuthal ansatz
# --------------------------------------------------------------------------

def eval_phi_ansatz(kappa, eta, s):
    """phi = kappa [s + (eta-1) s^2 - 2 eta s^3 + eta s^4] and two derivatives.

    Boundary values phi(0) = phi(1) = 0 and dphi/ds(1/2) = 0 hold
    analytically for every (kappa, eta).  Broadcasts over all inputs.
    """
    s = np.asarray(s, dtype=float)
    kappa = np.asarray(kappa, dtype=float)
    eta = np.asarray(eta, dtype=float)
    phi = kappa * (s + (eta - 1.0) * s**2 - 2.0 * eta * s**3 + eta * s**4)
    dphi = kappa * (1.0 + 2.0 * (eta - 1.0) * s - 6.0 * eta * s**2 + 4.0 * eta * s**3)
    d2phi = kappa * (2.0 * (eta - 1.0) - 12.0 * eta * s + 12.0 * eta * s**2)
    return phi, dphi, d2phi


@dataclass(frozen=True)
class PhiAnsatz:
    """Two-parameter polynomial azimuth family phi(s; kappa, eta)."""

    kappa: float
    eta: float

    def __call__(self, s):
        return eval_phi_ansatz(self.kappa, self.eta, s)


# --------------------------------------------------------------------------
# Precession route
# --------------------------------------------------------------------------

def _default_theta(s):
    s = np.asarray(s, dtype=float)
    return np.pi * s, np.full_like(s, np.pi)


@dataclass(frozen=True)
class PolarPath:
    """Imposed Bloch-sphere path for the precession route.

    theta : callable s -> (theta, dtheta/ds) on s in [0, 1], or None for
            the default flip ramp theta = pi s.  A custom theta must be
            twice continuously differentiable.
    phi   : callable s -> (phi, dphi/ds, d2phi/ds2); normally a PhiAnsatz.
    """

    phi: Callable
    b0: float
    t_f: float
    theta: Optional[Callable] = None
    flip: bool = True

    def __post_init__(self):
        if self.t_f <= 0.0:
            raise PreconditionError(f"t_f must be positive, got {self.t_f}")
        if self.flip:
            th0, _ = self.theta_eval(0.0)
            th1, _ = self.theta_eval(1.0)
            if abs(float(th0)) > 1e-12 or abs(float(th1) - np.pi) > 1e-12:
                raise PreconditionError(
                    "flip path requires theta(0) = 0 and theta(1) = pi, got "
                    f"theta(0) = {float(th0)!r}, theta(1) = {float(th1)!r}")

    def theta_eval(self, s):
        if self.theta is None:
            return _default_theta(s)
        th, dth = self.theta(np.asarray(s, dtype=float))
        return np.asarray(th, dtype=float), np.asarray(dth, dtype=float)

    def crossings(self) -> list[float]:
        """Values of s where theta crosses pi/2 (tan(theta) diverges)."""
        if self.theta is None:
            return [0.5]
        s = np.linspace(0.0, 1.0, 4001)
        th, _ = self.theta_eval(s)
        g = th - np.pi / 2.0
        out = []
        for i in range(len(s) - 1):
            if g[i] == 0.0:
                out.append(float(s[i]))
            elif g[i] * g[i + 1] < 0.0:
                lo, hi = s[i], s[i + 1]
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    gm = float(self.theta_eval(mid)[0]) - np.pi / 2.0
                    if gm == 0.0:
                        lo = hi = mid
                        break
                    if g[i] * gm < 0.0:
                        hi = mid
                    else:
                        lo = mid
                out.append(0.5 * (lo + hi))
        if g[-1] == 0.0:
            out.append(1.0)
        return out


def synth_precession(path: PolarPath, gamma: float) -> FieldProtocol:
    """Transverse field components for an imposed (theta, phi) path.

    Bz = B0 cos(theta) by construction.  At every s* where theta crosses
    pi/2 the imposed azimuth must satisfy dphi/ds(s*) = 0 (checked to
    1e-10); the product dphi/ds * tan(theta) is then evaluated by its
    limit -phi''(s*)/theta'(s*) inside the singularity window.
    """
    if gamma == 0.0:
        raise PreconditionError("gamma must be nonzero")

    stars = path.crossings()
    limits = []
    for s_star in stars:
        _, dphi, d2phi = path.phi(s_star)
        _, dth = path.theta_eval(s_star)
        if abs(float(dphi)) > CROSSING_DPHI_TOL:
            raise SynthesisError(
                "unremovable singularity: dphi/ds = "
                f"{float(dphi)!r} at the theta = pi/2 crossing s = {s_star!r}")
        limits.append(-float(d2phi) / float(dth))

    b0 = float(path.b0)
    t_f = float(path.t_f)
    gtf = float(gamma) * t_f

    def evaluator(t: np.ndarray) -> np.ndarray:
        s = t / t_f
        th, dth = path.theta_eval(s)
        ph, dphi, _ = path.phi(s)
        prod = dphi * np.tan(th)
        for s_star, lim in zip(stars, limits):
            prod = np.where(np.abs(s - s_star) < SINGULARITY_WINDOW, lim, prod)
        cph, sph = np.cos(ph), np.sin(ph)
        sth = np.sin(th)
        bx = (-dth * sph - prod * cph) / gtf + b0 * sth * cph
        by = (dth * cph - prod * sph) / gtf + b0 * sth * sph
        bz = b0 * np.cos(th)
        return np.stack([np.broadcast_to(bx, s.shape),
                         np.broadcast_to(by, s.shape),
                         np.broadcast_to(bz, s.shape)], axis=-1)

    meta = {"method": "precession", "B0": b0, "gamma": float(gamma), "t_f": t_f}
    if isinstance(path.phi, PhiAnsatz):
        meta["kappa"] = path.phi.kappa
        meta["eta"] = path.phi.eta
    return FieldProtocol(t_f=t_f, evaluator=evaluator, metadata=meta)


def family_field_nodes(kappas, etas, gamma1: float, b0: float, t_f: float,
                       n_steps: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized precession-route fields for the (kappa, eta) ansatz family.

    kappas and etas broadcast against each other to a batch shape K;
    returns (bx, by, bz) with shape K + (2*n_steps + 1,) at the RK4 node
    times of the default flip ramp theta = pi s.  Used by the scan and
    robustness machinery, where thousands of protocol evaluations per
    second matter; agrees with `synth_precession` on the same inputs.
    """
    kap = np.asarray(kappas, dtype=float)
    eta = np.asarray(etas, dtype=float)
    kap, eta = np.broadcast_arrays(kap, eta)
    shape = kap.shape
    kap = kap[..., np.newaxis]
    eta = eta[..., np.newaxis]

    s = np.linspace(0.0, 1.0, 2 * n_steps + 1)
    ph, dphi, _ = eval_phi_ansatz(kap, eta, s)
    th = np.pi * s
    _, _, d2phi_star = eval_phi_ansatz(kap, eta, 0.5)
    lim = -d2phi_star / np.pi
    prod = np.where(np.abs(s - 0.5) < SINGULARITY_WINDOW, lim, dphi * np.tan(th))

    gtf = gamma1 * t_f
    cph, sph = np.cos(ph), np.sin(ph)
    sth, cth = np.sin(th), np.cos(th)
    bx = (-np.pi * sph - prod * cph) / gtf + b0 * sth * cph
    by = (np.pi * cph - prod * sph) / gtf + b0 * sth * sph
    bz = np.broadcast_to(b0 * cth, shape + s.shape).copy()
    return bx, by, bz


# --------------------------------------------------------------------------
# Evolution-operator route
# --------------------------------------------------------------------------

RHO_TOL = 1e-12


@dataclass(frozen=True)
class EvolutionOperatorPath:
    """Propagator parameterization (r, Phi) for the operator route.

    r        : callable t -> (r, dr/dt) with r in [0, 1].
    phi_rel  : callable t -> (Phi, dPhi/dt), the relative phase.
    ratio    : optional callable t -> dr/dt / sqrt(1 - r^2).  Supply it for
               paths that touch r = 1 with an analytically cancelled
               divergence (e.g. r = cos(theta) gives ratio = -dtheta/dt);
               without it, r = 1 points require dr/dt -> 0 fast enough
               that the ratio vanishes there.
    """

    t_f: float
    r: Callable
    phi_rel: Callable
    ratio: Optional[Callable] = None

    @classmethod
    def half_flip(cls, t_f: float) -> "EvolutionOperatorPath":
        """Spin flip |+> -> |->: r = cos(pi t/(2 t_f)), Phi = 0."""
        w = np.pi / (2.0 * t_f)

        def r_eval(t):
            return np.cos(w * t), -w * np.sin(w * t)

        def phi_eval(t):
            z = np.zeros_like(np.asarray(t, dtype=float))
            return z, z

        def ratio(t):
            return np.full_like(np.asarray(t, dtype=float), -w)

        return cls(t_f=float(t_f), r=r_eval, phi_rel=phi_eval, ratio=ratio)

    @classmethod
    def from_polar(cls, t_f: float, theta: Callable,
                   phi_rel: Optional[Callable] = None) -> "EvolutionOperatorPath":
        """r = cos(theta(t)) for theta: t -> (theta, dtheta/dt); the
        1/sqrt(1-r^2) divergence cancels analytically to -dtheta/dt."""
        def r_eval(t):
            th, dth = theta(t)
            return np.cos(th), -dth * np.sin(th)

        def ratio(t):
            _, dth = theta(t)
            return -dth

        if phi_rel is None:
            def phi_rel(t):  # noqa: F811 - default zero phase
                z = np.zeros_like(np.asarray(t, dtype=float))
                return z, z

        return cls(t_f=float(t_f), r=r_eval, phi_rel=phi_rel, ratio=ratio)

    def bloch_vector(self, t) -> np.ndarray:
        """Bloch path traced by U(t)|+>: (2 r rho cos(Phi), 2 r rho sin(Phi), 2 r^2 - 1)."""
        t = np.asarray(t, dtype=float)
        r, _ = self.r(t)
        ph, _ = self.phi_rel(t)
        r = np.clip(np.asarray(r, dtype=float), -1.0, 1.0)
        rho = np.sqrt(1.0 - r * r)
        return np.stack([2.0 * r * rho * np.cos(ph),
                         2.0 * r * rho * np.sin(ph),
                         2.0 * r * r - 1.0], axis=-1)


def synth_from_evolution_operator(path: EvolutionOperatorPath, gamma: float) -> FieldProtocol:
    """Field components from the propagator parameterization (r, Phi)."""
    if gamma == 0.0:
        raise PreconditionError("gamma must be nonzero")
    t_f = float(path.t_f)

    # validate the divergence structure on a dense grid before handing out
    # an evaluator, so bad paths fail at synthesis time with a clear message
    t_check = np.linspace(0.0, t_f, 2001)
    r, rdot = path.r(t_check)
    r = np.asarray(r, dtype=float)
    if (np.abs(r) > 1.0 + 1e-12).any():
        raise PreconditionError("r(t) must stay within [0, 1]")
    if path.ratio is None:
        rho2 = np.clip(1.0 - r * r, 0.0, None)
        bad = (rho2 < RHO_TOL**2) & (np.abs(np.asarray(rdot, dtype=float)) > 1e-10)
        if bad.any():
            i = int(np.argwhere(bad)[0, 0])
            raise SynthesisError(
                f"divergent denominator: r = 1 with dr/dt != 0 at t = {t_check[i]!r}; "
                "supply an analytic ratio evaluator")

    two_over_g = 2.0 / float(gamma)

    def evaluator(t: np.ndarray) -> np.ndarray:
        r, rdot = path.r(t)
        ph, phd = path.phi_rel(t)
        r = np.clip(np.asarray(r, dtype=float), -1.0, 1.0)
        rho = np.sqrt(np.clip(1.0 - r * r, 0.0, None))
        if path.ratio is not None:
            ratio = np.asarray(path.ratio(t), dtype=float)
        else:
            ratio = np.divide(rdot, rho, out=np.zeros_like(rho), where=rho >= RHO_TOL)
        cph, sph = np.cos(ph), np.sin(ph)
        bx = two_over_g * (r * rho * phd * cph + ratio * sph)
        by = two_over_g * (r * rho * phd * sph - ratio * cph)
        bz = two_over_g * r * r * phd
        shape = np.asarray(t, dtype=float).shape
        return np.stack([np.broadcast_to(bx, shape),
                         np.broadcast_to(by, shape),
                         np.broadcast_to(bz, shape)], axis=-1)

    return FieldProtocol(t_f=t_f, evaluator=evaluator,
                         metadata={"method": "evolution_operator",
                                   "gamma": float(gamma), "t_f": t_f})


# --------------------------------------------------------------------------
# Modulus-phase (Madelung) route
# --------------------------------------------------------------------------

SIN_THETA_TOL = 1e-9


@dataclass(frozen=True)
class MadelungPath:
    """Imposed population imbalance and relative phase of a two-level state.

    delta_n   : callable t -> (Delta_n, dDelta_n/dt), |Delta_n| < 1 on the
                open interior of [0, t_f].
    theta_rel : callable t -> (theta, dtheta/dt), the relative phase of the
                two amplitudes (not a Bloch polar angle).
    """

    t_f: float
    delta_n: Callable
    theta_rel: Callable

    @classmethod
    def flip(cls, t_f: float, margin: float = 0.05) -> "MadelungPath":
        """Population swap (1 - margin) -> -(1 - margin) along a smooth ramp
        at constant relative phase theta = pi/2."""
        if not 0.0 < margin < 1.0:
            raise PreconditionError(f"margin must be in (0, 1), got {margin}")
        amp = 1.0 - margin

        def delta(t):
            s = np.asarray(t, dtype=float) / t_f
            w = 3.0 * s**2 - 2.0 * s**3
            return amp * (1.0 - 2.0 * w), -12.0 * amp * s * (1.0 - s) / t_f

        def theta(t):
            s = np.asarray(t, dtype=float)
            return np.full_like(s, np.pi / 2.0), np.zeros_like(s)

        return cls(t_f=float(t_f), delta_n=delta, theta_rel=theta)


def synth_madelung(path: MadelungPath, gamma: float) -> FieldProtocol:
    """Field components from an imposed (Delta_n, theta) path; By = 0."""
    if gamma == 0.0:
        raise PreconditionError("gamma must be nonzero")
    t_f = float(path.t_f)

    t_check = np.linspace(0.0, t_f, 2001)
    dn, dnd = path.delta_n(t_check)
    th, _ = path.theta_rel(t_check)
    dn = np.asarray(dn, dtype=float)
    interior = slice(1, -1)
    if (np.abs(dn[interior]) >= 1.0).any():
        i = 1 + int(np.argwhere(np.abs(dn[interior]) >= 1.0)[0, 0])
        raise PreconditionError(f"|Delta_n| reaches 1 on the interior at t = {t_check[i]!r}")
    sth = np.sin(np.asarray(th, dtype=float))
    bad = (np.abs(sth) < SIN_THETA_TOL) & (np.abs(np.asarray(dnd, dtype=float)) > 1e-10)
    if bad.any():
        i = int(np.argwhere(bad)[0, 0])
        raise SynthesisError(f"sin(theta) = 0 with nonvanishing numerator at t = {t_check[i]!r}")

    def evaluator(t: np.ndarray) -> np.ndarray:
        dn, dnd = path.delta_n(t)
        th, thd = path.theta_rel(t)
        dn = np.clip(np.asarray(dn, dtype=float), -1.0, 1.0)
        one_m = 1.0 - dn * dn
        sth, cth = np.sin(th), np.cos(th)
        denom = gamma * np.sqrt(one_m) * sth
        bx = np.divide(dnd, denom, out=np.zeros_like(denom),
                       where=np.abs(denom) > 0.0)
        corr = np.divide(dnd * dn * cth, one_m * sth,
                         out=np.zeros_like(denom), where=np.abs(one_m * sth) > 0.0)
        bz = (thd + corr) / gamma
        shape = np.asarray(t, dtype=float).shape
        return np.stack([np.broadcast_to(bx, shape),
                         np.zeros(shape),
                         np.broadcast_to(bz, shape)], axis=-1)

    return FieldProtocol(t_f=t_f, evaluator=evaluator,
                         metadata={"method": "madelung", "gamma": float(gamma), "t_f": t_f})
