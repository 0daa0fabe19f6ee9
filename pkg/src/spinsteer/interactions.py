"""Interacting spin pairs and triples: corrections, Ising dynamics, entanglement.

Isotropic coupling mu s1.s2 is removable: if B0(t) drives both free
spins to their targets, then

    B(t) = B0(t) + (mu/gamma2) S1(t) + (mu/gamma1) S2(t)

drives the coupled pair along the identical trajectories, for any mu.
The coupled equations of motion integrate as

    dS1/dt = gamma1 B x S1 + mu S1 x S2,
    dS2/dt = gamma2 B x S2 + mu S2 x S1,

with the field term's cross-product sign matching `bloch` and the
interaction term ordered so the correction formula above cancels it
exactly (the conserved quantity S1 + S2 at B = 0 is unaffected by that
ordering).

Ising coupling 4 xi s1z s2z is not removable and is what generates
entanglement.  In the angular-momentum triplet basis {|++>, |Bell>,
|-->} the amplitudes obey

    i a' = a (g Bz + xi) + b g B_- / sqrt(2)
    i b' = a g B_+ / sqrt(2) - b xi + c g B_- / sqrt(2)
    i c' = b g B_+ / sqrt(2) + c (-g Bz + xi)

with B+- = Bx +- i By.  A transverse rotating field g Bx = B(t) cos(wt),
g By = B(t) sin(wt) reduces the (a, b) block in the rotating frame to

    H_I = [[D/2, B/sqrt(2)], [B/sqrt(2), -D/2]],   D = g Bz - w + 2 xi.

The dynamical-invariant design drives |++> -> |Bell> exactly in this
two-level reduction: I(t) = u.sigma with u following the same
precession as the state, so an initial eigenstate of I(0) rides the
eigenstate branch for any duration.  The angle boundary conditions

    th(0) = 0, th(t_f) = -pi, th'(0) = th'(t_f) = 0,
    ph(0) = ph(t_f/2) = ph(t_f) = -pi/2,
    ph'(0) = -pi/t_f,  ph'(t_f) = +pi/t_f,

are interpolated by the minimal-order polynomials (cubic th, quartic
ph), and the controls follow from

    th' = sqrt(2) B sin(ph),
    ph' = -D + th' / (tan(th) tan(ph)).

The indeterminate ratio th'/(tan th tan ph) at both endpoints has the
finite limits +-2 pi / t_f, evaluated by series inside a window of
half-width 1e-7 in s.

Three spins on an equilateral triangle (pairwise Ising, equal
couplings, one common field) decompose the same way on the symmetric
ladder {|+++>, |W>, |Wbar>, |--->}; the (|+++>, |W>) block has coupling
sqrt(3) B / 2 and detuning g Bz - w + 4 xi, so the identical design with
those two substitutions targets the W state.  The infidelity in either
case is leakage out of the two-level reduction (to |--> or down the W
ladder), which vanishes as t_f grows.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .bloch import DEFAULT_STEPS, BlochTrajectory, BlochVector, FieldProtocol
from .errors import PreconditionError, SynthesisError

ENDPOINT_WINDOW = 1e-7   # half-width in s for the detuning endpoint limits

__all__ = [
    "CoupledSpinsState",
    "integrate_coupled_spins",
    "isotropic_corrected_field",
    "TripletAmplitudes",
    "integrate_triplet",
    "integrate_w_ladder",
    "triplet_hamiltonian",
    "w_ladder_hamiltonian",
    "InvariantDesign",
    "invariant_design",
    "bell_fidelity",
    "w_fidelity",
]


# --------------------------------------------------------------------------
# Isotropically coupled pair
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CoupledSpinsState:
    """Pair of classical spin vectors with isotropic coupling strength mu."""

    s1: BlochVector
    s2: BlochVector
    mu: float


def integrate_coupled_spins(initial: CoupledSpinsState, field: FieldProtocol,
                            gamma1: float, gamma2: float,
                            n_steps: int = DEFAULT_STEPS
                            ) -> tuple[BlochTrajectory, BlochTrajectory]:
    """RK4 for the coupled pair; reduces bitwise to two free spins at mu = 0."""
    if n_steps < 16:
        raise PreconditionError(f"n_steps must be >= 16, got {n_steps}")
    s1 = initial.s1.as_array()
    s2 = initial.s2.as_array()
    mu = float(initial.mu)
    b = field.node_samples(n_steps)
    dt = field.t_f / n_steps

    def deriv(i, v1, v2):
        bi = b[i]
        d1 = gamma1 * np.cross(bi, v1)
        d2 = gamma2 * np.cross(bi, v2)
        if mu != 0.0:
            c12 = np.cross(v1, v2)
            d1 = d1 + mu * c12
            d2 = d2 - mu * c12
        return d1, d2

    out1 = np.empty((n_steps + 1, 3))
    out2 = np.empty((n_steps + 1, 3))
    out1[0], out2[0] = s1, s2
    for k in range(n_steps):
        i0 = 2 * k
        a1, a2 = deriv(i0, s1, s2)
        b1, b2 = deriv(i0 + 1, s1 + 0.5 * dt * a1, s2 + 0.5 * dt * a2)
        c1, c2 = deriv(i0 + 1, s1 + 0.5 * dt * b1, s2 + 0.5 * dt * b2)
        d1, d2 = deriv(i0 + 2, s1 + dt * c1, s2 + dt * c2)
        s1 = s1 + dt / 6.0 * (a1 + 2.0 * (b1 + c1) + d1)
        s2 = s2 + dt / 6.0 * (a2 + 2.0 * (b2 + c2) + d2)
        out1[k + 1], out2[k + 1] = s1, s2

    times = np.linspace(0.0, field.t_f, n_steps + 1)
    return BlochTrajectory(times, out1), BlochTrajectory(times, out2)


def isotropic_corrected_field(b0_field: FieldProtocol, traj1: BlochTrajectory,
                              traj2: BlochTrajectory, mu: float,
                              gamma1: float, gamma2: float) -> FieldProtocol:
    """B0(t) + (mu/gamma2) S1(t) + (mu/gamma1) S2(t), splined between grid points."""
    if traj1.times.shape != traj2.times.shape or \
            np.abs(traj1.times - traj2.times).max() > 1e-12:
        raise PreconditionError("trajectories must share one time grid")
    if abs(traj1.t_f - b0_field.t_f) > 1e-12:
        raise PreconditionError("trajectory grid does not span the field duration")

    sp1 = CubicSpline(traj1.times, traj1.vectors, axis=0)
    sp2 = CubicSpline(traj2.times, traj2.vectors, axis=0)
    c1 = mu / gamma2
    c2 = mu / gamma1

    def evaluator(t: np.ndarray) -> np.ndarray:
        return b0_field(t) + c1 * sp1(t) + c2 * sp2(t)

    return FieldProtocol(t_f=b0_field.t_f, evaluator=evaluator,
                         metadata={"method": "isotropic_corrected",
                                   "mu": mu, "gamma1": gamma1, "gamma2": gamma2,
                                   **b0_field.metadata})


# --------------------------------------------------------------------------
# Ising-coupled pair: triplet amplitudes
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TripletAmplitudes:
    """Amplitudes on {|++>, |Bell>, |-->} with Ising strength xi."""

    a: complex
    b: complex
    c: complex
    xi: float
    gamma: float

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=complex)

    def norm(self) -> float:
        return float(np.sqrt(abs(self.a)**2 + abs(self.b)**2 + abs(self.c)**2))


def triplet_hamiltonian(b: np.ndarray, gamma: float, xi: float) -> np.ndarray:
    """3x3 triplet-basis Hamiltonian for field b = (Bx, By, Bz)."""
    bx, by, bz = (float(x) for x in b)
    bm = gamma * (bx - 1j * by)
    bp = np.conj(bm)
    gz = gamma * bz
    r2 = 1.0 / np.sqrt(2.0)
    return np.array([[gz + xi, bm * r2, 0.0],
                     [bp * r2, -xi, bm * r2],
                     [0.0, bp * r2, -gz + xi]], dtype=complex)


def w_ladder_hamiltonian(b: np.ndarray, gamma: float, xi: float) -> np.ndarray:
    """4x4 symmetric-subspace Hamiltonian {|+++>, |W>, |Wbar>, |--->} for
    three identical spins with equal pairwise Ising couplings 4 xi."""
    bx, by, bz = (float(x) for x in b)
    bm = gamma * (bx - 1j * by)
    bp = np.conj(bm)
    gz = gamma * bz
    r3 = np.sqrt(3.0) / 2.0
    return np.array(
        [[1.5 * gz + 3.0 * xi, r3 * bm, 0.0, 0.0],
         [r3 * bp, 0.5 * gz - xi, bm, 0.0],
         [0.0, bp, -0.5 * gz - xi, r3 * bm],
         [0.0, 0.0, r3 * bp, -1.5 * gz + 3.0 * xi]], dtype=complex)


def _integrate_amplitudes(psi0: np.ndarray, field: FieldProtocol, ham,
                          n_steps: int) -> tuple[np.ndarray, np.ndarray]:
    psi = np.asarray(psi0, dtype=complex)
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-9:
        raise PreconditionError("initial amplitudes must be normalized within 1e-9")
    b = field.node_samples(n_steps)
    dt = field.t_f / n_steps
    hs = [ham(b[i]) for i in range(2 * n_steps + 1)]

    out = np.empty((n_steps + 1, psi.size), dtype=complex)
    out[0] = psi
    for k in range(n_steps):
        i0 = 2 * k
        k1 = -1j * (hs[i0] @ psi)
        k2 = -1j * (hs[i0 + 1] @ (psi + 0.5 * dt * k1))
        k3 = -1j * (hs[i0 + 1] @ (psi + 0.5 * dt * k2))
        k4 = -1j * (hs[i0 + 2] @ (psi + dt * k3))
        psi = psi + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
        out[k + 1] = psi
    times = np.linspace(0.0, field.t_f, n_steps + 1)
    return times, out


def integrate_triplet(initial: TripletAmplitudes, field: FieldProtocol,
                      n_steps: int = DEFAULT_STEPS) -> tuple[np.ndarray, np.ndarray]:
    """RK4 for the triplet amplitude equations; returns (times, amps (n+1, 3))."""
    ham = lambda b: triplet_hamiltonian(b, initial.gamma, initial.xi)
    return _integrate_amplitudes(initial.as_array(), field, ham, n_steps)


def integrate_w_ladder(psi0, field: FieldProtocol, gamma: float, xi: float,
                       n_steps: int = DEFAULT_STEPS) -> tuple[np.ndarray, np.ndarray]:
    """RK4 on the three-spin symmetric ladder; returns (times, amps (n+1, 4))."""
    ham = lambda b: w_ladder_hamiltonian(b, gamma, xi)
    return _integrate_amplitudes(np.asarray(psi0, dtype=complex), field, ham, n_steps)


# --------------------------------------------------------------------------
# Dynamical-invariant design
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InvariantDesign:
    """Invariant-based drive taking the polarized state to the entangled one.

    coupling is sqrt(2) for the pair (Bell target) and sqrt(3) for the
    triangle (W target); detuning_shift is 2 xi and 4 xi respectively.
    The gyromagnetic factor is taken as 1: it cancels between the field
    definition g Bx = B cos(wt) and the amplitude equations.
    """

    t_f: float
    xi: float
    omega: float
    coupling: float
    detuning_shift: float

    def __post_init__(self):
        if self.t_f <= 0.0:
            raise PreconditionError(f"t_f must be positive, got {self.t_f}")
        if self.xi <= 0.0:
            raise PreconditionError(f"xi must be positive, got {self.xi}")
        s = np.linspace(0.0, 1.0, 2001)
        if np.abs(np.sin(self._phi_s(s)[0])).min() < 1e-6:
            raise SynthesisError("sin(phi) vanished on the interior; "
                                 "the quartic boundary conditions forbid this")

    # polynomial angles on s = t/t_f (exact coefficients, no fitting)
    @staticmethod
    def _theta_s(s):
        th = -np.pi * (3.0 * s**2 - 2.0 * s**3)
        dth = -6.0 * np.pi * s * (1.0 - s)
        return th, dth

    @staticmethod
    def _phi_s(s):
        u = s * s - s
        p = 4.0 * np.pi * (u * u + 0.25 * u)
        dp = 4.0 * np.pi * (2.0 * u + 0.25) * (2.0 * s - 1.0)
        return -np.pi / 2.0 + p, dp

    def theta(self, t):
        s = np.asarray(t, dtype=float) / self.t_f
        th, dth = self._theta_s(s)
        return th, dth / self.t_f

    def phi(self, t):
        s = np.asarray(t, dtype=float) / self.t_f
        ph, dp = self._phi_s(s)
        return ph, dp / self.t_f

    def b_amp(self, t):
        """Coupling amplitude B(t) = theta' / (coupling * sin(phi)); zero at both ends."""
        th, thd = self.theta(t)
        ph, _ = self.phi(t)
        return thd / (self.coupling * np.sin(ph))

    def delta(self, t):
        """Detuning D(t) = -phi' + theta'/(tan(theta) tan(phi))."""
        s = np.asarray(t, dtype=float) / self.t_f
        th, dth_s = self._theta_s(s)
        ph, dp_s = self._phi_s(s)
        p = ph + np.pi / 2.0
        # 1/tan(phi) = -tan(p); the ratio has double zero over double zero
        # at both endpoints with limits +-2 pi
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = -dth_s * np.cos(th) * np.tan(p) / np.sin(th)
        ratio = np.where(s < ENDPOINT_WINDOW, 2.0 * np.pi, ratio)
        ratio = np.where(1.0 - s < ENDPOINT_WINDOW, -2.0 * np.pi, ratio)
        return (-dp_s + ratio) / self.t_f

    def bz(self, t):
        """Longitudinal field (gamma = 1): (D + omega - detuning_shift)."""
        return self.delta(t) + self.omega - self.detuning_shift

    def lab_field(self) -> FieldProtocol:
        """Rotating transverse drive plus the detuning-carrying Bz (gamma = 1)."""
        om = self.omega

        def evaluator(t: np.ndarray) -> np.ndarray:
            amp = self.b_amp(t)
            return np.stack([amp * np.cos(om * t),
                             amp * np.sin(om * t),
                             self.bz(t)], axis=-1)

        return FieldProtocol(t_f=self.t_f, evaluator=evaluator,
                             metadata={"method": "invariant_design",
                                       "xi": self.xi, "omega": self.omega,
                                       "coupling": self.coupling})

    def eigenstate_plus(self, t) -> np.ndarray:
        """Tracked invariant eigenstate (cos(th/2) e^{i ph}, sin(th/2)) in the
        two-level reduction basis (polarized, entangled)."""
        th, _ = self.theta(t)
        ph, _ = self.phi(t)
        return np.stack([np.cos(th / 2.0) * np.exp(1j * ph),
                         np.sin(th / 2.0) * np.ones_like(np.asarray(ph))], axis=-1)


def invariant_design(t_f: float, xi: float, omega: float | None = None) -> InvariantDesign:
    """Bell-target design; omega defaults to 2 xi (then D(t) = g Bz(t))."""
    if omega is None:
        omega = 2.0 * xi
    return InvariantDesign(t_f=float(t_f), xi=float(xi), omega=float(omega),
                           coupling=np.sqrt(2.0), detuning_shift=2.0 * float(xi))


def _w_design(t_f: float, xi: float, omega: float | None = None) -> InvariantDesign:
    if omega is None:
        omega = 4.0 * xi
    return InvariantDesign(t_f=float(t_f), xi=float(xi), omega=float(omega),
                           coupling=np.sqrt(3.0), detuning_shift=4.0 * float(xi))


def bell_fidelity(t_f: float, xi: float, omega: float | None = None,
                  n_steps: int = DEFAULT_STEPS) -> float:
    """|<Bell|psi(t_f)>|^2 from |++> under the invariant-designed drive.

    The value is independent of omega (the rotating-frame reduction
    depends only on B(t), D(t) and xi); omega merely reshapes the lab
    Bz.
    """
    design = invariant_design(t_f, xi, omega)
    field = design.lab_field()
    initial = TripletAmplitudes(1.0, 0.0, 0.0, xi=xi, gamma=1.0)
    _, amps = integrate_triplet(initial, field, n_steps)
    return float(abs(amps[-1, 1]) ** 2)


def w_fidelity(t_f: float, xi: float, omega: float | None = None,
               n_steps: int = DEFAULT_STEPS) -> float:
    """|<W|psi(t_f)>|^2 from |+++> for the three-spin analogue design."""
    design = _w_design(t_f, xi, omega)
    field = design.lab_field()
    _, amps = integrate_w_ladder([1.0, 0.0, 0.0, 0.0], field, gamma=1.0,
                                 xi=xi, n_steps=n_steps)
    return float(abs(amps[-1, 1]) ** 2)
