"""Two-level amplitude integrator for |psi> = a|+> + b|->.

Two phase conventions coexist in the source formulations this package
inverts, differing by the overall sign of the Hamiltonian:

    sign = -1:   i a' = -(gamma/2) (a Bz + b Bx - i b By)
                 i b' = -(gamma/2) (a Bx - b Bz + i a By)

    sign = +1:   the same equations with the opposite overall sign,
                 i.e. H = +(gamma/2) B . sigma.

The modulus-phase (Madelung) field formulas are self-consistent with
sign = -1 (the default here); the Bloch-vector convention fixed by the
pi-pulse example corresponds to sign = +1, under which <sigma>(t)
matches `bloch.integrate_bloch` exactly.  For fields with By = 0 the
population dynamics of the two conventions coincide (they differ by a
reflection sy -> -sy of the Bloch vector).
"""

from __future__ import annotations

import numpy as np

from .bloch import DEFAULT_STEPS, FieldProtocol
from .errors import PreconditionError

__all__ = ["integrate_spinor", "spinor_bloch_vector"]


def integrate_spinor(psi0, field: FieldProtocol, gamma: float,
                     n_steps: int = DEFAULT_STEPS,
                     hamiltonian_sign: int = -1) -> tuple[np.ndarray, np.ndarray]:
    """RK4 integration of the two-level Schroedinger equation.

    Returns (times (n+1,), psi (n+1, 2) complex).  Norm is conserved to
    RK4 accuracy; the initial state must be normalized within 1e-9.
    """
    psi = np.asarray(psi0, dtype=complex)
    if psi.shape != (2,):
        raise PreconditionError(f"spinor must have 2 components, got shape {psi.shape}")
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-9:
        raise PreconditionError("initial spinor must be normalized within 1e-9")
    if hamiltonian_sign not in (-1, 1):
        raise PreconditionError("hamiltonian_sign must be +1 or -1")

    b = field.node_samples(n_steps)
    dt = field.t_f / n_steps
    # i psi' = s*(gamma/2) [[Bz, Bx - i By], [Bx + i By, -Bz]] psi
    c = -1j * hamiltonian_sign * (gamma / 2.0)

    def deriv(i: int, p: np.ndarray) -> np.ndarray:
        bx, by, bz = b[i]
        return c * np.array([p[0] * bz + p[1] * (bx - 1j * by),
                             p[0] * (bx + 1j * by) - p[1] * bz])

    out = np.empty((n_steps + 1, 2), dtype=complex)
    out[0] = psi
    for k in range(n_steps):
        i0 = 2 * k
        k1 = deriv(i0, psi)
        k2 = deriv(i0 + 1, psi + 0.5 * dt * k1)
        k3 = deriv(i0 + 1, psi + 0.5 * dt * k2)
        k4 = deriv(i0 + 2, psi + dt * k3)
        psi = psi + dt / 6.0 * (k1 + 2.0 * (k2 + k3) + k4)
        out[k + 1] = psi

    times = np.linspace(0.0, field.t_f, n_steps + 1)
    return times, out


def spinor_bloch_vector(psi: np.ndarray) -> np.ndarray:
    """<sigma> for spinor series psi of shape (..., 2); returns (..., 3)."""
    a, b = psi[..., 0], psi[..., 1]
    sx = 2.0 * (np.conj(a) * b).real
    sy = 2.0 * (np.conj(a) * b).imag
    sz = np.abs(a) ** 2 - np.abs(b) ** 2
    return np.stack([sx, sy, sz], axis=-1)
