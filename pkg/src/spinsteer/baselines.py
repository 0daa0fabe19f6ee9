"""Closed-form pi-pulse and spin-echo baselines.

A rectangular pulse designed for the mean gyromagnetic factor, applied
to a spin whose factor is off by the relative error eps, rotates by the
scaled angle (1 - eps) * nominal.  The survival probabilities and their
averaged robustness functions have closed forms:

    pi pulse   P(eps) = sin^2(pi eps / 2)
               Lambda_pi(eps)  = 1/2 - sin(pi eps)/(2 pi eps)
    spin echo  P(eps) = sin^4(pi eps / 2)        (square of the pi pulse)
               Lambda_se(eps)  = 3/8 - sin(pi eps)/(2 pi eps)
                                     + sin(2 pi eps)/(16 pi eps)

with small-eps limits pi^2 eps^2 / 12 and pi^4 eps^4 / 80.  Each
survival probability is computed both from the closed form and from the
explicit propagator product, which must agree to 1e-12.
"""

from __future__ import annotations

import numpy as np

from .errors import PreconditionError, SpinSteerError

PROTOCOLS = ("pi_pulse", "spin_echo")
SERIES_SWITCH = 1e-4

_SIGMA = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
}
_ID = np.eye(2, dtype=complex)

__all__ = ["Unitary2", "pulse_propagator", "survival_probability", "analytic_lambda"]


class Unitary2:
    """2x2 unitary with construction-time checks (U+U = 1, |det U| = 1)."""

    def __init__(self, matrix: np.ndarray):
        m = np.asarray(matrix, dtype=complex)
        if m.shape != (2, 2):
            raise PreconditionError(f"expected a 2x2 matrix, got shape {m.shape}")
        if np.abs(m.conj().T @ m - _ID).max() > 1e-12:
            raise PreconditionError("matrix is not unitary within 1e-12")
        if abs(abs(np.linalg.det(m)) - 1.0) > 1e-12:
            raise PreconditionError("matrix determinant modulus is not 1 within 1e-12")
        self.matrix = m

    def __matmul__(self, other: "Unitary2") -> "Unitary2":
        return Unitary2(self.matrix @ other.matrix)

    def survival(self) -> float:
        """|<+|U|+>|^2, the probability of remaining in the initial state."""
        return float(abs(self.matrix[0, 0]) ** 2)


def pulse_propagator(axis: str, angle: float) -> Unitary2:
    """Rotation propagator cos(angle/2) 1 - i sin(angle/2) sigma_axis."""
    if axis not in _SIGMA:
        raise PreconditionError(f"axis must be 'x' or 'y', got {axis!r}")
    a = float(angle)
    return Unitary2(np.cos(a / 2.0) * _ID - 1.0j * np.sin(a / 2.0) * _SIGMA[axis])


def _propagator_survival(protocol: str, epsilon: float) -> float:
    scale = 1.0 - epsilon
    if protocol == "pi_pulse":
        return pulse_propagator("x", np.pi * scale).survival()
    u = (pulse_propagator("x", np.pi / 2.0 * scale)
         @ pulse_propagator("y", np.pi * scale)
         @ pulse_propagator("x", np.pi / 2.0 * scale))
    return u.survival()


def survival_probability(protocol: str, epsilon: float) -> float:
    """Probability that the mistuned spin survives the flip protocol.

    Evaluates both the closed form and the propagator product and
    insists they agree to 1e-12 before returning the closed form.
    """
    if protocol not in PROTOCOLS:
        raise PreconditionError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")
    s = np.sin(np.pi * epsilon / 2.0) ** 2
    closed = s if protocol == "pi_pulse" else s * s
    numeric = _propagator_survival(protocol, epsilon)
    if abs(closed - numeric) > 1e-12:
        raise SpinSteerError(
            f"closed form and propagator survival disagree for {protocol} at "
            f"eps = {epsilon!r}: {closed!r} vs {numeric!r}")
    return float(closed)


def analytic_lambda(protocol: str, epsilon: float) -> float:
    """Closed-form robustness function of the baseline protocols.

    For eps < 1e-4 the series limits (pi^2 eps^2/12 and pi^4 eps^4/80,
    with one correction term each) replace the closed forms, which lose
    all significance to cancellation there.
    """
    if protocol not in PROTOCOLS:
        raise PreconditionError(f"protocol must be one of {PROTOCOLS}, got {protocol!r}")
    eps = float(epsilon)
    if eps <= 0.0:
        raise PreconditionError(f"epsilon must be positive, got {epsilon}")

    u = np.pi * eps
    if protocol == "pi_pulse":
        if eps < SERIES_SWITCH:
            return u**2 / 12.0 - u**4 / 240.0
        return 0.5 - np.sin(u) / (2.0 * u)
    if eps < SERIES_SWITCH:
        return u**4 / 80.0 - u**6 / 672.0
    return 0.375 - np.sin(u) / (2.0 * u) + np.sin(2.0 * u) / (16.0 * u)
