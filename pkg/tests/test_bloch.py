import numpy as np
import pytest

from spinsteer import (BlochTrajectory, BlochVector, FieldProtocol,
                       IntegrationError, PreconditionError, bloch_angles,
                       flip_deficit, integrate_bloch)

np.random.seed(0)


def pi_pulse_field(gamma, t_f):
    return FieldProtocol.constant(0.0, np.pi / (gamma * t_f), 0.0, t_f)


def random_smooth_field(seed, t_f=1.0, amplitude=2.0):
    """Low-order Fourier field: smooth, bounded, nontrivial in all components."""
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-amplitude, amplitude, size=(3, 3))
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(3, 3))

    def evaluator(t):
        w = 2.0 * np.pi * t / t_f
        out = np.zeros((t.size, 3))
        for c in range(3):
            for m in range(3):
                out[:, c] += coeffs[c, m] * np.cos((m + 1) * w + phases[c, m])
        return out

    return FieldProtocol(t_f=t_f, evaluator=evaluator)


class TestIntegrate:
    def test_spin_aligned_with_field_is_stationary(self):
        field = FieldProtocol.constant(0.0, 0.0, 1.0, 2.0)
        traj = integrate_bloch([0.0, 0.0, 1.0], field, gamma=3.7, n_steps=500)
        assert np.abs(traj.vectors - [0.0, 0.0, 1.0]).max() < 1e-12

    def test_pi_pulse_flips_the_spin(self):
        gamma, t_f = 2.0, 1.0
        traj = integrate_bloch([0.0, 0.0, 1.0], pi_pulse_field(gamma, t_f), gamma)
        assert abs(traj.final().sz - (-1.0)) < 1e-8

    def test_constant_x_field_matches_analytic_rotation(self):
        # oracle: rotation about +x by angle gamma*b*t, sign fixed by the
        # pi-pulse convention
        gamma, b, t_f = 2.0, 0.8, 1.5
        s0 = np.array([0.0, 0.6, 0.8])
        field = FieldProtocol.constant(b, 0.0, 0.0, t_f)
        traj = integrate_bloch(s0, field, gamma, n_steps=2000)
        ang = gamma * b * traj.times
        expected = np.stack([np.full_like(ang, s0[0]),
                             np.cos(ang) * s0[1] - np.sin(ang) * s0[2],
                             np.sin(ang) * s0[1] + np.cos(ang) * s0[2]], axis=1)
        assert np.abs(traj.vectors - expected).max() < 1e-10

    def test_initial_point_is_exactly_s0(self):
        s0 = np.array([0.0, 0.6, 0.8])
        traj = integrate_bloch(s0, pi_pulse_field(2.0, 1.0), 2.0, n_steps=64)
        assert (traj.vectors[0] == s0).all()

    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_norm_conservation(self, seed):
        field = random_smooth_field(seed)
        traj = integrate_bloch([0.0, 0.0, 1.0], field, gamma=2.0, n_steps=1000)
        assert traj.max_norm_drift() < 1e-8

    def test_fourth_order_convergence(self):
        field = random_smooth_field(7)
        finals = {n: integrate_bloch([0.0, 0.0, 1.0], field, 2.0, n).vectors[-1]
                  for n in (250, 500, 1000, 2000, 4000)}
        # Richardson-extrapolated reference from the two finest grids
        ref = finals[4000] + (finals[4000] - finals[2000]) / 15.0
        err = {n: np.linalg.norm(finals[n] - ref) for n in (250, 500, 1000)}
        assert 12.0 < err[250] / err[500] < 20.0
        assert 12.0 < err[500] / err[1000] < 20.0

    def test_non_unit_s0_rejected(self):
        with pytest.raises(PreconditionError):
            integrate_bloch([0.0, 0.0, 1.1], pi_pulse_field(2.0, 1.0), 2.0)

    def test_too_few_steps_rejected(self):
        with pytest.raises(PreconditionError):
            integrate_bloch([0.0, 0.0, 1.0], pi_pulse_field(2.0, 1.0), 2.0, n_steps=8)

    def test_non_finite_field_names_offending_time(self):
        def evaluator(t):
            out = np.ones((t.size, 3))
            out[t > 0.5] = np.nan
            return out

        field = FieldProtocol(t_f=1.0, evaluator=evaluator)
        with pytest.raises(IntegrationError, match="t = "):
            integrate_bloch([0.0, 0.0, 1.0], field, 2.0, n_steps=100)


class TestAngles:
    def test_equatorial_point(self):
        traj = BlochTrajectory(np.array([0.0]), np.array([[1.0, 0.0, 0.0]]))
        theta, phi = bloch_angles(traj)
        assert abs(theta[0] - np.pi / 2.0) < 1e-15
        assert abs(phi[0]) < 1e-15

    def test_pole_carries_previous_phi(self):
        vecs = np.array([[np.sqrt(0.5), np.sqrt(0.5), 0.0],
                         [0.0, 0.0, 1.0]])
        traj = BlochTrajectory(np.array([0.0, 1.0]), vecs)
        theta, phi = bloch_angles(traj)
        assert abs(theta[1]) < 1e-9
        assert abs(phi[1] - phi[0]) < 1e-15

    def test_initial_pole_defaults_to_zero(self):
        traj = BlochTrajectory(np.array([0.0]), np.array([[0.0, 0.0, 1.0]]))
        _, phi = bloch_angles(traj)
        assert phi[0] == 0.0

    def test_unwrap_follows_many_turns(self):
        t = np.linspace(0.0, 1.0, 2001)
        ang = 7.0 * 2.0 * np.pi * t
        vecs = np.stack([np.cos(ang), np.sin(ang), np.zeros_like(ang)], axis=1)
        traj = BlochTrajectory(t, vecs)
        _, phi = bloch_angles(traj)
        assert np.abs(phi - ang).max() < 1e-9


class TestFlipDeficit:
    @pytest.mark.parametrize("final,expected", [
        ((0.0, 0.0, -1.0), 0.0),
        ((0.0, 0.0, 1.0), 1.0),
        ((1.0, 0.0, 0.0), 0.5),
    ])
    def test_values(self, final, expected):
        traj = BlochTrajectory(np.array([0.0]), np.array([final]))
        assert flip_deficit(traj) == pytest.approx(expected, abs=1e-15)

    def test_clamped_against_undershoot(self):
        traj = BlochTrajectory(np.array([0.0]), np.array([[0.0, 0.0, -1.0 - 1e-13]]))
        assert flip_deficit(traj) == 0.0


class TestBlochVector:
    def test_unit_check(self):
        with pytest.raises(PreconditionError):
            BlochVector.from_array([1.0, 1.0, 0.0])
        v = BlochVector.from_array([0.0, 0.6, 0.8])
        assert v.norm() == pytest.approx(1.0)
