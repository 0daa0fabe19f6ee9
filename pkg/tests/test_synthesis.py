import numpy as np
import pytest

from spinsteer import (EvolutionOperatorPath, MadelungPath, PhiAnsatz,
                       PolarPath, PreconditionError, SynthesisError,
                       bloch_angles, eval_phi_ansatz, integrate_bloch,
                       integrate_spinor, synth_from_evolution_operator,
                       synth_madelung, synth_precession)
from spinsteer.synthesis import family_field_nodes

np.random.seed(0)

GAMMA, TF, B0 = 2.0, 1.0, 1.0


class TestPhiAnsatz:
    def test_reduces_to_single_spin_example(self):
        s = np.linspace(0.0, 1.0, 11)
        phi, dphi, d2phi = eval_phi_ansatz(1.0, 0.0, s)
        assert np.abs(phi - (s - s**2)).max() < 1e-15
        assert np.abs(dphi - (1.0 - 2.0 * s)).max() < 1e-15
        assert np.abs(d2phi + 2.0).max() < 1e-15

    @pytest.mark.parametrize("kappa,eta", [(1.0, 0.0), (0.5, 5.0), (2.0564, 20.0),
                                           (-3.0, 7.5), (9.1892, 20.0)])
    def test_boundary_conditions(self, kappa, eta):
        phi0, _, _ = eval_phi_ansatz(kappa, eta, 0.0)
        phi1, _, _ = eval_phi_ansatz(kappa, eta, 1.0)
        _, dphi_half, _ = eval_phi_ansatz(kappa, eta, 0.5)
        assert phi0 == 0.0
        assert abs(phi1) < 1e-12
        assert abs(dphi_half) < 1e-12

    def test_second_derivative_by_hand(self):
        # kappa [2(eta-1) - 12 eta s + 12 eta s^2] at (2, 3, 0.25)
        _, _, d2 = eval_phi_ansatz(2.0, 3.0, 0.25)
        assert d2 == pytest.approx(2.0 * (4.0 - 9.0 + 2.25), abs=1e-14)


class TestPrecession:
    def test_zero_phi_zero_b0_is_pi_pulse(self):
        path = PolarPath(phi=PhiAnsatz(0.0, 0.0), b0=0.0, t_f=TF)
        field = synth_precession(path, GAMMA)
        _, b = field.samples(401)
        assert np.abs(b[:, 0]).max() < 1e-15
        assert np.abs(b[:, 2]).max() < 1e-15
        assert np.abs(b[:, 1] - np.pi / (GAMMA * TF)).max() < 1e-12

    def test_bz_vanishes_at_the_equator_crossing(self):
        path = PolarPath(phi=PhiAnsatz(2.5, 7.0), b0=1.3, t_f=TF)
        field = synth_precession(path, GAMMA)
        assert abs(field(0.5 * TF)[2]) < 1e-15

    def test_fig1_field_at_s0(self):
        # direct evaluation of the worked single-spin formulas at s = 0
        path = PolarPath(phi=PhiAnsatz(1.0, 0.0), b0=1.0, t_f=TF)
        b = synth_precession(path, GAMMA)(0.0)
        assert abs(b[0]) < 1e-15
        assert b[1] == pytest.approx(np.pi / (GAMMA * TF), abs=1e-15)
        assert b[2] == pytest.approx(1.0, abs=1e-15)

    @pytest.mark.parametrize("seed", [0, 1, 2, 3])
    def test_fields_finite_everywhere(self, seed):
        rng = np.random.default_rng(seed)
        kappa = rng.uniform(0.1, 9.0)
        eta = rng.uniform(0.0, 20.0)
        path = PolarPath(phi=PhiAnsatz(kappa, eta), b0=1.0, t_f=TF)
        field = synth_precession(path, GAMMA)
        t = np.linspace(0.0, TF, 2001)   # includes s = 1/2 exactly
        assert np.isfinite(field(t)).all()

    def test_smooth_across_singularity_window(self):
        path = PolarPath(phi=PhiAnsatz(2.0564, 20.0), b0=1.0, t_f=TF)
        field = synth_precession(path, GAMMA)
        t = 0.5 + np.array([-2e-6, -1.0000001e-6, -0.9999999e-6, 0.0,
                            0.9999999e-6, 1.0000001e-6, 2e-6])
        b = field(t)
        # window edge and closed form agree to the width of the window
        assert np.abs(np.diff(b, axis=0)).max() < 1e-4

    def test_unremovable_singularity_detected(self):
        def bad_phi(s):
            s = np.asarray(s, dtype=float)
            return s, np.ones_like(s), np.zeros_like(s)

        path = PolarPath(phi=bad_phi, b0=1.0, t_f=TF)
        with pytest.raises(SynthesisError, match="unremovable singularity"):
            synth_precession(path, GAMMA)

    def test_flip_flag_checks_theta_boundaries(self):
        def theta(s):
            s = np.asarray(s, dtype=float)
            return 0.9 * np.pi * s, np.full_like(s, 0.9 * np.pi)

        with pytest.raises(PreconditionError):
            PolarPath(phi=PhiAnsatz(1.0, 0.0), b0=1.0, t_f=TF, theta=theta)

    def test_custom_theta_crossing_found(self):
        # theta = pi s^2: crossing at s = sqrt(1/2), never at 1/2
        def theta(s):
            s = np.asarray(s, dtype=float)
            return np.pi * s**2, 2.0 * np.pi * s

        def phi(s):
            # dphi/ds = 0 exactly at the crossing s* = sqrt(0.5)
            s_star = np.sqrt(0.5)
            s = np.asarray(s, dtype=float)
            return (s - s_star)**2, 2.0 * (s - s_star), np.full_like(s, 2.0)

        path = PolarPath(phi=phi, b0=1.0, t_f=TF, theta=theta)
        assert path.crossings() == pytest.approx([np.sqrt(0.5)], abs=1e-10)
        field = synth_precession(path, GAMMA)
        t = np.linspace(0.0, TF, 4001)
        assert np.isfinite(field(t)).all()

    def test_round_trip_angles(self):
        # synthesized protocol must reproduce the imposed theta(s) = pi s and
        # phi ansatz to 1e-6 away from the poles
        kappa, eta = 0.5, 5.0
        path = PolarPath(phi=PhiAnsatz(kappa, eta), b0=1.0, t_f=TF)
        field = synth_precession(path, GAMMA)
        traj = integrate_bloch([0.0, 0.0, 1.0], field, GAMMA, n_steps=4000)
        theta, phi = bloch_angles(traj)
        s = traj.times / TF
        interior = (s > 0.01) & (s < 0.99)
        phi_imposed, _, _ = eval_phi_ansatz(kappa, eta, s)
        assert np.abs(theta - np.pi * s).max() < 1e-6
        assert np.abs(phi[interior] - phi_imposed[interior]).max() < 1e-6

    def test_family_nodes_match_protocol_evaluator(self):
        rng = np.random.default_rng(11)
        kappas = rng.uniform(0.2, 6.0, size=4)
        eta = 5.0
        bx, by, bz = family_field_nodes(kappas, eta, GAMMA, B0, TF, 200)
        t = np.linspace(0.0, TF, 401)
        for i, kappa in enumerate(kappas):
            field = synth_precession(
                PolarPath(phi=PhiAnsatz(kappa, eta), b0=B0, t_f=TF), GAMMA)
            b = field(t)
            assert np.abs(b[:, 0] - bx[i]).max() < 1e-13
            assert np.abs(b[:, 1] - by[i]).max() < 1e-13
            assert np.abs(b[:, 2] - bz[i]).max() < 1e-13


class TestEvolutionOperator:
    def test_half_flip_is_constant_pi_pulse(self):
        field = synth_from_evolution_operator(EvolutionOperatorPath.half_flip(TF), GAMMA)
        _, b = field.samples(501)
        assert np.abs(b[:, 0]).max() < 1e-15
        assert np.abs(b[:, 2]).max() < 1e-15
        assert np.abs(b[:, 1] - np.pi / (GAMMA * TF)).max() < 1e-12

    def test_matches_precession_construction_exactly(self):
        # formulation equivalence at the pi-pulse point
        f_op = synth_from_evolution_operator(EvolutionOperatorPath.half_flip(TF), GAMMA)
        f_pr = synth_precession(PolarPath(phi=PhiAnsatz(0.0, 0.0), b0=0.0, t_f=TF), GAMMA)
        t = np.linspace(0.0, TF, 1001)
        assert np.abs(f_op(t) - f_pr(t)).max() < 1e-12

    def test_constant_path_gives_zero_field(self):
        def r_eval(t):
            t = np.asarray(t, dtype=float)
            return np.full_like(t, 0.7), np.zeros_like(t)

        def phi_eval(t):
            t = np.asarray(t, dtype=float)
            return np.full_like(t, 1.2), np.zeros_like(t)

        path = EvolutionOperatorPath(t_f=TF, r=r_eval, phi_rel=phi_eval)
        field = synth_from_evolution_operator(path, GAMMA)
        _, b = field.samples(101)
        assert np.abs(b).max() < 1e-15

    def test_general_path_round_trip_in_bloch_picture(self):
        def theta(t):
            s = np.asarray(t, dtype=float) / TF
            return 0.3 + 0.9 * (3.0 * s**2 - 2.0 * s**3), 0.9 * 6.0 * s * (1.0 - s) / TF

        def phi_rel(t):
            t = np.asarray(t, dtype=float)
            w = 2.0 * np.pi / TF
            return 0.7 * np.sin(w * t) + 0.2, 0.7 * w * np.cos(w * t)

        path = EvolutionOperatorPath.from_polar(TF, theta, phi_rel)
        field = synth_from_evolution_operator(path, GAMMA)
        traj = integrate_bloch(path.bloch_vector(0.0), field, GAMMA, n_steps=4000)
        expected = path.bloch_vector(traj.times)
        assert np.abs(traj.vectors - expected).max() < 1e-6

    def test_divergent_denominator_rejected(self):
        def r_eval(t):
            t = np.asarray(t, dtype=float)
            return 1.0 - 0.5 * t, np.full_like(t, -0.5)

        def phi_eval(t):
            t = np.asarray(t, dtype=float)
            return np.zeros_like(t), np.zeros_like(t)

        path = EvolutionOperatorPath(t_f=TF, r=r_eval, phi_rel=phi_eval)
        with pytest.raises(SynthesisError, match="divergent denominator"):
            synth_from_evolution_operator(path, GAMMA)


class TestMadelung:
    def test_constant_imbalance_gives_longitudinal_field(self):
        def delta(t):
            t = np.asarray(t, dtype=float)
            return np.full_like(t, 0.3), np.zeros_like(t)

        def theta(t):
            t = np.asarray(t, dtype=float)
            return 0.2 + 1.3 * t, np.full_like(t, 1.3)

        path = MadelungPath(t_f=TF, delta_n=delta, theta_rel=theta)
        field = synth_madelung(path, GAMMA)
        _, b = field.samples(101)
        assert np.abs(b[:, 0]).max() < 1e-15
        assert np.abs(b[:, 1]).max() == 0.0
        assert np.abs(b[:, 2] - 1.3 / GAMMA).max() < 1e-15

    def test_by_identically_zero(self):
        field = synth_madelung(MadelungPath.flip(TF, margin=0.05), GAMMA)
        _, b = field.samples(501)
        assert (b[:, 1] == 0.0).all()

    def test_flip_round_trip_in_amplitude_picture(self):
        # two-level Schroedinger oracle in the amplitude-equation convention
        margin = 0.05
        path = MadelungPath.flip(TF, margin=margin)
        field = synth_madelung(path, GAMMA)

        dn0, _ = path.delta_n(0.0)
        th0, _ = path.theta_rel(0.0)
        na0 = (1.0 + float(dn0)) / 2.0
        psi0 = [np.sqrt(na0), np.sqrt(1.0 - na0) * np.exp(-1j * float(th0))]
        times, psi = integrate_spinor(psi0, field, GAMMA, n_steps=4000,
                                      hamiltonian_sign=-1)
        dn_sim = np.abs(psi[:, 0])**2 - np.abs(psi[:, 1])**2
        dn_imposed, _ = path.delta_n(times)
        assert np.abs(dn_sim - dn_imposed).max() < 1e-6

        th_sim = np.angle(psi[:, 0]) - np.angle(psi[:, 1])
        th_imposed, _ = path.theta_rel(times)
        assert np.abs(th_sim - th_imposed).max() < 1e-6

    def test_interior_unit_imbalance_rejected(self):
        def delta_bad(t):
            s = np.asarray(t, dtype=float) / TF
            return np.cos(2.0 * np.pi * s), -2.0 * np.pi * np.sin(2.0 * np.pi * s) / TF

        def theta(t):
            t = np.asarray(t, dtype=float)
            return np.full_like(t, np.pi / 2.0), np.zeros_like(t)

        path = MadelungPath(t_f=TF, delta_n=delta_bad, theta_rel=theta)
        with pytest.raises(PreconditionError, match="interior"):
            synth_madelung(path, GAMMA)

    def test_vanishing_sin_theta_rejected(self):
        def delta(t):
            s = np.asarray(t, dtype=float) / TF
            return 0.5 - 0.5 * s, np.full_like(s, -0.5 / TF)

        def theta(t):
            t = np.asarray(t, dtype=float)
            return np.zeros_like(t), np.zeros_like(t)

        path = MadelungPath(t_f=TF, delta_n=delta, theta_rel=theta)
        with pytest.raises(SynthesisError, match="sin"):
            synth_madelung(path, GAMMA)


class TestSpinorConsistency:
    def test_plus_convention_matches_bloch_picture(self):
        # the sign = +1 spinor evolution and the vector integrator describe
        # the same dynamics
        from spinsteer import spinor_bloch_vector
        path = PolarPath(phi=PhiAnsatz(1.0, 0.0), b0=1.0, t_f=TF)
        field = synth_precession(path, GAMMA)
        psi0 = [1.0, 0.0]
        _, psi = integrate_spinor(psi0, field, GAMMA, n_steps=2000, hamiltonian_sign=+1)
        traj = integrate_bloch([0.0, 0.0, 1.0], field, GAMMA, n_steps=2000)
        assert np.abs(spinor_bloch_vector(psi) - traj.vectors).max() < 1e-9

    def test_spinor_norm_conserved(self):
        field = synth_madelung(MadelungPath.flip(TF), GAMMA)
        _, psi = integrate_spinor([1.0, 0.0], field, GAMMA, n_steps=1500)
        norms = np.abs(psi[:, 0])**2 + np.abs(psi[:, 1])**2
        assert np.abs(norms - 1.0).max() < 1e-9
