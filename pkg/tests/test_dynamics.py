import numpy as np
import pytest

from horizonbattery.dynamics import (
    QuenchSchedule,
    boundary_echo_time,
    delta_energy_series,
    energy_of,
    energy_series,
    evolve,
    gaussian_state_checks,
    ground_state,
    trajectory_invariant_report,
)
from horizonbattery.lattice import (
    ChainConfig,
    HoppingProfile,
    MetricProfile,
    build_hamiltonian,
    build_hoppings,
    chain_spectrum,
    spectral_data,
)
from horizonbattery.oracle import exact_trajectory


def quench_setup(x_h0, x_ht, L=8, d=1.0, mu=0.0, frame="fixed"):
    chain = ChainConfig(L=L, d=d, mu=mu, frame=frame)
    hop0 = build_hoppings(MetricProfile(x_h0), chain)
    hop1 = build_hoppings(MetricProfile(x_ht), chain)
    h0 = build_hamiltonian(hop0, chain)
    h1 = build_hamiltonian(hop1, chain)
    return chain, hop0, hop1, h0, h1


class TestGroundState:
    def test_two_site_by_hand(self):
        s = spectral_data(build_hamiltonian(HoppingProfile([1.0]), ChainConfig(L=2, mu=0.0)))
        np.testing.assert_allclose(ground_state(s), [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)

    def test_half_filling_uniform_even(self):
        L = 10
        s = spectral_data(build_hamiltonian(HoppingProfile([1.0] * (L - 1)), ChainConfig(L=L, mu=0.0)))
        C = ground_state(s)
        assert np.trace(C) == pytest.approx(L / 2, abs=1e-10)

    def test_energy_matches_oracle_ground_energy(self):
        chain, hop, _, h, _ = quench_setup(1.0, 1.0, L=8)
        s = spectral_data(h)
        C = ground_state(s)
        # frozen dense value for this profile (see test_oracle)
        assert energy_of(C, h) == pytest.approx(-15.836092947947396, abs=1e-8)

    def test_vacuum_when_gap_positive(self):
        # large mu pushes every mode positive: the ground state is the vacuum
        s = chain_spectrum(0.0, ChainConfig(L=4, d=1.0, mu=50.0))
        assert np.all(s.eps > 0)
        np.testing.assert_array_equal(ground_state(s), np.zeros((4, 4)))

    def test_projector(self):
        s = chain_spectrum(2.0, ChainConfig(L=12, d=0.5))
        C = ground_state(s)
        np.testing.assert_allclose(C @ C, C, atol=1e-10)


class TestEvolve:
    def test_zero_time_identity(self):
        s = chain_spectrum(1.0, ChainConfig(L=6))
        C = ground_state(s)
        np.testing.assert_allclose(evolve(C, s, 0.0), C, atol=1e-14)

    def test_stationary_under_own_hamiltonian(self):
        chain, _, _, h, _ = quench_setup(1.5, 1.5, L=10)
        s = spectral_data(h)
        C = ground_state(s)
        e0 = energy_of(C, h)
        for t in (0.5, 2.0, 7.3):
            assert energy_of(evolve(C, s, t), h) == pytest.approx(e0, abs=1e-10)

    def test_orientation_matches_oracle(self):
        # the binding contract: dE(t) of the conjugation orientation must
        # reproduce dense many-body evolution
        chain, hop0, hop1, h0, h1 = quench_setup(0.0, 2.0, L=8)
        s0, s1 = spectral_data(h0), spectral_data(h1)
        C0 = ground_state(s0)
        e0 = energy_of(C0, h0)
        sched = QuenchSchedule(tau=1.0, t_max=1.0, dt=0.5)
        _, dE_exact, _ = exact_trajectory(hop0, hop1, chain, sched)
        dE_engine = energy_of(evolve(C0, s1, 1.0), h0) - e0
        assert dE_engine == pytest.approx(dE_exact[-1], abs=1e-8)

    def test_purity_and_spectrum_preserved(self):
        s1 = chain_spectrum(2.0, ChainConfig(L=20, d=0.5))
        s0 = chain_spectrum(0.0, ChainConfig(L=20, d=0.5))
        C = ground_state(s0)
        Ct = evolve(C, s1, 3.7)
        chk = gaussian_state_checks(Ct, trace_ref=np.trace(C).real)
        assert chk["purity"] < 1e-9
        assert chk["eig_min"] > -1e-10 and chk["eig_max"] < 1 + 1e-10
        assert chk["trace_drift"] < 1e-10

    def test_time_reversal(self):
        s1 = chain_spectrum(1.0, ChainConfig(L=14, d=0.5))
        C = ground_state(chain_spectrum(2.0, ChainConfig(L=14, d=0.5)))
        back = evolve(evolve(C, s1, 2.1), s1, -2.1)
        np.testing.assert_allclose(back, C, atol=1e-9)


class TestEnergyOf:
    def test_vacuum_zero(self):
        chain, _, _, h, _ = quench_setup(1.0, 1.0, L=5)
        assert energy_of(np.zeros((5, 5)), h) == 0.0

    def test_filled_sea(self):
        s = chain_spectrum(1.0, ChainConfig(L=9, d=0.7, mu=0.4))
        assert energy_of(ground_state(s), s.hamiltonian) == pytest.approx(
            s.ground_energy, abs=1e-10
        )

    def test_dimension_mismatch(self):
        chain, _, _, h, _ = quench_setup(0.0, 0.0, L=4)
        with pytest.raises(ValueError):
            energy_of(np.zeros((3, 3)), h)

    def test_imaginary_residue_rejected(self):
        chain, _, _, h, _ = quench_setup(0.0, 0.0, L=4)
        bad = np.zeros((4, 4), complex)
        bad[0, 1] = 1j  # non-Hermitian fake state
        with pytest.raises(ArithmeticError):
            energy_of(bad, h)

    def test_no_jump_at_switch_on(self):
        chain, _, _, h0, h1 = quench_setup(0.0, 3.0, L=8)
        s0, s1 = spectral_data(h0), spectral_data(h1)
        C0 = ground_state(s0)
        e_plus = energy_of(evolve(C0, s1, 1e-9), h0)
        assert e_plus == pytest.approx(s0.ground_energy, abs=1e-6)


class TestDeltaEnergySeries:
    def test_null_quench_identically_zero(self):
        chain, _, _, h0, h1 = quench_setup(1.0, 1.0, L=20)
        traj = delta_energy_series(h0, h1, QuenchSchedule(2.0, 4.0, 0.05))
        np.testing.assert_allclose(traj.dE, 0.0, atol=1e-10)

    def test_starts_exactly_at_zero(self):
        chain, _, _, h0, h1 = quench_setup(0.0, 2.0, L=16)
        traj = delta_energy_series(h0, h1, QuenchSchedule(1.0, 2.0, 0.1))
        assert traj.dE[0] == 0.0

    def test_matches_oracle_pointwise(self):
        chain, hop0, hop1, h0, h1 = quench_setup(0.0, 2.0, L=8)
        sched = QuenchSchedule(tau=1.0, t_max=3.0, dt=0.05)
        traj = delta_energy_series(h0, h1, sched)
        _, dE_exact, _ = exact_trajectory(hop0, hop1, chain, sched)
        np.testing.assert_allclose(traj.dE, dE_exact, atol=1e-8)

    def test_tail_constant(self):
        chain, _, _, h0, h1 = quench_setup(0.0, 3.0, L=12)
        traj = delta_energy_series(h0, h1, QuenchSchedule(tau=0.8, t_max=2.0, dt=0.1))
        tail = traj.dE[traj.times > 0.8]
        np.testing.assert_allclose(tail, tail[0], atol=1e-9)

    def test_passivity(self):
        for x_ht in (0.5, 2.0, 4.0):
            chain, _, _, h0, h1 = quench_setup(1.0, x_ht, L=14)
            traj = delta_energy_series(h0, h1, QuenchSchedule(2.0, 2.0, 0.05))
            assert np.min(traj.dE) >= -1e-9 * traj.bandwidth

    def test_off_grid_tau_uses_exact_switch_value(self):
        chain, hop0, hop1, h0, h1 = quench_setup(0.0, 2.0, L=8)
        sched = QuenchSchedule(tau=0.775, t_max=1.5, dt=0.05)
        traj = delta_energy_series(h0, h1, sched)
        s0, s1 = spectral_data(h0), spectral_data(h1)
        e_tau = energy_series(ground_state(s0), h0, s1, np.array([0.0, 0.775]))
        assert traj.dE[-1] == pytest.approx(e_tau[1] - e_tau[0], abs=1e-12)

    def test_zero_bandwidth_rejected(self):
        h0 = build_hamiltonian(HoppingProfile([0.0]), ChainConfig(L=2, mu=0.0))
        with pytest.raises(ArithmeticError):
            delta_energy_series(h0, h0, QuenchSchedule(1.0, 1.0, 0.1))


class TestInvariantReport:
    def test_report_clean_on_quench(self):
        chain, _, _, h0, h1 = quench_setup(0.0, 2.0, L=30, d=0.5)
        s0, s1 = spectral_data(h0), spectral_data(h1)
        rep = trajectory_invariant_report(s0, s1, QuenchSchedule(1.5, 3.0, 0.05))
        assert rep["purity"] < 1e-9
        assert rep["eig_min"] > -1e-10 and rep["eig_max"] < 1 + 1e-10
        assert rep["trace_drift"] < 1e-10
        assert rep["tail_drift_norm"] < 1e-9


class TestBoundaryEcho:
    def test_echo_detected(self):
        # front velocity 2*kappa*d: the far site lights up around t ~ (L-1)/(2 kappa)
        L = 40
        s = spectral_data(build_hamiltonian(HoppingProfile([1.0] * (L - 1)), ChainConfig(L=L)))
        times = np.arange(0.0, 60.0, 0.1)
        echo = boundary_echo_time(s, times)
        assert 10.0 < echo < 40.0

    def test_no_echo_within_window(self):
        L = 60
        s = spectral_data(build_hamiltonian(HoppingProfile([1.0] * (L - 1)), ChainConfig(L=L)))
        times = np.arange(0.0, 5.0, 0.1)
        assert boundary_echo_time(s, times) == float("inf")
