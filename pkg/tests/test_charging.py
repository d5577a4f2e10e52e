import numpy as np
import pytest

from horizonbattery.charging import (
    ChargeMetrics,
    charge_once,
    effective_scrambling,
    make_quench_pair,
    metrics_from_trajectory,
    regularize,
    regularized_charge_scan,
    size_scan,
    sweep_grid,
)
from horizonbattery.dynamics import ChargeTrajectory, QuenchSchedule, delta_energy_series
from horizonbattery.lattice import (
    ChainConfig,
    HoppingProfile,
    MetricProfile,
    build_hamiltonian,
    build_hoppings,
    spectral_data,
)
from horizonbattery.oracle import exact_trajectory

SCHED = QuenchSchedule(tau=5.0, t_max=5.0, dt=0.02)


class TestQuenchPair:
    def test_identical_metric(self):
        h0, h1 = make_quench_pair(1.5, 1.5, ChainConfig(L=10))
        np.testing.assert_array_equal(h0.matrix, h1.matrix)

    def test_pure_ads_pair(self):
        h0, h1 = make_quench_pair(0.0, 0.0, ChainConfig(L=6))
        ref = build_hamiltonian(build_hoppings(MetricProfile(0.0), ChainConfig(L=6)), ChainConfig(L=6))
        np.testing.assert_array_equal(h0.matrix, ref.matrix)
        np.testing.assert_array_equal(h1.matrix, ref.matrix)

    def test_difference_profile(self):
        # fixed frame: (h1 - h0)[b, b+1] = -(kappa1 - kappa0) = +x_ht*(b-1/2)/4
        h0, h1 = make_quench_pair(0.0, 2.0, ChainConfig(L=4, d=1.0, mu=0.0))
        diff = h1.matrix - h0.matrix
        np.testing.assert_allclose(np.diag(diff, 1), [0.25, 0.75, 1.25], atol=1e-14)

    def test_negative_parameter_rejected(self):
        with pytest.raises(ValueError):
            make_quench_pair(-1.0, 2.0, ChainConfig(L=4))


class TestMetrics:
    def test_linear_ramp(self):
        times = np.arange(0.0, 2.0001, 0.1)
        dE = 3.0 * times
        traj = ChargeTrajectory(times, dE, dE, 1.0, 2.0)
        m = metrics_from_trajectory(traj)
        assert m.P_max == pytest.approx(3.0)
        assert m.tau_star == pytest.approx(0.1)  # earliest tie

    def test_diagonal_null(self):
        _, m, _ = charge_once(1.0, 1.0, ChainConfig(L=30, d=0.5), SCHED)
        assert abs(m.E_max) < 1e-10
        assert abs(m.P_max) < 1e-10

    def test_internal_consistency(self):
        traj, m, _ = charge_once(0.0, 2.0, ChainConfig(L=16), SCHED)
        idx = int(round(m.tau_star / SCHED.dt))
        assert m.P_max * m.tau_star == pytest.approx(traj.dE_norm[idx], rel=1e-12)
        assert m.E_max >= traj.dE_norm[idx]
        P = traj.dE_norm[1:] / traj.times[1:]
        assert np.all(P <= m.P_max * (1 + 1e-12))

    def test_matches_oracle_metrics(self):
        chain = ChainConfig(L=8, d=1.0, mu=0.0)
        sched = QuenchSchedule(tau=5.0, t_max=5.0, dt=0.02)
        traj, m, _ = charge_once(0.0, 2.0, chain, sched)
        hop0 = build_hoppings(MetricProfile(0.0), chain)
        hop1 = build_hoppings(MetricProfile(2.0), chain)
        _, dE_exact, _ = exact_trajectory(hop0, hop1, chain, sched)
        Eb = spectral_data(build_hamiltonian(hop0, chain)).bandwidth
        dEn = dE_exact / Eb
        assert m.E_max == pytest.approx(np.max(dEn), abs=1e-8)
        P = dEn[1:] / traj.times[1:]
        assert m.P_max == pytest.approx(np.max(P), abs=1e-8)
        assert abs(m.tau_star - traj.times[1 + int(np.argmax(P))]) <= sched.dt + 1e-12


class TestSweep:
    def test_grid_complete_and_ordered(self):
        res = sweep_grid([0.0, 1.0], [0.0, 1.0], ChainConfig(L=12), SCHED)
        assert [(c.x_h0, c.x_ht) for c in res.cells] == [
            (0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)
        ]
        for c in res.cells:
            if c.x_h0 == c.x_ht:
                assert abs(c.E_max) < 1e-10

    def test_deterministic_rerun(self):
        a = sweep_grid([0.0, 2.0], [1.0, 3.0], ChainConfig(L=14), SCHED, workers=2)
        b = sweep_grid([0.0, 2.0], [1.0, 3.0], ChainConfig(L=14), SCHED, workers=1)
        np.testing.assert_array_equal(np.array(a.rows()), np.array(b.rows()))

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            sweep_grid([], [1.0], ChainConfig(L=8), SCHED)

    def test_nontrivial_offdiagonal(self):
        res = sweep_grid([0.0], [2.0], ChainConfig(L=16), SCHED)
        assert res.cells[0].E_max > 1e-6


class TestSizeScan:
    def test_rows_and_consistency_with_sweep(self):
        sched = QuenchSchedule(tau=2.0, t_max=2.0, dt=0.02)
        rows = size_scan([8, 12], 0.0, [1.0, 2.0], 1.0, 0.0, sched)
        assert [(r[0], r[1]) for r in rows] == [(8, 1.0), (8, 2.0), (12, 1.0), (12, 2.0)]
        res = sweep_grid([0.0], [1.0, 2.0], ChainConfig(L=8), sched)
        for row, cell in zip(rows[:2], res.cells):
            assert row[2] == pytest.approx(cell.P_max, rel=1e-12)
            assert row[3] == pytest.approx(cell.tau_star, rel=1e-12)

    def test_small_L_rejected(self):
        with pytest.raises(ValueError):
            size_scan([1, 8], 0.0, [1.0], 1.0, 0.0, SCHED)


class TestRegularize:
    def test_two_site_unit_norm(self):
        h = build_hamiltonian(HoppingProfile([1.0]), ChainConfig(L=2, mu=0.0))
        s = spectral_data(h)
        h_reg, scale = regularize(h, s)
        assert scale == pytest.approx(1.0)
        np.testing.assert_allclose(h_reg.matrix, h.matrix)

    def test_idempotent(self):
        chain = ChainConfig(L=10, d=0.5)
        h = build_hamiltonian(build_hoppings(MetricProfile(2.0), chain), chain)
        h1, s1 = regularize(h, spectral_data(h))
        h2, s2 = regularize(h1, spectral_data(h1))
        assert s2 == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(h2.matrix, h1.matrix, atol=1e-12)

    def test_norm_matches_dense_many_body(self):
        chain = ChainConfig(L=6, d=1.0, mu=0.0)
        hop = build_hoppings(MetricProfile(2.0), chain)
        h = build_hamiltonian(hop, chain)
        s = spectral_data(h)
        from horizonbattery.oracle import build_many_body

        dense = np.linalg.eigvalsh(build_many_body(hop, chain).matrix)
        assert s.mb_norm == pytest.approx(np.max(np.abs(dense)), abs=1e-8)

    def test_zero_norm_rejected(self):
        h = build_hamiltonian(HoppingProfile([0.0]), ChainConfig(L=2, mu=0.0))
        with pytest.raises(ArithmeticError):
            regularize(h, spectral_data(h))


class TestEffectiveScrambling:
    def test_identity(self):
        assert effective_scrambling(2.5, 1.0) == 2.5

    def test_scaling(self):
        assert effective_scrambling(3.0, 0.5) == 1.5

    def test_bad_scale(self):
        with pytest.raises(ValueError):
            effective_scrambling(1.0, 0.0)

    def test_rescaled_chain_rescales_fit(self):
        # evolving with s*h compresses time by s: the fitted rate scales by s.
        from horizonbattery.scrambling import fit_lyapunov, otoc_series

        chain = ChainConfig(L=120, d=0.01, frame="horizon")
        h = build_hamiltonian(build_hoppings(MetricProfile(2.0), chain), chain)
        s_full = spectral_data(h)
        s_half = spectral_data(h.scaled(0.5))
        times = np.arange(0.0, 40.0, 0.01)
        d1 = otoc_series(s_full, 0, 12, times)
        d2 = otoc_series(s_half, 0, 12, np.arange(0.0, 80.0, 0.02))
        f1 = fit_lyapunov(d1, 1e-6, 1e-2)
        f2 = fit_lyapunov(d2, 1e-6, 1e-2)
        assert f2.lambda_fit == pytest.approx(0.5 * f1.lambda_fit, rel=1e-6)


class TestRegularizedScan:
    def test_null_row(self):
        sched = QuenchSchedule(tau=2.0, t_max=2.0, dt=0.02)
        rows = regularized_charge_scan(0.0, [0.0], ChainConfig(L=12), sched)
        assert rows[0][1] == pytest.approx(0.0, abs=1e-10)

    def test_reports_effective_parameter(self):
        chain = ChainConfig(L=10, d=0.5)
        sched = QuenchSchedule(tau=2.0, t_max=2.0, dt=0.02)
        rows = regularized_charge_scan(0.0, [2.0], chain, sched)
        h1 = build_hamiltonian(build_hoppings(MetricProfile(2.0), chain), chain)
        scale = 1.0 / spectral_data(h1).mb_norm
        assert rows[0][0] == pytest.approx(2.0 * scale, rel=1e-12)
        assert rows[0][3] == 2.0
