import math

import numpy as np
import pytest
from scipy.optimize import root

from nmchaos.dynamics import (EnvParams, FullState, ModelToggles,
                              ObservableState, SystemParams, TdcState,
                              coupled_rhs, integrate, make_rhs_array,
                              mean_matrix, tdc_rhs)
from nmchaos.errors import ValidationError


def tdc_rhs_packed(sys_p, env_p):
    """Root-finding helper over the 10-real TDC layout."""
    def fun(r):
        d = tdc_rhs(TdcState.from_reals(r), sys_p, env_p)
        return d.as_reals()
    return fun


class TestTdcRhs:
    def test_zero_state_leaves_sources_only(self):
        sys_p = SystemParams()
        env_p = EnvParams(gamma=2.0)
        d = tdc_rhs(TdcState.zero(), sys_p, env_p)
        assert d.f1 == pytest.approx(1.0 + 0j)
        assert d.f2 == pytest.approx(1.0 + 0j)
        assert d.f3 == d.f4 == d.f5 == 0j

    def test_mirror_index_symmetry(self):
        sys_p = SystemParams()  # kappa1=kappa2, omega1=omega2
        env_p = EnvParams(gamma=0.7, big_omega=0.4)
        F = TdcState(f1=0.3 + 0.1j, f2=0.3 + 0.1j, f3=-0.2 + 0.05j,
                     f4=-0.2 + 0.05j, f5=0.01j)
        d = tdc_rhs(F, sys_p, env_p)
        assert d.f1 == d.f2
        assert d.f3 == d.f4

    def test_memoryless_root_matches_half_kappa(self):
        """Numerical root of the stationarity condition at gamma = 100."""
        sys_p = SystemParams()
        env_p = EnvParams(gamma=100.0)
        sol = root(tdc_rhs_packed(sys_p, env_p), np.zeros(10), tol=1e-12)
        assert sol.success
        F = TdcState.from_reals(sol.x)
        assert abs(F.f1 - 0.5 * sys_p.kappa1) <= 0.02 * 0.5 * sys_p.kappa1
        assert abs(F.f3) < 0.05

    def test_big_gamma_scales_source(self):
        d = tdc_rhs(TdcState.zero(), SystemParams(),
                    EnvParams(big_gamma=3.0, gamma=2.0))
        assert d.f1 == pytest.approx(3.0 + 0j)


class TestMeanMatrix:
    def test_zero_tdc_matrix(self):
        M = mean_matrix(TdcState.zero(), SystemParams())
        want = np.array([
            [0, 0, 2, 0, 0],
            [0, 0, 0, 2, 0],
            [-2, 0, 0, 0, -1],
            [0, -2, 0, 0, -1],
            [0, 0, 0, 0, 0],
        ], dtype=float)
        assert np.array_equal(M, want)

    def test_paper_matrix_placement_moves_harmonic_column(self):
        M = mean_matrix(TdcState.zero(), SystemParams(),
                        ModelToggles(harmonic_placement="paper_matrix"))
        assert M[3, 0] == -2.0 and M[3, 1] == 0.0

    def test_fifth_row_always_zero(self):
        F = TdcState(f1=1 + 2j, f2=-0.5j, f3=3 - 1j, f4=0.2, f5=9j)
        for toggles in (ModelToggles(), ModelToggles(damping_factor=2),
                        ModelToggles(harmonic_placement="paper_matrix")):
            M = mean_matrix(F, SystemParams(g1=2.0, g2=3.0), toggles)
            assert np.array_equal(M[4], np.zeros(5))

    def test_imaginary_part_extraction(self):
        # kappa1*F3 = i  ->  entry (p1, p1) = damping_factor * 1
        F = TdcState(f3=1j)
        M = mean_matrix(F, SystemParams())
        assert M[2, 2] == 1.0
        M2 = mean_matrix(F, SystemParams(), ModelToggles(damping_factor=2))
        assert M2[2, 2] == 2.0


class TestCoupledRhs:
    def test_zero_observables_stay_zero(self):
        state = FullState(TdcState(f1=0.4 + 0.2j, f3=-0.1j),
                          ObservableState())
        d = coupled_rhs(state, SystemParams(), EnvParams())
        assert d.obs.as_array().tolist() == [0.0] * 5

    def test_photon_number_derivative_is_zero(self):
        state = FullState(TdcState(f1=1j, f5=2 + 1j),
                          ObservableState(q1=1, q2=-2, p1=3, p2=0.5, n=7))
        d = coupled_rhs(state, SystemParams(), EnvParams())
        assert d.obs.n == 0.0

    def test_bare_harmonic_block(self):
        sys_p = SystemParams(g1=0.0, g2=0.0, kappa1=0.0, kappa2=0.0)
        state = FullState(obs=ObservableState(q1=1.0))
        d = coupled_rhs(state, sys_p, EnvParams())
        assert d.obs.q1 == 0.0
        assert d.obs.p1 == -2.0

    def test_packed_rhs_agrees_with_typed_rhs(self):
        sys_p = SystemParams(omega2=1.3, g2=0.7, kappa2=0.5)
        env_p = EnvParams(gamma=0.8, big_omega=1.1)
        state = FullState(TdcState(0.1 + 0.2j, -0.3j, 0.05, 1 - 1j, 0.2j),
                          ObservableState(1.0, -0.5, 0.25, 2.0, 3.0))
        for toggles in (ModelToggles(), ModelToggles(damping_factor=2),
                        ModelToggles(harmonic_placement="paper_matrix")):
            packed = make_rhs_array(sys_p, env_p, toggles)(0.0,
                                                           state.as_array())
            typed = coupled_rhs(state, sys_p, env_p, toggles).as_array()
            assert np.abs(packed - typed).max() < 1e-14


class TestIntegrate:
    def test_decoupled_harmonic_solution(self):
        sys_p = SystemParams(g1=0.0, g2=0.0, kappa1=0.0, kappa2=0.0)
        traj = integrate(sys_p, EnvParams(),
                         FullState(obs=ObservableState(q1=1.0)),
                         t_max=50.0, dt_out=0.05)
        rel_tol = traj.rel_tol
        err = np.abs(traj.column("q1") - np.cos(2.0 * traj.times)).max()
        assert err <= 10.0 * rel_tol

    def test_initial_sample_is_bitwise_init(self, base_sys, base_init):
        traj = integrate(base_sys, EnvParams(), base_init, 1.0, 0.1)
        first = traj.first()
        assert first.obs == base_init.obs
        assert first.tdc == TdcState.zero()

    def test_photon_number_conserved(self, base_sys, base_init):
        traj = integrate(base_sys, EnvParams(), base_init, 60.0, 0.05)
        assert np.abs(traj.column("n") - 2.0).max() <= 10 * traj.abs_tol

    def test_self_convergence(self, base_sys, base_init):
        kw = dict(t_max=40.0, dt_out=0.1)
        a = integrate(base_sys, EnvParams(), base_init, rel_tol=1e-7,
                      abs_tol=1e-9, **kw)
        b = integrate(base_sys, EnvParams(), base_init, rel_tol=1e-9,
                      abs_tol=1e-11, **kw)
        rel = np.abs(a.states - b.states).max() / np.abs(b.states).max()
        assert rel <= 100 * 1e-7

    def test_determinism(self, base_sys, base_init):
        a = integrate(base_sys, EnvParams(gamma=0.5), base_init, 20.0, 0.05)
        b = integrate(base_sys, EnvParams(gamma=0.5), base_init, 20.0, 0.05)
        assert np.array_equal(a.states, b.states)

    def test_validation(self, base_sys, base_init):
        with pytest.raises(ValidationError):
            integrate(base_sys, EnvParams(), base_init, -1.0, 0.1)
        with pytest.raises(ValidationError):
            integrate(base_sys, EnvParams(), base_init, 1.0, 0.1,
                      rel_tol=0.1)
        with pytest.raises(ValidationError):
            integrate(base_sys, EnvParams(), base_init, 1.0, 0.0)


class TestInvariants:
    def test_superposition_of_observables(self, base_sys):
        """With a shared TDC evolution the observable block is linear."""
        env = EnvParams(gamma=0.7)
        v0 = ObservableState(q1=1.1, q2=0.3, p1=-0.2, p2=0.8, n=2.0)
        w0 = ObservableState(q1=-0.4, q2=1.0, p1=0.5, p2=-1.2, n=1.0)
        a, b = 0.6, -1.7
        mix = ObservableState(*(a * v0.as_array() + b * w0.as_array()))
        kw = dict(t_max=30.0, dt_out=0.05)
        tv = integrate(base_sys, env, FullState(obs=v0), **kw)
        tw = integrate(base_sys, env, FullState(obs=w0), **kw)
        tm = integrate(base_sys, env, FullState(obs=mix), **kw)
        combo = a * tv.states[:, 10:] + b * tw.states[:, 10:]
        scale = np.abs(tm.states[:, 10:]).max()
        assert np.abs(tm.states[:, 10:] - combo).max() <= 1e-6 * scale

    def test_mirror_exchange_symmetry(self):
        sys_p = SystemParams()  # fully symmetric
        env = EnvParams(gamma=0.4, big_omega=0.3)
        init = FullState(obs=ObservableState(q1=0.9, q2=0.9, p1=-0.3,
                                             p2=-0.3, n=1.5))
        traj = integrate(sys_p, env, init, 40.0, 0.05)
        scale = np.abs(traj.states).max()
        assert np.abs(traj.column("q1") - traj.column("q2")).max() \
            <= 1e-6 * scale
        assert np.abs(traj.column("p1") - traj.column("p2")).max() \
            <= 1e-6 * scale
        F = traj.tdc_complex()
        assert np.abs(F[:, 0] - F[:, 1]).max() <= 1e-6 * np.abs(F).max()
        assert np.abs(F[:, 2] - F[:, 3]).max() <= 1e-6 * np.abs(F).max()

    def test_markovian_constancy(self, base_sys, base_init):
        """Deep memoryless regime: TDCs freeze, F1 -> kappa1/2."""
        traj = integrate(base_sys, EnvParams(gamma=50.0), base_init,
                         50.0, 0.01)
        sel = traj.times >= 5.0
        F = traj.tdc_complex()[sel]
        dF = np.abs(np.gradient(F, 0.01, axis=0))
        assert dF.max() <= 1e-2
        assert np.abs(F[:, 0] - 0.5).max() <= 0.02 * 0.5

    def test_short_time_tdc_growth_slope(self, base_sys, base_init):
        """F1 grows like (Gamma*gamma*kappa1/2) * t out of the empty
        integral; linear fit over t in [0, 1e-3]."""
        env = EnvParams(big_gamma=1.3, gamma=2.4)
        traj = integrate(base_sys, env, base_init, 1e-3, 1e-5)
        t = traj.times
        f1 = traj.column("ReF1")
        slope = np.polyfit(t, f1, 1)[0]
        want = 0.5 * env.big_gamma * env.gamma * base_sys.kappa1
        assert slope == pytest.approx(want, rel=0.005)

    def test_rhs_matches_finite_differences_of_dense_output(self, base_sys):
        env = EnvParams(gamma=0.9, big_omega=0.6)
        toggles = ModelToggles()
        init = FullState(obs=ObservableState(q1=1.1, q2=1.1, n=2.0))
        rel_tol = 1e-9
        rng = np.random.default_rng(20240817)
        probes = np.sort(rng.uniform(0.5, 19.5, 20))
        h = 1e-4
        times = np.sort(np.concatenate(
            [[0.0], probes - h, probes, probes + h, [20.0]]))
        from nmchaos import _dopri
        rhs = make_rhs_array(base_sys, env, toggles)
        ys = _dopri.solve(rhs, 0.0, init.as_array(), 20.0, times,
                          0.1 * rel_tol, 0.1 * 1e-11)
        scale = np.abs(ys).max()
        for k, tp in enumerate(probes):
            i = np.searchsorted(times, tp)
            fd = (ys[i + 1] - ys[i - 1]) / (2.0 * h)
            exact = rhs(tp, ys[i])
            denom = max(np.abs(exact).max(), scale)
            assert np.abs(fd - exact).max() / denom <= 10 * rel_tol
