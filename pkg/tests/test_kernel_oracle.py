import numpy as np
import pytest

from nmchaos.dynamics import (EnvParams, FullState, ObservableState,
                              SystemParams, integrate)
from nmchaos.errors import GridMismatch, ValidationError
from nmchaos.kernel_oracle import (boundary_row, compare_tdc,
                                   evolve_kernel_field)


def fig_init():
    return FullState(obs=ObservableState(q1=1.1, q2=1.1, n=2.0))


def test_reconstruction_starts_at_zero():
    res = evolve_kernel_field(SystemParams(), EnvParams(), 1.0, 64)
    assert np.all(res.values[0] == 0.0)


def test_short_time_growth_slope():
    """The first reconstructed samples grow like (Gamma*gamma*kappa1/2) t:
    the freshly injected boundary value times the kernel height."""
    env = EnvParams(big_gamma=1.2, gamma=2.0)
    sys_p = SystemParams()
    res = evolve_kernel_field(sys_p, env, 0.01, 64)
    slope = np.polyfit(res.times[:16], res.values[:16, 0].real, 1)[0]
    want = 0.5 * env.big_gamma * env.gamma * sys_p.kappa1
    assert slope == pytest.approx(want, rel=0.005)


def test_matches_closed_system_and_richardson_order():
    """Sup-norm agreement with the closed TDC ODEs at the acceptance
    parameters, and second-order decay of the discrepancy in the grid."""
    sys_p = SystemParams()
    env = EnvParams(gamma=1.0)
    errs = {}
    for n_s in (256, 512):
        res = evolve_kernel_field(sys_p, env, 5.0, n_s)
        traj = integrate(sys_p, env, fig_init(), 5.0, 5.0 / n_s,
                         rel_tol=1e-10, abs_tol=1e-12)
        errs[n_s] = compare_tdc(res, traj)
    assert errs[512].max() <= 1e-4
    ratio = errs[256] / errs[512]
    assert np.all(ratio > 2.5) and np.all(ratio < 6.0)


@pytest.mark.parametrize("sys_p,env", [
    # asymmetric mirrors distinguish the symmetric second-row reading of
    # the field equations from the (rejected) literal one
    (SystemParams(omega2=1.3, g1=0.7, g2=1.4, kappa1=0.6, kappa2=1.7),
     EnvParams(gamma=0.8)),
    (SystemParams(), EnvParams(gamma=1.2, big_omega=1.5)),
])
def test_matches_closed_system_off_symmetry_and_detuned(sys_p, env):
    res = evolve_kernel_field(sys_p, env, 4.0, 512)
    traj = integrate(sys_p, env, fig_init(), 4.0, 4.0 / 512,
                     rel_tol=1e-10, abs_tol=1e-12)
    assert compare_tdc(res, traj).max() <= 1e-4


def test_literal_second_row_reading_breaks_equivalence(monkeypatch):
    """Negative control for the row-two field equation: swapping the
    doubled cross term back to the first coefficient (the rejected literal
    reading) must destroy the agreement with the closed system once the
    mirrors are asymmetric."""
    from nmchaos import kernel_oracle as ko
    orig = ko._field_rhs

    def literal(f, F, sys):
        d = orig(f, F, sys)
        d[1] = d[1] + 2j * sys.kappa2 * (F[1] - F[0]) * f[3]
        return d

    sys_p = SystemParams(omega2=1.3, g1=0.7, g2=1.4, kappa1=0.6, kappa2=1.7)
    env = EnvParams(gamma=0.8)
    monkeypatch.setattr(ko, "_field_rhs", literal)
    times, vals, _ = ko._run_field(sys_p, env, 4.0, 512)
    monkeypatch.undo()
    traj = integrate(sys_p, env, fig_init(), 4.0, 4.0 / 512,
                     rel_tol=1e-10, abs_tol=1e-12)
    idx = np.rint(times / (4.0 / 512)).astype(int)
    err = np.abs(vals - traj.tdc_complex()[idx]).max()
    assert err > 1e-3  # orders of magnitude above the quadrature error


def test_err_estimate_tracks_true_error():
    sys_p = SystemParams()
    env = EnvParams(gamma=1.0)
    res = evolve_kernel_field(sys_p, env, 5.0, 256)
    traj = integrate(sys_p, env, fig_init(), 5.0, 5.0 / 256,
                     rel_tol=1e-10, abs_tol=1e-12)
    true_err = compare_tdc(res, traj)
    # Richardson estimate within a factor 4 of the measured discrepancy
    assert np.all(res.err_estimate <= 4.0 * true_err + 1e-12)
    assert np.all(true_err <= 4.0 * res.err_estimate + 1e-12)


def test_boundary_rows_are_exact_at_injection():
    """Every injected row enters with the exact diagonal values
    (kappa1, kappa2, 0, 0, 0); spot-check ten random grids by stopping the
    evolution right at an injection time and inspecting the last row."""
    sys_p = SystemParams(kappa1=0.7, kappa2=1.9)
    env = EnvParams(gamma=0.8, big_omega=0.5)
    rng = np.random.default_rng(7)
    bnd = boundary_row(sys_p)
    for n_s in rng.choice(np.arange(64, 160, 2), size=10, replace=False):
        res = evolve_kernel_field(sys_p, env, float(n_s) * 0.01, int(n_s))
        assert np.array_equal(res.field[:, -1], bnd)
    assert bnd[0] == 0.7 and bnd[1] == 1.9 and np.all(bnd[2:] == 0.0)


def test_symmetry_inheritance():
    """Symmetric mirrors give f1 == f2 and f3 == f4 at every grid point,
    hence identical reconstructed components."""
    res = evolve_kernel_field(SystemParams(), EnvParams(gamma=0.6), 4.0, 128)
    scale = np.abs(res.values).max()
    assert np.abs(res.values[:, 0] - res.values[:, 1]).max() <= 1e-8 * scale
    assert np.abs(res.values[:, 2] - res.values[:, 3]).max() <= 1e-8 * scale


def test_compare_identical_is_zero():
    sys_p = SystemParams()
    env = EnvParams(gamma=1.0)
    res = evolve_kernel_field(sys_p, env, 2.0, 128)
    traj = integrate(sys_p, env, fig_init(), 2.0, 2.0 / 128)

    class FakeOracle:
        times = traj.times
        values = traj.tdc_complex()

    assert np.all(compare_tdc(FakeOracle(), traj) == 0.0)


def test_compare_grid_mismatch():
    sys_p = SystemParams()
    env = EnvParams(gamma=1.0)
    res = evolve_kernel_field(sys_p, env, 2.0, 128)
    traj = integrate(sys_p, env, fig_init(), 2.0, 0.03)
    with pytest.raises(GridMismatch):
        compare_tdc(res, traj)


def test_unresolved_oscillation_raises_grid_too_coarse():
    """A central frequency far above the grid Nyquist rate aliases the
    kernel phase; the refinement check must catch it."""
    from nmchaos.errors import GridTooCoarse
    with pytest.raises(GridTooCoarse):
        evolve_kernel_field(SystemParams(), EnvParams(gamma=1.0,
                                                      big_omega=120.0),
                            5.0, 64)


def test_preconditions():
    with pytest.raises(ValidationError):
        evolve_kernel_field(SystemParams(), EnvParams(), -1.0, 128)
    with pytest.raises(ValidationError):
        evolve_kernel_field(SystemParams(), EnvParams(), 1.0, 32)
