import numpy as np
import pytest

from nmchaos.dynamics import (EnvParams, FullState, ObservableState,
                              SystemParams)


@pytest.fixture
def base_sys():
    """Symmetric mirrors, unit couplings (the standard caption values)."""
    return SystemParams()


@pytest.fixture
def base_init():
    """Standard displaced start: q = 1.1 on both mirrors, two photons."""
    return FullState(obs=ObservableState(q1=1.1, q2=1.1, n=2.0))


def lorenz_rhs(t, v):
    x, y, z = v
    return np.array([10.0 * (y - x), x * (28.0 - z) - y, x * y - 8.0 / 3.0 * z])


@pytest.fixture(scope="session")
def lorenz_series():
    """Lorenz-63 x-component, dt = 0.01, 1e5 samples, transient dropped.

    Generated with an independent integrator (scipy) so estimator tests do
    not share code with the package's own stepper.
    """
    from scipy.integrate import solve_ivp
    sol = solve_ivp(lorenz_rhs, (0.0, 1100.0), [1.0, 1.0, 1.0],
                    method="RK45", rtol=1e-9, atol=1e-11, dense_output=True)
    assert sol.success
    tt = np.arange(100.0, 1100.0, 0.01)
    return sol.sol(tt)[0]
