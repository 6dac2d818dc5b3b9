"""Model parameters, states, memory kernel, and the coupled ODE system.

The model is a Fabry-Perot cavity with two movable mirrors.  Both mirror
positions couple collectively to a common bosonic environment whose
correlation function is an exponential (Ornstein-Uhlenbeck) memory kernel

    alpha(t, s) = (Gamma*gamma/2) * exp(-(gamma + i*Omega)|t - s|),

i.e. a Lorentzian spectral density of width ``gamma`` centered at ``Omega``.
The environment enters the mean-value dynamics through five complex
time-domain convolution (TDC) coefficients ``F_1..F_5`` which obey a closed
set of nonlinear ODEs, one per operator of the basis
(q1, q2, p1, p2, photon number).  The observable means

    V = [<q1>, <q2>, <p1>, <p2>, <n>]

obey ``dV/dt = M(F(t)) V`` -- linear in V, with all nonlinearity confined to
the TDC block.  The TDC block does not depend on V (one-way coupling), and
the photon-number row of M is identically zero, so <n> is conserved.

In the memoryless limit (gamma -> infinity at fixed Gamma) the TDCs freeze
at constants, F_1 -> Gamma*kappa_1/2, and the mean-value system becomes a
constant-coefficient linear ODE.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import _dopri
from .errors import ValidationError

__all__ = [
    "SystemParams", "EnvParams", "ModelToggles", "TdcState",
    "ObservableState", "FullState", "Trajectory",
    "ou_correlation", "spectral_density", "tdc_rhs", "mean_matrix",
    "coupled_rhs", "integrate", "TRAJECTORY_COLUMNS",
]

_PLACEMENTS = ("appendix", "paper_matrix")


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


@dataclass(frozen=True)
class SystemParams:
    """Mirror, cavity, and coupling parameters (units of the reference
    mirror frequency).

    ``omega_c`` is stored for completeness only: the photon number decouples
    from the implemented mean-value equations, so the cavity frequency never
    enters any right-hand side.  ``kappa1``/``kappa2`` are the collective
    environment coupling coefficients and must be real.
    """

    omega1: float = 1.0
    omega2: float = 1.0
    omega_c: float = 1.0
    g1: float = 1.0
    g2: float = 1.0
    kappa1: float = 1.0
    kappa2: float = 1.0

    def __post_init__(self):
        for name in ("omega1", "omega2", "omega_c", "g1", "g2",
                     "kappa1", "kappa2"):
            v = getattr(self, name)
            _require(isinstance(v, (int, float)) and not isinstance(v, bool),
                     f"system.{name} must be a real number")
            _require(math.isfinite(v), f"system.{name} must be finite")
        _require(self.omega1 > 0, "system.omega1 must be > 0")
        _require(self.omega2 > 0, "system.omega2 must be > 0")


@dataclass(frozen=True)
class EnvParams:
    """Memory-kernel parameters: overall strength ``big_gamma`` (Gamma),
    inverse memory time ``gamma``, and central frequency ``big_omega``
    (Omega).  The memory time is ``tau() = 1/gamma``."""

    big_gamma: float = 1.0
    gamma: float = 1.0
    big_omega: float = 0.0

    def __post_init__(self):
        for name in ("big_gamma", "gamma", "big_omega"):
            v = getattr(self, name)
            _require(isinstance(v, (int, float)) and not isinstance(v, bool),
                     f"environment.{name} must be a real number")
            _require(math.isfinite(v), f"environment.{name} must be finite")
        _require(self.gamma > 0, "environment.gamma must be > 0")
        _require(self.big_gamma > 0, "environment.big_gamma must be > 0")

    def tau(self) -> float:
        """Memory time of the environment."""
        return 1.0 / self.gamma


@dataclass(frozen=True)
class ModelToggles:
    """Resolves two ambiguities in the mean-value damping terms.

    damping_factor
        1 places ``Im(kappa_j F_i)`` in the momentum rows; 2 places
        ``2 kappa_j Im(F_i)`` (the value obtained by expanding the
        mean-value equations for real kappa).  Default 1.
    harmonic_placement
        Column that receives the ``-2 omega_2`` harmonic term in the second
        momentum row: "appendix" puts it on <q2> (each momentum couples to
        its own position), "paper_matrix" on <q1>.  Default "appendix".
    """

    damping_factor: int = 1
    harmonic_placement: str = "appendix"

    def __post_init__(self):
        _require(self.damping_factor in (1, 2),
                 "model.damping_factor must be 1 or 2")
        _require(self.harmonic_placement in _PLACEMENTS,
                 f"model.harmonic_placement must be one of {_PLACEMENTS}")


@dataclass(frozen=True)
class TdcState:
    """The five complex TDC coefficients at one instant, indexed by the
    operator basis O1=q1, O2=q2, O3=p1, O4=p2, O5=n.  At t=0 every
    component is exactly zero (empty convolution integral)."""

    f1: complex = 0j
    f2: complex = 0j
    f3: complex = 0j
    f4: complex = 0j
    f5: complex = 0j

    def as_complex(self) -> np.ndarray:
        return np.array([self.f1, self.f2, self.f3, self.f4, self.f5])

    def as_reals(self) -> np.ndarray:
        """Interleaved (Re, Im) layout of the five coefficients."""
        out = np.empty(10)
        c = self.as_complex()
        out[0::2] = c.real
        out[1::2] = c.imag
        return out

    @classmethod
    def from_reals(cls, r) -> "TdcState":
        r = np.asarray(r, dtype=float)
        c = r[0::2] + 1j * r[1::2]
        return cls(*map(complex, c))

    @classmethod
    def zero(cls) -> "TdcState":
        return cls()


@dataclass(frozen=True)
class ObservableState:
    """Real expectation values of the two mirrors and the photon number."""

    q1: float = 0.0
    q2: float = 0.0
    p1: float = 0.0
    p2: float = 0.0
    n: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.q1, self.q2, self.p1, self.p2, self.n])

    @classmethod
    def from_array(cls, a) -> "ObservableState":
        return cls(*map(float, a))


@dataclass(frozen=True)
class FullState:
    """Joint state: TDC block plus observable means at time ``t``.

    The packed real layout is ``[ReF1, ImF1, ..., ReF5, ImF5,
    q1, q2, p1, p2, n]`` (15 reals) so a single real-vector integrator can
    advance the joint system.
    """

    tdc: TdcState = field(default_factory=TdcState.zero)
    obs: ObservableState = field(default_factory=ObservableState)
    t: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.tdc.as_reals(), self.obs.as_array()])

    @classmethod
    def from_array(cls, y, t=0.0) -> "FullState":
        y = np.asarray(y, dtype=float)
        return cls(TdcState.from_reals(y[:10]),
                   ObservableState.from_array(y[10:]), t)


# --- kernel ----------------------------------------------------------------

def ou_correlation(env: EnvParams, dt: float) -> complex:
    """Exponential (O-U) environment correlation at time difference ``dt``:
    ``(Gamma*gamma/2) * exp(-(gamma + i*Omega)|dt|)``."""
    return 0.5 * env.big_gamma * env.gamma * cmath.exp(
        -(env.gamma + 1j * env.big_omega) * abs(dt))


def spectral_density(env: EnvParams, nu: float) -> float:
    """Lorentzian spectral density of the environment at frequency ``nu``:
    ``Gamma*gamma^2/(2*pi) / ((nu - Omega)^2 + gamma^2)``.  Strictly
    positive; peak value ``Gamma/(2*pi)`` at ``nu = Omega``."""
    return (env.big_gamma * env.gamma ** 2 / (2.0 * math.pi)
            / ((nu - env.big_omega) ** 2 + env.gamma ** 2))


# --- right-hand sides -------------------------------------------------------

def _tdc_derivs(F1, F2, F3, F4, F5, sys: SystemParams, env: EnvParams):
    """Derivatives of the five TDC coefficients (complex scalars).

    Source terms are ``(Gamma*gamma/2)*kappa_j`` (the kernel height times the
    coefficient injected at the moving upper integration limit); each
    coefficient decays at the kernel rate ``gamma + i*Omega``; the quadratic
    terms ``-i(kappa1 F3 + kappa2 F4) F_i`` are the environment
    back-reaction and are the only nonlinearity of the whole model.
    """
    lam = env.gamma + 1j * env.big_omega
    src = 0.5 * env.big_gamma * env.gamma
    w = -1j * (sys.kappa1 * F3 + sys.kappa2 * F4)
    d1 = src * sys.kappa1 - lam * F1 + 2.0 * sys.omega1 * F3 + w * F1
    d2 = src * sys.kappa2 - lam * F2 + 2.0 * sys.omega2 * F4 + w * F2
    d3 = -lam * F3 - 2.0 * sys.omega1 * F1 + w * F3
    d4 = -lam * F4 - 2.0 * sys.omega2 * F2 + w * F4
    d5 = -lam * F5 + sys.g1 * F3 + sys.g2 * F4 + w * F5
    return d1, d2, d3, d4, d5


def tdc_rhs(F: TdcState, sys: SystemParams, env: EnvParams) -> TdcState:
    """Time derivative of the TDC block (independent of the observables)."""
    return TdcState(*_tdc_derivs(F.f1, F.f2, F.f3, F.f4, F.f5, sys, env))


def mean_matrix(F: TdcState, sys: SystemParams,
                toggles: ModelToggles = ModelToggles()) -> np.ndarray:
    """5x5 real coefficient matrix of the observable means for given TDCs.

    Rows follow d/dt [<q1>, <q2>, <p1>, <p2>, <n>]; the photon-number row is
    identically zero.  The damping entries are ``c * Im(kappa_j F_i)`` with
    ``c = toggles.damping_factor``; the harmonic column of row 4 follows
    ``toggles.harmonic_placement``.
    """
    c = float(toggles.damping_factor)
    k1, k2 = sys.kappa1, sys.kappa2
    imd = np.array([F.f1.imag, F.f2.imag, F.f3.imag, F.f4.imag, F.f5.imag])
    i1 = c * k1 * imd
    i2 = c * k2 * imd
    M = np.zeros((5, 5))
    M[0, 2] = 2.0 * sys.omega1
    M[1, 3] = 2.0 * sys.omega2
    M[2, :] = i1
    M[2, 0] += -2.0 * sys.omega1
    M[2, 4] += -sys.g1
    M[3, :] = i2
    M[3, 4] += -sys.g2
    if toggles.harmonic_placement == "appendix":
        M[3, 1] += -2.0 * sys.omega2
    else:
        M[3, 0] += -2.0 * sys.omega2
    return M


def coupled_rhs(state: FullState, sys: SystemParams, env: EnvParams,
                toggles: ModelToggles = ModelToggles()) -> FullState:
    """Joint derivative: TDC block followed by ``dV/dt = M(F) V``."""
    dF = tdc_rhs(state.tdc, sys, env)
    M = mean_matrix(state.tdc, sys, toggles)
    dV = M @ state.obs.as_array()
    return FullState(dF, ObservableState.from_array(dV), state.t)


def make_rhs_array(sys: SystemParams, env: EnvParams,
                   toggles: ModelToggles = ModelToggles()):
    """Packed-array right-hand side ``f(t, y) -> dy`` over the 15-real
    layout of :class:`FullState`; this is the integrator fast path."""
    k1, k2 = sys.kappa1, sys.kappa2
    om1, om2 = sys.omega1, sys.omega2
    g1, g2 = sys.g1, sys.g2
    lam = env.gamma + 1j * env.big_omega
    s1 = 0.5 * env.big_gamma * env.gamma * k1
    s2 = 0.5 * env.big_gamma * env.gamma * k2
    c = float(toggles.damping_factor)
    appendix = toggles.harmonic_placement == "appendix"

    def rhs(t, y):
        F1 = complex(y[0], y[1])
        F2 = complex(y[2], y[3])
        F3 = complex(y[4], y[5])
        F4 = complex(y[6], y[7])
        F5 = complex(y[8], y[9])
        w = -1j * (k1 * F3 + k2 * F4)
        d1 = s1 - lam * F1 + 2.0 * om1 * F3 + w * F1
        d2 = s2 - lam * F2 + 2.0 * om2 * F4 + w * F2
        d3 = -lam * F3 - 2.0 * om1 * F1 + w * F3
        d4 = -lam * F4 - 2.0 * om2 * F2 + w * F4
        d5 = -lam * F5 + g1 * F3 + g2 * F4 + w * F5
        q1, q2, p1, p2, n = y[10], y[11], y[12], y[13], y[14]
        a1 = c * k1
        a2 = c * k2
        dp1 = ((-2.0 * om1 + a1 * F1.imag) * q1 + a1 * F2.imag * q2
               + a1 * F3.imag * p1 + a1 * F4.imag * p2
               + (-g1 + a1 * F5.imag) * n)
        dp2 = (a2 * F1.imag * q1 + a2 * F2.imag * q2 + a2 * F3.imag * p1
               + a2 * F4.imag * p2 + (-g2 + a2 * F5.imag) * n)
        if appendix:
            dp2 += -2.0 * om2 * q2
        else:
            dp2 += -2.0 * om2 * q1
        return np.array([
            d1.real, d1.imag, d2.real, d2.imag, d3.real, d3.imag,
            d4.real, d4.imag, d5.real, d5.imag,
            2.0 * om1 * p1, 2.0 * om2 * p2, dp1, dp2, 0.0,
        ])

    return rhs


# --- trajectories ------------------------------------------------------------

TRAJECTORY_COLUMNS = (
    "t", "q1", "q2", "p1", "p2", "n",
    "ReF1", "ImF1", "ReF2", "ImF2", "ReF3", "ImF3",
    "ReF4", "ImF4", "ReF5", "ImF5",
)

# internal step-controller tolerances as a fraction of the requested ones;
# keeps accumulated phase error of long oscillatory runs near the request
_TOL_SCALE = 0.1

# packed-state index for each non-time column
_COLUMN_INDEX = {
    "q1": 10, "q2": 11, "p1": 12, "p2": 13, "n": 14,
    "ReF1": 0, "ImF1": 1, "ReF2": 2, "ImF2": 3, "ReF3": 4, "ImF3": 5,
    "ReF4": 6, "ImF4": 7, "ReF5": 8, "ImF5": 9,
}


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution of the coupled system plus run metadata.

    ``states`` has one packed 15-real row per sample (TDC block first).
    Sample times are strictly increasing and uniform to one part in 1e9.
    Immutable after construction and safe to share across workers.
    """

    times: np.ndarray
    states: np.ndarray
    sys: SystemParams
    env: EnvParams
    toggles: ModelToggles
    rel_tol: float
    abs_tol: float

    def __post_init__(self):
        t = self.times
        _require(t.ndim == 1 and self.states.shape == (t.size, 15),
                 "trajectory arrays have inconsistent shapes")
        if t.size > 1:
            dt = np.diff(t)
            _require(np.all(dt > 0), "sample times must be strictly increasing")
            _require(float(dt.max() - dt.min()) <= 1e-9 * float(dt.max()),
                     "sample grid must be uniform to 1e-9")
        self.times.setflags(write=False)
        self.states.setflags(write=False)

    @property
    def dt_out(self) -> float:
        return float(self.times[1] - self.times[0]) if self.times.size > 1 \
            else 0.0

    def column(self, name: str) -> np.ndarray:
        """One named column of the trajectory schema ('q1', 'ReF3', ...)."""
        if name == "t":
            return self.times
        try:
            return self.states[:, _COLUMN_INDEX[name]]
        except KeyError:
            raise KeyError(f"unknown trajectory column {name!r}; expected one "
                           f"of {TRAJECTORY_COLUMNS}") from None

    def tdc_complex(self) -> np.ndarray:
        """All five TDC coefficients, shape ``(n_samples, 5)`` complex."""
        return self.states[:, 0:10:2] + 1j * self.states[:, 1:10:2]

    def state_at(self, i: int) -> FullState:
        return FullState.from_array(self.states[i], float(self.times[i]))

    def first(self) -> FullState:
        return self.state_at(0)


def integrate(sys: SystemParams, env: EnvParams, init: FullState,
              t_max: float, dt_out: float, rel_tol: float = 1e-9,
              abs_tol: float = 1e-11,
              toggles: ModelToggles = ModelToggles()) -> Trajectory:
    """Integrate the coupled TDC + mean-value system on ``[t0, t0+t_max]``.

    Uses the adaptive Dormand-Prince 5(4) scheme with dense output; samples
    land every ``dt_out``.  Deterministic for fixed inputs.  The controller
    steps conservatively (internal per-step tolerances are a fixed fraction
    of the requested ones) so that accumulated global errors stay near the
    requested ``rel_tol``/``abs_tol`` over long oscillatory runs.

    Raises
    ------
    ValidationError
        On bad ``t_max``/``dt_out`` or tolerances outside ``(0, 1e-3]``.
    StepSizeUnderflow, NonFiniteState
        Propagated from the stepper on stiffness/divergence.
    """
    _require(t_max > 0, "t_max must be > 0")
    _require(dt_out > 0, "dt_out must be > 0")
    for nm, tol in (("rel_tol", rel_tol), ("abs_tol", abs_tol)):
        _require(0.0 < tol <= 1e-3, f"{nm} must lie in (0, 1e-3]")
    y0 = init.as_array()
    _require(np.all(np.isfinite(y0)), "initial state must be finite")

    n_out = int(math.floor(t_max / dt_out + 1e-9))
    _require(n_out >= 1, "t_max must cover at least one dt_out interval")
    times = init.t + dt_out * np.arange(n_out + 1)

    rhs = make_rhs_array(sys, env, toggles)
    states = _dopri.solve(rhs, init.t, y0, float(times[-1]), times,
                          _TOL_SCALE * rel_tol, _TOL_SCALE * abs_tol)
    return Trajectory(times, states, sys, env, toggles, rel_tol, abs_tol)
