"""Adaptive Dormand-Prince 5(4) stepper with dense output.

Single-file explicit Runge-Kutta core used by the trajectory integrator and
the two-trajectory Lyapunov estimator.  The 5th-order solution propagates;
the embedded 4th-order solution drives the step controller.  Dense output
uses the standard quartic interpolant of the seven stages, so sampled values
carry the same accuracy order as the steps themselves.

Error policy: a non-finite right-hand side at an accepted state raises
:class:`NonFiniteState`; a step controller forced below ``min_step`` raises
:class:`StepSizeUnderflow` (trial-step overflow shrinks the step first, so
divergence surfaces as underflow at the divergence time).
"""

from __future__ import annotations

import numpy as np

from .errors import NonFiniteState, StepSizeUnderflow

# Stage times, coupling coefficients, 5th-order weights, error weights
# (difference between the 5th- and 4th-order solutions).
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([71 / 57600, 0.0, -71 / 16695, 71 / 1920,
               -17253 / 339200, 22 / 525, -1 / 40])

# Dense-output polynomial: y(t0+theta*h) = y0 + h * K^T P [theta,...,theta^4].
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608,
     -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933,
     87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304,
     -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408,
     701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883,
     -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 10.0
DEFAULT_FIRST_STEP = 1e-4
DEFAULT_MIN_STEP = 1e-12


def solve(f, t0, y0, t_end, out_times, rtol, atol,
          first_step=DEFAULT_FIRST_STEP, min_step=DEFAULT_MIN_STEP):
    """Integrate ``dy/dt = f(t, y)`` from ``t0`` to ``t_end``.

    Parameters
    ----------
    f : callable ``(t, y) -> ndarray``
    t0, y0 : initial time and state (1-d float array).
    t_end : final time, ``t_end > t0``.
    out_times : ascending sample times inside ``[t0, t_end]``.
    rtol, atol : step-controller tolerances.

    Returns
    -------
    ndarray of shape ``(len(out_times), len(y0))`` with dense-output samples;
    samples at exactly ``t0`` return ``y0`` bitwise.
    """
    y = np.array(y0, dtype=float, copy=True)
    n = y.size
    out_times = np.asarray(out_times, dtype=float)
    out = np.empty((out_times.size, n))
    io = 0
    while io < out_times.size and out_times[io] <= t0:
        out[io] = y
        io += 1

    t = t0
    K = np.empty((7, n))
    K[0] = f(t, y)
    if not np.all(np.isfinite(K[0])):
        raise NonFiniteState(t)
    h = min(first_step, t_end - t0)

    while t < t_end - 1e-14 * max(1.0, abs(t_end)):
        h = min(h, t_end - t)
        if h < min_step:
            raise StepSizeUnderflow(t, h)
        for i in range(1, 6):
            K[i] = f(t + _C[i] * h, y + h * (_A[i] @ K[:i]))
        y_new = y + h * (_B @ K[:6])
        K[6] = f(t + h, y_new)
        err = h * (_E @ K)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        with np.errstate(invalid="ignore", over="ignore", divide="ignore"):
            err_norm = float(np.sqrt(np.mean((err / scale) ** 2)))

        if not np.isfinite(err_norm):
            # overflow inside the trial step: shrink and retry
            h *= MIN_FACTOR
            continue
        if err_norm > 1.0:
            h *= max(MIN_FACTOR, SAFETY * err_norm ** -0.2)
            continue

        # accepted
        if io < out_times.size and out_times[io] <= t + h:
            hi = io
            while hi < out_times.size and out_times[hi] <= t + h + 1e-14:
                hi += 1
            theta = (out_times[io:hi] - t) / h
            tp = theta[:, None] ** np.arange(1, 5)[None, :]
            out[io:hi] = y + h * (tp @ _P.T) @ K
            io = hi
        t += h
        y = y_new
        if not np.all(np.isfinite(y)):
            raise NonFiniteState(t)
        K[0] = K[6]
        if not np.all(np.isfinite(K[0])):
            raise NonFiniteState(t)
        factor = MAX_FACTOR if err_norm == 0.0 else min(
            MAX_FACTOR, max(MIN_FACTOR, SAFETY * err_norm ** -0.2))
        h *= factor

    while io < out_times.size:
        out[io] = y
        io += 1
    return out
