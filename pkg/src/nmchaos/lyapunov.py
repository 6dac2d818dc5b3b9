"""Maximum Lyapunov exponent estimators.

Two independent routes are provided and cross-validated in the test suite:

* :func:`wolf_max_le` -- neighbor tracking on a delay-coordinate
  reconstruction of a scalar series: follow a fiducial point and its nearest
  neighbor, accumulate the log-stretch of their separation each time it
  exceeds a threshold, then replace the neighbor with a close point that
  minimizes the angle to the previous separation vector.
* :func:`benettin_max_le` -- two-trajectory tracking directly on an ODE
  flow with periodic renormalization of the offset.

Both return a :class:`LyapunovSeries`: replacement/renormalization event
times with per-event log-stretches and the running estimate

    lambda(t) = (1 / (t - t0)) * sum of log-stretches of events up to t.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import _dopri
from .errors import (DegenerateCloud, EmptyWindow, SeriesTooShort,
                     ValidationError)

__all__ = ["EmbeddingConfig", "LyapunovSeries", "autocorrelation_delay",
           "delay_embed", "wolf_max_le", "benettin_max_le",
           "windowed_mean_le"]

logger = logging.getLogger(__name__)

# neighbor replacement: base half-angle of the acceptance cone (30 deg),
# doubled until a candidate is found
_ANGLE_TOL = math.pi / 6.0
# brute-force neighbor search up to this cloud size, grid buckets above
_BRUTE_LIMIT = 20_000


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


@dataclass(frozen=True)
class EmbeddingConfig:
    """Delay-embedding and tracking parameters for :func:`wolf_max_le`.

    ``delay=None`` resolves to the 1/e-crossing of the series
    autocorrelation (quarter of the dominant period when the
    autocorrelation never drops that far); ``theiler=None`` resolves to
    twice the resolved delay.  ``epsilon_frac`` sets the replacement
    threshold as a fraction of the embedded cloud's bounding-box diagonal.
    """

    dim: int = 4
    delay: Optional[int] = None
    theiler: Optional[int] = None
    epsilon_frac: float = 0.1
    evolve_steps: int = 5

    def __post_init__(self):
        _require(self.dim >= 2, "embedding dim must be >= 2")
        if self.delay is not None:
            _require(self.delay >= 1, "delay must be >= 1 (or None for auto)")
        if self.theiler is not None:
            _require(self.theiler >= 0, "theiler must be >= 0 (or None)")
        _require(0.0 < self.epsilon_frac < 1.0,
                 "epsilon_frac must lie in (0, 1)")
        _require(self.evolve_steps >= 1, "evolve_steps must be >= 1")


@dataclass(frozen=True)
class LyapunovSeries:
    """Replacement-event record and running maximum-LE estimate.

    ``event_times`` are strictly increasing times (relative to the start of
    tracking at ``t0``); ``log_stretches[k]`` is ``ln(A'(t_k)/A(t_{k-1}))``.
    The running estimate is defined from the first event on and is resampled
    onto ``grid`` by previous-value hold.
    """

    event_times: np.ndarray
    log_stretches: np.ndarray
    grid: np.ndarray
    t0: float = 0.0
    angle_violations: int = 0

    def __post_init__(self):
        _require(self.event_times.shape == self.log_stretches.shape,
                 "event arrays must have equal length")
        if self.event_times.size:
            _require(bool(np.all(np.diff(self.event_times) > 0)),
                     "event times must be strictly increasing")
            _require(bool(self.event_times[0] > self.t0),
                     "events must happen strictly after t0")
        for a in (self.event_times, self.log_stretches, self.grid):
            a.setflags(write=False)

    @property
    def n_events(self) -> int:
        return int(self.event_times.size)

    def running_at_events(self) -> np.ndarray:
        """lambda(t_k) at each event time."""
        return np.cumsum(self.log_stretches) / (self.event_times - self.t0)

    def running(self, times) -> np.ndarray:
        """Previous-value-hold resample of the running estimate; NaN before
        the first event."""
        times = np.asarray(times, dtype=float)
        out = np.full(times.shape, np.nan)
        if self.event_times.size == 0:
            return out
        vals = self.running_at_events()
        k = np.searchsorted(self.event_times, times, side="right") - 1
        ok = k >= 0
        out[ok] = vals[k[ok]]
        return out

    def final_lambda(self) -> float:
        """Estimate at the last event; NaN when no event occurred."""
        if self.event_times.size == 0:
            return math.nan
        return float(self.running_at_events()[-1])


def autocorrelation_delay(series, sample_dt: float) -> int:
    """Embedding delay in samples: first drop of the autocorrelation below
    1/e, falling back to a quarter of the dominant period when the
    autocorrelation never drops that far."""
    x = np.asarray(series, dtype=float)
    x = x - x.mean()
    n = x.size
    if n < 4:
        return 1
    size = 1 << (2 * n - 1).bit_length()
    spec = np.fft.rfft(x, size)
    ac = np.fft.irfft(spec * np.conj(spec), size)[:n]
    if ac[0] <= 0:
        return 1
    ac = ac / ac[0]
    below = np.flatnonzero(ac < 1.0 / math.e)
    if below.size:
        return max(1, int(below[0]))
    power = np.abs(np.fft.rfft(x)) ** 2
    if power.size < 2:
        return 1
    kpeak = int(np.argmax(power[1:])) + 1
    period = n / kpeak  # samples
    return max(1, int(round(period / 4.0)))


def delay_embed(series, dim: int, delay: int) -> np.ndarray:
    """Delay-coordinate point cloud: row ``j`` is
    ``(x_j, x_{j+delay}, ..., x_{j+(dim-1)*delay})``.

    Raises :class:`SeriesTooShort` unless
    ``len(series) > (dim - 1) * delay + 1``.
    """
    _require(dim >= 2, "embedding dim must be >= 2")
    _require(delay >= 1, "delay must be >= 1")
    x = np.asarray(series, dtype=float)
    window = (dim - 1) * delay + 1
    if x.size <= window:
        raise SeriesTooShort(
            f"need more than {window} samples for dim={dim}, delay={delay}; "
            f"got {x.size}")
    n = x.size - (dim - 1) * delay
    idx = np.arange(n)[:, None] + delay * np.arange(dim)[None, :]
    return x[idx]


class _NeighborSearch:
    """Exact neighbor queries on the embedded cloud.

    Brute force for small clouds; uniform grid buckets (cell size = the
    replacement threshold) above ``_BRUTE_LIMIT`` points.  Both paths return
    identical results: candidates are exact-distance filtered and visited in
    index order.
    """

    def __init__(self, Y: np.ndarray, eps: float):
        self.Y = Y
        self.eps = eps
        self.n = Y.shape[0]
        self.brute = self.n <= _BRUTE_LIMIT
        if not self.brute:
            keys = np.floor(Y / eps).astype(np.int64)
            order = np.lexsort(keys.T[::-1])
            sk = keys[order]
            start = np.flatnonzero(np.any(np.diff(sk, axis=0) != 0, axis=1))
            bounds = np.concatenate([[0], start + 1, [self.n]])
            self.cells = {
                tuple(sk[bounds[i]]): order[bounds[i]:bounds[i + 1]]
                for i in range(bounds.size - 1)
            }

    def _gather(self, p, r):
        lo = np.floor((p - r) / self.eps).astype(np.int64)
        hi = np.floor((p + r) / self.eps).astype(np.int64)
        span = hi - lo + 1
        if np.prod(span.astype(float)) > max(4 * len(self.cells), 4096):
            return np.arange(self.n)
        parts = []
        for flat in range(int(np.prod(span))):
            key, rem = [], flat
            for d in range(span.size):
                key.append(lo[d] + rem % span[d])
                rem //= span[d]
            got = self.cells.get(tuple(key))
            if got is not None:
                parts.append(got)
        if not parts:
            return np.empty(0, dtype=np.int64)
        return np.sort(np.concatenate(parts))

    def within(self, j: int, r: float):
        """(indices, distances) of points with 0 < d(Y[j], .) <= r, in
        ascending index order (point j itself excluded by zero distance)."""
        p = self.Y[j]
        cand = np.arange(self.n) if self.brute else self._gather(p, r)
        d = np.sqrt(((self.Y[cand] - p) ** 2).sum(axis=1))
        keep = (d > 0.0) & (d <= r)
        return cand[keep], d[keep]


def _select_neighbor(search, Y, j, theiler, eps, evolve, diam, vold=None):
    """Tracking neighbor for fiducial ``j``: inside the threshold ball,
    outside the Theiler window, with room to advance.  With a previous
    separation vector ``vold``, pick the smallest distance inside the
    base angle cone, doubling the cone until non-empty; without one, pick
    the nearest.  Falls back to the nearest admissible point at any
    distance.  Returns (index, distance, violated_base_angle)."""
    n = Y.shape[0]

    def admissible(idx):
        keep = np.abs(idx - j) > theiler
        keep &= idx + evolve < n
        return keep

    if vold is not None and not np.linalg.norm(vold) > 0.0:
        vold = None  # coincident points carry no direction preference
    idx, d = search.within(j, eps)
    keep = admissible(idx)
    idx, d = idx[keep], d[keep]
    if idx.size:
        if vold is None:
            k = int(np.argmin(d))
            return int(idx[k]), float(d[k]), False
        u = vold / np.linalg.norm(vold)
        cosang = np.clip((Y[idx] - Y[j]) @ u / d, -1.0, 1.0)
        ang = np.arccos(cosang)
        tol = _ANGLE_TOL
        while tol <= math.pi * 1.0000001:
            inside = ang <= tol
            if inside.any():
                sub = np.flatnonzero(inside)
                k = sub[int(np.argmin(d[sub]))]
                return int(idx[k]), float(d[k]), tol > _ANGLE_TOL
            tol *= 2.0
    # no candidate inside the ball: nearest admissible point overall
    r = eps
    while r <= 2.0 * diam:
        r *= 2.0
        idx, d = search.within(j, r)
        keep = admissible(idx)
        idx, d = idx[keep], d[keep]
        if idx.size:
            k = int(np.argmin(d))
            return int(idx[k]), float(d[k]), True
    raise DegenerateCloud("no admissible neighbor exists for the fiducial "
                          "point")


def wolf_max_le(series, sample_dt: float,
                cfg: EmbeddingConfig = EmbeddingConfig()) -> LyapunovSeries:
    """Maximum-LE estimate of a scalar series by neighbor tracking on its
    delay reconstruction.

    The series is z-scored, embedded with ``cfg``, and tracked from its
    first point: the fiducial and its nearest admissible neighbor advance
    ``cfg.evolve_steps`` samples at a time; when their separation exceeds
    ``eps = epsilon_frac * (cloud bounding-box diagonal)`` the log-stretch
    is recorded and the neighbor is replaced (minimal angle to the old
    separation vector among points inside the ball, nearest first).  When
    the neighbor runs out of samples it is replaced in place; the last
    partial segment is accumulated at the end.  Pure function of its
    arguments; z-scoring makes the result exactly invariant under positive
    scaling and constant shifts of the series.

    Raises
    ------
    SeriesTooShort
        If the series cannot be embedded (or nothing can be tracked).
    DegenerateCloud
        If the series is constant or the cloud has fewer than ``2 * dim``
        distinct points.
    """
    x = np.asarray(series, dtype=float)
    _require(bool(np.all(np.isfinite(x))), "series must be finite")
    _require(sample_dt > 0, "sample_dt must be > 0")
    # anchor at the minimum before z-scoring: float subtraction is
    # correctly rounded, so a representation-exact constant shift of the
    # input cancels bitwise and the whole estimate is shift-invariant
    x = x - x.min()
    sd = float(x.std())
    if not sd > 0.0:
        raise DegenerateCloud("series standard deviation is zero")
    x = (x - x.mean()) / sd

    delay = cfg.delay if cfg.delay is not None \
        else autocorrelation_delay(x, sample_dt)
    max_delay = (x.size - 2) // (cfg.dim - 1) if cfg.dim > 1 else 1
    if cfg.delay is None and max_delay >= 1 and delay > max_delay:
        logger.debug("auto delay %d clamped to %d", delay, max_delay)
        delay = max_delay
    Y = delay_embed(x, cfg.dim, delay)
    if cfg.theiler is not None:
        theiler = cfg.theiler
    else:
        # auto: twice the delay, capped so the exclusion zone cannot
        # swallow the whole cloud on slowly decorrelating series
        theiler = min(2 * delay, max(1, Y.shape[0] // 4))
    n = Y.shape[0]
    if np.unique(Y, axis=0).shape[0] < 2 * cfg.dim:
        raise DegenerateCloud(
            f"embedded cloud has fewer than {2 * cfg.dim} distinct points")
    diam = float(np.linalg.norm(Y.max(axis=0) - Y.min(axis=0)))
    eps = cfg.epsilon_frac * diam
    evolve = cfg.evolve_steps
    if evolve >= n:
        raise SeriesTooShort("series too short to advance the fiducial")

    search = _NeighborSearch(Y, eps)
    j = 0
    nb, A, _ = _select_neighbor(search, Y, j, theiler, eps, evolve, diam)
    ev_t, ev_s = [], []
    violations = 0
    last_event_j = 0

    while j + evolve < n:
        jn, nbn = j + evolve, nb + evolve
        if nbn < n:
            sep = float(np.linalg.norm(Y[jn] - Y[nbn]))
            if sep <= eps:
                j, nb = jn, nbn
                continue
            ev_t.append(jn * sample_dt)
            ev_s.append(math.log(sep / A))
            nb, A, viol = _select_neighbor(search, Y, jn, theiler, eps,
                                           evolve, diam, vold=Y[nbn] - Y[jn])
            violations += viol
            j = jn
            last_event_j = jn
        else:
            # neighbor ran out of samples: replace in place
            sep = float(np.linalg.norm(Y[j] - Y[nb]))
            if j > last_event_j and sep > 0.0:
                ev_t.append(j * sample_dt)
                ev_s.append(math.log(sep / A))
            nb, A, viol = _select_neighbor(search, Y, j, theiler, eps,
                                           evolve, diam, vold=Y[nb] - Y[j])
            violations += viol
            last_event_j = j

    sep = float(np.linalg.norm(Y[j] - Y[nb]))
    if j > last_event_j and sep > 0.0:
        ev_t.append(j * sample_dt)
        ev_s.append(math.log(sep / A))

    if violations:
        logger.debug("wolf_max_le: %d angle-constraint violations", violations)
    grid = sample_dt * np.arange(n)
    return LyapunovSeries(np.asarray(ev_t), np.asarray(ev_s), grid,
                          t0=0.0, angle_violations=violations)


def benettin_max_le(rhs: Callable, init, delta0: float = 1e-8,
                    renorm_dt: float = 0.5, horizon: float = 100.0,
                    rel_tol: float = 1e-8, abs_tol: float = 1e-10,
                    ) -> LyapunovSeries:
    """Maximum-LE estimate of the flow ``dy/dt = rhs(t, y)`` by integrating
    a fiducial and an offset trajectory, renormalizing the offset back to
    ``delta0`` every ``renorm_dt`` and accumulating ``ln(|offset|/delta0)``.

    The initial offset is ``delta0`` along the diagonal unit vector.
    ``delta0`` must lie in ``[1e-10, 1e-4]``.
    """
    _require(1e-10 <= delta0 <= 1e-4, "delta0 must lie in [1e-10, 1e-4]")
    _require(renorm_dt > 0, "renorm_dt must be > 0")
    _require(horizon > renorm_dt, "horizon must exceed renorm_dt")
    y = np.asarray(init, dtype=float)
    m = y.size

    def pair_rhs(t, z):
        return np.concatenate([rhs(t, z[:m]), rhs(t, z[m:])])

    z = np.concatenate([y, y + delta0 / math.sqrt(m)])
    n_seg = int(math.floor(horizon / renorm_dt + 1e-9))
    ev_t = np.empty(n_seg)
    ev_s = np.empty(n_seg)
    t = 0.0
    for k in range(n_seg):
        t_next = (k + 1) * renorm_dt
        z = _dopri.solve(pair_rhs, t, z, t_next, [t_next],
                         rel_tol, abs_tol)[0]
        dvec = z[m:] - z[:m]
        dist = float(np.linalg.norm(dvec))
        if dist == 0.0 or not math.isfinite(dist):
            raise DegenerateCloud("offset trajectory collapsed onto the "
                                  "fiducial; decrease renorm_dt")
        ev_t[k] = t_next
        ev_s[k] = math.log(dist / delta0)
        z[m:] = z[:m] + dvec * (delta0 / dist)
        t = t_next
    grid = renorm_dt * np.arange(n_seg + 1)
    return LyapunovSeries(ev_t, ev_s, grid, t0=0.0)


def windowed_mean_le(series: LyapunovSeries, t_lo: float,
                     t_hi: float) -> float:
    """Mean of the running estimate over grid samples in ``[t_lo, t_hi]``.

    Raises :class:`EmptyWindow` when no grid point in the window carries a
    defined estimate (no event at or before it).
    """
    _require(t_lo < t_hi, "t_lo must be < t_hi")
    sel = (series.grid >= t_lo) & (series.grid <= t_hi)
    vals = series.running(series.grid[sel])
    vals = vals[~np.isnan(vals)]
    if vals.size == 0:
        raise EmptyWindow(f"no defined estimate samples in "
                          f"[{t_lo:g}, {t_hi:g}]")
    return float(vals.mean())
