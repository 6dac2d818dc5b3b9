"""Preset parameter sweeps over environment and coupling parameters.

Each sweep integrates the coupled system per grid cell, estimates the
maximum LE of the requested trajectory columns, and emits long-format
records: either the running estimate per output time (heatmap style) or a
single windowed mean per cell (contour style).  Cells are pure and
independent; failures are recorded per cell and never abort the sweep.
"""

from __future__ import annotations

import dataclasses
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dynamics import (EnvParams, FullState, ModelToggles, ObservableState,
                       SystemParams, TRAJECTORY_COLUMNS, integrate)
from .errors import ValidationError
from .lyapunov import EmbeddingConfig, windowed_mean_le, wolf_max_le

__all__ = [
    "SweepSpec", "GridRecord", "GridResult", "run_sweep",
    "run_fig2", "run_fig3", "run_fig4", "run_fig5", "run_fig6",
    "fig2_spec", "fig3_spec", "fig4_spec", "fig5_spec", "fig6_spec",
]

_TDC_COLUMNS = ("ReF1", "ReF2", "ReF3", "ReF4", "ReF5")

# caption parameter sets for the preset sweeps
_FIG2_INIT = ObservableState(q1=1.1, q2=1.1, p1=0.0, p2=0.0, n=2.0)
_FIG5_INIT = ObservableState(q1=1.0, q2=1.0, p1=2.0, p2=2.0, n=1.0)
_FIG6_INIT = ObservableState(q1=0.0, q2=0.0, p1=1.1, p2=1.1, n=2.0)


def _require(cond, msg):
    if not cond:
        raise ValidationError(msg)


@dataclass(frozen=True)
class SweepSpec:
    """Fully resolved description of one sweep.

    ``axes`` holds one or two (parameter-name, values) pairs; recognized
    parameter names are ``tau`` (memory time, sets gamma = 1/tau),
    ``gamma``, ``big_omega``, ``kappa1`` and ``kappa2``.  ``window=None``
    emits the time-resolved running estimate; a (lo, hi) window emits one
    windowed mean per cell.
    """

    figure: str
    sys: SystemParams
    env: EnvParams
    init: ObservableState
    axes: tuple
    observables: tuple
    t_max: float
    dt_out: float
    window: Optional[tuple] = None
    toggles: ModelToggles = field(default_factory=ModelToggles)
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11

    def __post_init__(self):
        _require(1 <= len(self.axes) <= 2, "sweeps support one or two axes")
        for name, values in self.axes:
            _require(name in ("tau", "gamma", "big_omega", "kappa1", "kappa2"),
                     f"unknown sweep axis {name!r}")
            _require(len(values) > 0, f"axis {name!r} has no values")
            _require(all(math.isfinite(v) for v in values),
                     f"axis {name!r} has non-finite values")
        for obs in self.observables:
            _require(obs in TRAJECTORY_COLUMNS and obs != "t",
                     f"observable {obs!r} is not a trajectory column")
        if self.window is not None:
            _require(self.window[0] < self.window[1],
                     "window must satisfy lo < hi")

    def cells(self):
        """All grid cells in row-major order: tuples of (name, value)."""
        if len(self.axes) == 1:
            name, values = self.axes[0]
            return [((name, float(v)),) for v in values]
        (n1, v1), (n2, v2) = self.axes
        return [((n1, float(a)), (n2, float(b))) for a in v1 for b in v2]


@dataclass(frozen=True)
class GridRecord:
    """One long-format sweep record."""

    axes: tuple          # ((name, value), ...) for this cell
    t_or_window: str     # sample time, "lo:hi" window tag, or "" on failure
    observable: str
    lam: float
    failed: bool = False
    error: str = ""


@dataclass(frozen=True)
class GridResult:
    """Sweep output: records plus provenance metadata.

    Metadata (spec echo, package version, wall time) is excluded from
    equality so that identical sweeps compare equal record-for-record.
    """

    records: tuple
    axis_names: tuple
    metadata: dict = field(compare=False)


def _apply_cell(sys: SystemParams, env: EnvParams, cell):
    for name, value in cell:
        if name == "tau":
            _require(value > 0, "tau values must be > 0")
            env = dataclasses.replace(env, gamma=1.0 / value)
        elif name == "gamma":
            env = dataclasses.replace(env, gamma=value)
        elif name == "big_omega":
            env = dataclasses.replace(env, big_omega=value)
        elif name == "kappa1":
            sys = dataclasses.replace(sys, kappa1=value)
        elif name == "kappa2":
            sys = dataclasses.replace(sys, kappa2=value)
    return sys, env


def _run_cell(spec: SweepSpec, cell):
    """Integrate one cell and estimate its LEs; returns records."""
    try:
        sys2, env2 = _apply_cell(spec.sys, spec.env, cell)
        init = FullState(obs=spec.init, t=0.0)
        traj = integrate(sys2, env2, init, spec.t_max, spec.dt_out,
                         spec.rel_tol, spec.abs_tol, spec.toggles)
        records = []
        for obs in spec.observables:
            series = wolf_max_le(traj.column(obs), spec.dt_out,
                                 spec.embedding)
            if spec.window is not None:
                lo, hi = spec.window
                lam = windowed_mean_le(series, lo, hi)
                records.append(GridRecord(cell, f"{lo:g}:{hi:g}", obs, lam))
            else:
                run = series.running(traj.times)
                defined = ~np.isnan(run)
                for t, lam in zip(traj.times[defined], run[defined]):
                    records.append(GridRecord(cell, f"{t:.17g}", obs,
                                              float(lam)))
        return records
    except Exception as exc:  # per-cell isolation
        return [GridRecord(cell, "", "", math.nan, failed=True,
                           error=f"{type(exc).__name__}: {exc}")]


def run_sweep(spec: SweepSpec, workers: int = 1) -> GridResult:
    """Execute every cell of ``spec`` (optionally in a process pool) and
    collect records ordered by grid index.  Record content is independent
    of ``workers``."""
    _require(workers >= 1, "workers must be >= 1")
    t0 = time.monotonic()
    cells = spec.cells()
    if workers == 1 or len(cells) <= 1:
        per_cell = [_run_cell(spec, c) for c in cells]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_cell = list(pool.map(_run_cell, [spec] * len(cells), cells))
    records = tuple(r for block in per_cell for r in block)
    from . import __version__
    metadata = {
        "figure": spec.figure,
        "version": __version__,
        "wall_time_s": time.monotonic() - t0,
        "n_cells": len(cells),
        "workers": workers,
    }
    return GridResult(records, tuple(n for n, _ in spec.axes), metadata)


# --- preset sweeps ---------------------------------------------------------

def _default_taus():
    return tuple(float(v) for v in np.geomspace(0.1, 20.0, 40))


def fig2_spec(tau_values=None, t_max=200.0, dt_out=0.05,
              embedding=EmbeddingConfig()) -> SweepSpec:
    """Memory-time sweep of the running LE of <q1> (symmetric mirrors,
    resonant environment, photon number 2)."""
    taus = tuple(tau_values) if tau_values is not None else _default_taus()
    return SweepSpec("fig2", SystemParams(), EnvParams(), _FIG2_INIT,
                     (("tau", taus),), ("q1",), t_max, dt_out,
                     embedding=embedding)


def fig3_spec(tau_values=(0.5, 1.0, 10.0), t_max=200.0, dt_out=0.05,
              embedding=EmbeddingConfig()) -> SweepSpec:
    """Memory-time sweep of the running LE of the TDC components
    (real parts), same base parameters as the <q1> sweep."""
    return SweepSpec("fig3", SystemParams(), EnvParams(), _FIG2_INIT,
                     (("tau", tuple(tau_values)),), _TDC_COLUMNS,
                     t_max, dt_out, embedding=embedding)


def fig4_spec(omega_values=(0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0),
              t_max=200.0, dt_out=0.05,
              embedding=EmbeddingConfig()) -> SweepSpec:
    """Central-frequency sweep of the running LE of <p1> at memory time 1."""
    return SweepSpec("fig4", SystemParams(), EnvParams(gamma=1.0), _FIG2_INIT,
                     (("big_omega", tuple(omega_values)),), ("p1",),
                     t_max, dt_out, embedding=embedding)


def _default_kappas():
    return tuple(float(v) for v in np.linspace(0.0, 2.5, 24))


def fig5_spec(kappa1_values=None, kappa2_values=None, t_max=20.0,
              dt_out=0.01, embedding=EmbeddingConfig()) -> SweepSpec:
    """Coupling-coefficient grid: windowed mean LE of <p1> over t in
    [5, 20] at gamma = 0.5."""
    k1 = tuple(kappa1_values) if kappa1_values is not None \
        else _default_kappas()
    k2 = tuple(kappa2_values) if kappa2_values is not None \
        else _default_kappas()
    return SweepSpec("fig5", SystemParams(), EnvParams(gamma=0.5),
                     _FIG5_INIT, (("kappa1", k1), ("kappa2", k2)), ("p1",),
                     t_max, dt_out, window=(5.0, 20.0), embedding=embedding)


def fig6_spec(tau_values=None, t_max=200.0, dt_out=0.05,
              embedding=EmbeddingConfig()) -> SweepSpec:
    """Memory-time sweep without optomechanical couplings (G = 0,
    kappa = 2.02): running LE of <p1> and of the TDC components."""
    taus = tuple(tau_values) if tau_values is not None else _default_taus()
    sys_ = SystemParams(g1=0.0, g2=0.0, kappa1=2.02, kappa2=2.02)
    return SweepSpec("fig6", sys_, EnvParams(), _FIG6_INIT,
                     (("tau", taus),), ("p1",) + _TDC_COLUMNS,
                     t_max, dt_out, embedding=embedding)


def run_fig2(tau_values=None, t_max=200.0, workers=1) -> GridResult:
    return run_sweep(fig2_spec(tau_values, t_max), workers)


def run_fig3(tau_values=(0.5, 1.0, 10.0), workers=1) -> GridResult:
    return run_sweep(fig3_spec(tau_values), workers)


def run_fig4(omega_values=(0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0),
             workers=1) -> GridResult:
    return run_sweep(fig4_spec(omega_values), workers)


def run_fig5(kappa1_values=None, kappa2_values=None, workers=1) -> GridResult:
    return run_sweep(fig5_spec(kappa1_values, kappa2_values), workers)


def run_fig6(tau_values=None, workers=1) -> GridResult:
    return run_sweep(fig6_spec(tau_values), workers)
