"""CSV readers/writers for every documented output format.

All floating-point values are written with 17 significant digits; every
file is written to a temporary sibling and renamed into place, so readers
never observe partial output.
"""

from __future__ import annotations

import csv
import io
import os
import tempfile

import numpy as np

from .dynamics import TRAJECTORY_COLUMNS, Trajectory
from .errors import GridMismatch, ValidationError
from .kernel_oracle import KernelFieldResult
from .lyapunov import LyapunovSeries

__all__ = ["atomic_write_text", "fmt", "write_trajectory_csv",
           "read_columns_csv", "write_le_csv", "write_oracle_csv",
           "write_sweep_csv"]


def fmt(x: float) -> str:
    """17-significant-digit decimal form (round-trips all doubles)."""
    return f"{x:.17g}"


def atomic_write_text(path, text: str):
    """Write text to ``path`` via a temporary sibling + rename."""
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-",
                               suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def write_trajectory_csv(traj: Trajectory, path):
    """Trajectory table: ``t,q1,q2,p1,p2,n,ReF1,ImF1,...,ReF5,ImF5``."""
    buf = io.StringIO()
    buf.write(",".join(TRAJECTORY_COLUMNS) + "\n")
    cols = [traj.column(c) for c in TRAJECTORY_COLUMNS]
    for row in zip(*cols):
        buf.write(",".join(fmt(v) for v in row) + "\n")
    atomic_write_text(path, buf.getvalue())


def read_columns_csv(path) -> dict:
    """Read a numeric CSV with a header row into name -> float array."""
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValidationError(f"{path}: empty CSV") from None
        rows = list(reader)
    if not rows:
        raise ValidationError(f"{path}: CSV has a header but no data rows")
    arr = np.empty((len(rows), len(header)))
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise ValidationError(f"{path}: row {i + 2} has {len(row)} "
                                  f"fields, expected {len(header)}")
        arr[i] = [float(v) for v in row]
    return {name: arr[:, j].copy() for j, name in enumerate(header)}


def write_le_csv(series: LyapunovSeries, path):
    """Running-estimate table: ``t,lambda_running,events_so_far`` on the
    series' output grid (NaN before the first event)."""
    run = series.running(series.grid)
    counts = np.searchsorted(series.event_times, series.grid, side="right")
    buf = io.StringIO()
    buf.write("t,lambda_running,events_so_far\n")
    for t, lam, c in zip(series.grid, run, counts):
        buf.write(f"{fmt(t)},{fmt(lam)},{int(c)}\n")
    atomic_write_text(path, buf.getvalue())


def write_oracle_csv(oracle: KernelFieldResult, traj: Trajectory, path):
    """Kernel-field oracle vs the closed system at the oracle grid times:
    ``t,ReF1_oracle,ImF1_oracle,...,err1,...,err5`` with per-time absolute
    discrepancies per component."""
    tt = traj.times
    dt = traj.dt_out if traj.dt_out > 0 else 1.0
    idx = np.rint((oracle.times - tt[0]) / dt).astype(int)
    ok = (idx >= 0) & (idx < tt.size)
    if not np.all(ok) or np.abs(tt[idx] - oracle.times).max() > 1e-9:
        raise GridMismatch("oracle and trajectory grids do not align")
    F_traj = traj.tdc_complex()[idx]
    err = np.abs(oracle.values - F_traj)
    head = ["t"]
    for i in range(1, 6):
        head += [f"ReF{i}_oracle", f"ImF{i}_oracle"]
    head += [f"err{i}" for i in range(1, 6)]
    buf = io.StringIO()
    buf.write(",".join(head) + "\n")
    for k, t in enumerate(oracle.times):
        row = [fmt(t)]
        for i in range(5):
            row += [fmt(oracle.values[k, i].real),
                    fmt(oracle.values[k, i].imag)]
        row += [fmt(err[k, i]) for i in range(5)]
        buf.write(",".join(row) + "\n")
    atomic_write_text(path, buf.getvalue())


def write_sweep_csv(result, path):
    """Long-format sweep records; one or two axis column pairs, then
    ``t_or_window,observable,lambda,failed,error``."""
    n_axes = len(result.axis_names)
    head = []
    for i in range(n_axes):
        head += [f"axis{i + 1}_name", f"axis{i + 1}_value"]
    head += ["t_or_window", "observable", "lambda", "failed", "error"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(head)
    for rec in result.records:
        row = []
        for name, value in rec.axes:
            row += [name, fmt(value)]
        row += [rec.t_or_window, rec.observable, fmt(rec.lam),
                "1" if rec.failed else "0", rec.error]
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())
