"""CSV-to-image rendering.

Pure file-to-file transform: reads one long-format CSV, draws one figure,
writes one PNG atomically (temporary sibling + rename).  Heatmaps and
contours use a diverging colormap with the color scale centered at zero so
positive-exponent regions stand out from regular ones.
"""

from __future__ import annotations

import csv
import os
import tempfile
from dataclasses import dataclass

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from .jobs import PlotJob


class MissingColumn(Exception):
    """A job references a column the CSV header does not contain."""


class EmptyInput(Exception):
    """The CSV contains no usable data rows; no output is written."""


@dataclass(frozen=True)
class PlotResult:
    """What was drawn: output path and the value-scale limits actually
    used (for diverging kinds, vmin == -vmax)."""

    path: str
    kind: str
    vmin: float
    vmax: float
    n_rows: int


def _read_rows(job: PlotJob):
    with open(job.input, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        needed = {job.x, job.y}
        if job.kind == "heatmap" or (job.kind == "lines" and job.group):
            needed.add(job.group)
        if job.kind == "contour":
            needed.update((job.group, job.group2))
        if job.observable:
            needed.add("observable")
        missing = sorted(needed - set(header))
        if missing:
            raise MissingColumn(f"{job.input}: missing column(s) "
                                f"{', '.join(missing)}")
        rows = []
        for row in reader:
            if row.get("failed", "0") == "1":
                continue
            if job.observable and row.get("observable") != job.observable:
                continue
            rows.append(row)
    if not rows:
        raise EmptyInput(f"{job.input}: no usable data rows")
    return rows


def _window_value(text: str) -> float:
    """Mid-point of a 'lo:hi' window tag, or the plain time value."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return 0.5 * (float(lo) + float(hi))
    return float(text)


def _atomic_savefig(fig, path: str):
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".png")
    os.close(fd)
    try:
        fig.savefig(tmp, dpi=130)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
    finally:
        plt.close(fig)


def _sym_limits(values) -> tuple:
    v = float(np.nanmax(np.abs(values))) if len(values) else 1.0
    v = v if v > 0 else 1.0
    return -v, v


def plot(job: PlotJob) -> PlotResult:
    """Render one job; returns the output path and the color limits."""
    rows = _read_rows(job)
    fig, ax = plt.subplots(figsize=(7.2, 4.8))

    if job.kind == "lines":
        groups = {}
        for row in rows:
            key = row[job.group] if job.group else ""
            groups.setdefault(key, []).append(
                (_window_value(row[job.x]), float(row[job.y])))
        vals = []
        for key in sorted(groups, key=_try_float):
            pts = np.array(sorted(groups[key]))
            ax.plot(pts[:, 0], pts[:, 1], lw=1.0,
                    label=str(key) if key else None)
            vals.extend(v for v in pts[:, 1] if np.isfinite(v))
        ax.axhline(0.0, color="k", lw=0.6, ls=":")
        if job.group:
            ax.legend(fontsize=8, title=job.group)
        vals = vals or [0.0]
        vmin, vmax = (float(np.min(vals)), float(np.max(vals)))
        ax.set_ylabel(job.ylabel or job.y)

    elif job.kind == "heatmap":
        xs = sorted({_window_value(r[job.x]) for r in rows})
        gs = sorted({float(r[job.group]) for r in rows})
        xi = {v: i for i, v in enumerate(xs)}
        gi = {v: i for i, v in enumerate(gs)}
        img = np.full((len(gs), len(xs)), np.nan)
        for row in rows:
            img[gi[float(row[job.group])],
                xi[_window_value(row[job.x])]] = float(row[job.y])
        vmin, vmax = _sym_limits(img[~np.isnan(img)])
        mesh = ax.pcolormesh(xs, gs, img, cmap="RdBu_r", vmin=vmin,
                             vmax=vmax, shading="nearest")
        fig.colorbar(mesh, ax=ax, label=job.y)
        if job.ylog:
            ax.set_yscale("log")
        ax.set_ylabel(job.ylabel or job.group)

    else:  # contour
        k1 = sorted({float(r[job.group]) for r in rows})
        k2 = sorted({float(r[job.group2]) for r in rows})
        i1 = {v: i for i, v in enumerate(k1)}
        i2 = {v: i for i, v in enumerate(k2)}
        img = np.full((len(k2), len(k1)), np.nan)
        for row in rows:
            img[i2[float(row[job.group2])],
                i1[float(row[job.group])]] = float(row[job.y])
        vmin, vmax = _sym_limits(img[~np.isnan(img)])
        if len(k1) >= 2 and len(k2) >= 2:
            cs = ax.contourf(k1, k2, img, levels=21, cmap="RdBu_r",
                             vmin=vmin, vmax=vmax)
        else:
            cs = ax.pcolormesh(k1, k2, img, cmap="RdBu_r", vmin=vmin,
                               vmax=vmax, shading="nearest")
        fig.colorbar(cs, ax=ax, label=job.y)
        ax.set_ylabel(job.ylabel or job.group2)

    ax.set_xlabel(job.xlabel or job.x)
    if job.title:
        ax.set_title(job.title)
    fig.tight_layout()
    _atomic_savefig(fig, job.out)
    return PlotResult(job.out, job.kind, vmin, vmax, len(rows))


def _try_float(s):
    """Sort key putting numeric labels in numeric order, text after."""
    try:
        return (0, float(s), "")
    except ValueError:
        return (1, 0.0, s)
