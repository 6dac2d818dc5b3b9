"""Small memory-time sweep: running LE of <q1> over (tau, t).

A desk-scale version of the full sweep (eight memory times instead of
forty, horizon 120 instead of 200).  Writes the long-format CSV through the
documented schema and renders a quick diverging heatmap centered at zero.
"""

import os

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from nmchaos.csvio import write_sweep_csv
from nmchaos.experiments import fig2_spec, run_sweep

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

taus = tuple(float(v) for v in np.geomspace(0.2, 16.0, 8))
spec = fig2_spec(tau_values=taus, t_max=120.0)
print(f"running {len(spec.cells())} cells to t = {spec.t_max} ...")
result = run_sweep(spec)
csv_path = os.path.join(OUT, "memory_time_sweep.csv")
write_sweep_csv(result, csv_path)
print(f"wrote {csv_path} ({len(result.records)} records, "
      f"{result.metadata['wall_time_s']:.1f}s)")

# pivot records into a (tau, t) matrix for display
by_tau = {}
for rec in result.records:
    if not rec.failed:
        by_tau.setdefault(rec.axes[0][1], []).append(
            (float(rec.t_or_window), rec.lam))
fig, ax = plt.subplots(figsize=(7, 4.5))
t_grid = np.arange(0.0, 120.0 + 0.025, 0.05)
img = np.full((len(taus), t_grid.size), np.nan)
for i, tau in enumerate(taus):
    pts = np.array(sorted(by_tau.get(tau, [])))
    if pts.size:
        idx = np.searchsorted(t_grid, pts[:, 0])
        img[i, idx] = pts[:, 1]
        img[i] = np.where(np.isnan(img[i]), np.nan, img[i])
vmax = np.nanmax(np.abs(img)) or 1.0
mesh = ax.pcolormesh(t_grid, taus, img, cmap="RdBu_r", vmin=-vmax,
                     vmax=vmax, shading="nearest")
ax.set(yscale="log", xlabel="t", ylabel="memory time tau",
       title="running max LE of <q1>")
fig.colorbar(mesh, label="lambda")
fig.tight_layout()
fig.savefig(os.path.join(OUT, "memory_time_sweep.png"), dpi=120)
print(f"wrote {OUT}/memory_time_sweep.png")
