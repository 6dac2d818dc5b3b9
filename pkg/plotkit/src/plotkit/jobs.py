"""Plot job description and the named presets.

A job names an input CSV in the long sweep format (or the LE format), a
figure kind, the columns to use, and the output image path.  Jobs load
from small TOML files; presets cover the standard figure layouts.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

try:
    import tomllib as _toml
except ModuleNotFoundError:
    import tomli as _toml

_KINDS = ("lines", "heatmap", "contour")


@dataclass(frozen=True)
class PlotJob:
    input: str
    kind: str
    out: str
    x: str = "t_or_window"
    y: str = "lambda"
    group: str = "axis1_value"
    group2: str = "axis2_value"
    observable: str = ""       # optional filter on the observable column
    title: str = ""
    xlabel: str = "t"
    ylabel: str = ""
    ylog: bool = False

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"kind must be one of {_KINDS}, "
                             f"got {self.kind!r}")


# preset layouts keyed by the sweep that produced the CSV
PRESETS = {
    "fig2": dict(kind="heatmap", group="axis1_value", ylabel="memory time",
                 ylog=True, title="running max LE of <q1>"),
    "fig3": dict(kind="lines", group="observable",
                 ylabel="running max LE", title="TDC component LEs"),
    "fig4": dict(kind="lines", group="axis1_value",
                 ylabel="running max LE of <p1>",
                 title="central-frequency family"),
    "fig5": dict(kind="contour", xlabel="kappa1", ylabel="kappa2",
                 title="windowed mean LE of <p1>"),
    "fig6": dict(kind="heatmap", observable="p1", ylabel="memory time",
                 ylog=True, title="running max LE of <p1> (G = 0)"),
}


def preset_job(name: str, input_path: str, out_path: str) -> PlotJob:
    if name not in PRESETS:
        raise ValueError(f"unknown preset {name!r}; "
                         f"expected one of {tuple(PRESETS)}")
    base = PlotJob(input=input_path, kind="lines", out=out_path)
    return replace(base, **PRESETS[name])


def load_job(path) -> PlotJob:
    """Read a job TOML file (keys mirror the PlotJob fields)."""
    with open(path, "rb") as fh:
        doc = _toml.load(fh)
    known = PlotJob.__dataclass_fields__
    unknown = set(doc) - set(known)
    if unknown:
        raise ValueError(f"unknown job keys: {sorted(unknown)}")
    for req in ("input", "kind", "out"):
        if req not in doc:
            raise ValueError(f"job file missing required key {req!r}")
    return PlotJob(**doc)
