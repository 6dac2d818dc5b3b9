"""Run configuration: TOML parsing, validation, presets, and emission.

The schema is flat sections of scalar keys (plus value lists under
``[sweep]``); every key has a documented default, and an empty file yields
the default run (symmetric mirrors, unit couplings, resonant environment,
the standard initial displacement).  Unknown keys are rejected unless
parsing leniently.  ``parse_config_text(emit_config(cfg)) == cfg`` holds
for every valid configuration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

try:
    import tomllib as _toml
except ModuleNotFoundError:  # Python 3.10
    import tomli as _toml

from .dynamics import (EnvParams, FullState, ModelToggles, ObservableState,
                       SystemParams)
from .errors import ParseError, UnknownKeyError, ValidationError
from .lyapunov import EmbeddingConfig

__all__ = ["RunConfig", "parse_config", "parse_config_text", "emit_config",
           "preset_overlay", "PRESET_NAMES"]

_FLOAT = "float"
_INT = "int"
_STR = "str"
_FLOAT_LIST = "float_list"

# section -> key -> (type, default)
SCHEMA = {
    "system": {
        "omega1": (_FLOAT, 1.0),
        "omega2": (_FLOAT, 1.0),
        "omega_c": (_FLOAT, 1.0),
        "g1": (_FLOAT, 1.0),
        "g2": (_FLOAT, 1.0),
        "kappa1": (_FLOAT, 1.0),
        "kappa2": (_FLOAT, 1.0),
    },
    "environment": {
        "big_gamma": (_FLOAT, 1.0),
        "gamma": (_FLOAT, 1.0),
        "big_omega": (_FLOAT, 0.0),
    },
    "initial": {
        "q1": (_FLOAT, 1.1),
        "q2": (_FLOAT, 1.1),
        "p1": (_FLOAT, 0.0),
        "p2": (_FLOAT, 0.0),
        "n": (_FLOAT, 2.0),
    },
    "integration": {
        "t_max": (_FLOAT, 200.0),
        "dt_out": (_FLOAT, 0.05),
        "rel_tol": (_FLOAT, 1e-9),
        "abs_tol": (_FLOAT, 1e-11),
    },
    "model": {
        "damping_factor": (_INT, 1),
        "harmonic_placement": (_STR, "appendix"),
    },
    "lyapunov": {
        "method": (_STR, "wolf"),
        "embed_dim": (_INT, 4),
        "delay": (_INT, 0),        # 0 = automatic (autocorrelation time)
        "theiler": (_INT, -1),     # -1 = automatic (2 * delay)
        "epsilon_frac": (_FLOAT, 0.1),
        "evolve_steps": (_INT, 5),
        "delta0": (_FLOAT, 1e-8),
        "renorm_dt": (_FLOAT, 0.5),
    },
    "sweep": {
        "figure": (_STR, "fig2"),
        "workers": (_INT, 1),
        "t_max": (_FLOAT, 0.0),    # 0 = keep the figure default
        "tau_values": (_FLOAT_LIST, ()),
        "omega_values": (_FLOAT_LIST, ()),
        "kappa1_values": (_FLOAT_LIST, ()),
        "kappa2_values": (_FLOAT_LIST, ()),
    },
}

PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6")

# figure presets: caption parameters layered between defaults and user file
_PRESETS = {
    "fig2": {},
    "fig3": {"sweep": {"figure": "fig3", "tau_values": [0.5, 1.0, 10.0]}},
    "fig4": {"sweep": {"figure": "fig4"}, "environment": {"gamma": 1.0}},
    "fig5": {
        "sweep": {"figure": "fig5"},
        "environment": {"gamma": 0.5},
        "initial": {"q1": 1.0, "q2": 1.0, "p1": 2.0, "p2": 2.0, "n": 1.0},
        "integration": {"t_max": 20.0, "dt_out": 0.01},
    },
    "fig6": {
        "sweep": {"figure": "fig6"},
        "system": {"g1": 0.0, "g2": 0.0, "kappa1": 2.02, "kappa2": 2.02},
        "initial": {"q1": 0.0, "q2": 0.0, "p1": 1.1, "p2": 1.1, "n": 2.0},
    },
}


def _defaults():
    return {sec: {k: v for k, (_, v) in keys.items()}
            for sec, keys in SCHEMA.items()}


def _check_type(section, key, kind, value):
    where = f"{section}.{key}"
    if kind == _FLOAT:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValidationError(f"{where} must be a real number")
        if not math.isfinite(float(value)):
            raise ValidationError(f"{where} must be finite")
        return float(value)
    if kind == _INT:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValidationError(f"{where} must be an integer")
        return int(value)
    if kind == _STR:
        if not isinstance(value, str):
            raise ValidationError(f"{where} must be a string")
        return value
    if kind == _FLOAT_LIST:
        if not isinstance(value, (list, tuple)):
            raise ValidationError(f"{where} must be an array of numbers")
        out = []
        for v in value:
            if isinstance(v, bool) or not isinstance(v, (int, float)) \
                    or not math.isfinite(float(v)):
                raise ValidationError(f"{where} must contain finite numbers")
            out.append(float(v))
        return tuple(out)
    raise AssertionError(kind)


@dataclass(frozen=True)
class RunConfig:
    """Validated, fully defaulted run configuration.

    Construction validates every cross-field constraint by building the
    domain objects; accessors below hand the same objects to callers.
    """

    data: dict

    def __post_init__(self):
        # constructing the domain objects runs their invariant checks
        self.system_params()
        self.env_params()
        self.toggles()
        self.embedding()
        g = self.get
        for nm in ("t_max", "dt_out"):
            if not g("integration", nm) > 0:
                raise ValidationError(f"integration.{nm} must be > 0")
        for nm in ("rel_tol", "abs_tol"):
            if not 0.0 < g("integration", nm) <= 1e-3:
                raise ValidationError(
                    f"integration.{nm} must lie in (0, 1e-3]")
        for nm, v in (("q1", g("initial", "q1")), ("q2", g("initial", "q2")),
                      ("p1", g("initial", "p1")), ("p2", g("initial", "p2")),
                      ("n", g("initial", "n"))):
            if not math.isfinite(v):
                raise ValidationError(f"initial.{nm} must be finite")
        if g("lyapunov", "method") not in ("wolf", "benettin"):
            raise ValidationError(
                "lyapunov.method must be 'wolf' or 'benettin'")
        if not 1e-10 <= g("lyapunov", "delta0") <= 1e-4:
            raise ValidationError("lyapunov.delta0 must lie in [1e-10, 1e-4]")
        if not g("lyapunov", "renorm_dt") > 0:
            raise ValidationError("lyapunov.renorm_dt must be > 0")
        if g("lyapunov", "delay") < 0:
            raise ValidationError("lyapunov.delay must be >= 0 (0 = auto)")
        if g("lyapunov", "theiler") < -1:
            raise ValidationError("lyapunov.theiler must be >= -1 (-1 = auto)")
        if g("sweep", "workers") < 1:
            raise ValidationError("sweep.workers must be >= 1")
        if g("sweep", "figure") not in PRESET_NAMES + ("custom",):
            raise ValidationError(
                f"sweep.figure must be one of {PRESET_NAMES + ('custom',)}")
        if g("sweep", "t_max") < 0:
            raise ValidationError("sweep.t_max must be >= 0 (0 = default)")

    def get(self, section, key):
        return self.data[section][key]

    # --- domain accessors -------------------------------------------------

    def system_params(self) -> SystemParams:
        s = self.data["system"]
        return SystemParams(**s)

    def env_params(self) -> EnvParams:
        return EnvParams(**self.data["environment"])

    def toggles(self) -> ModelToggles:
        return ModelToggles(**self.data["model"])

    def initial_state(self) -> FullState:
        i = self.data["initial"]
        return FullState(obs=ObservableState(**i), t=0.0)

    def embedding(self) -> EmbeddingConfig:
        l = self.data["lyapunov"]
        return EmbeddingConfig(
            dim=l["embed_dim"],
            delay=None if l["delay"] == 0 else l["delay"],
            theiler=None if l["theiler"] == -1 else l["theiler"],
            epsilon_frac=l["epsilon_frac"],
            evolve_steps=l["evolve_steps"],
        )


def _merge(base: dict, overlay: dict, *, strict: bool, origin: str):
    for section, body in overlay.items():
        if section not in SCHEMA:
            if strict:
                raise UnknownKeyError(f"unknown section [{section}]"
                                      f"{origin}")
            continue
        if not isinstance(body, dict):
            raise ValidationError(f"[{section}] must be a table{origin}")
        for key, value in body.items():
            if key not in SCHEMA[section]:
                if strict:
                    raise UnknownKeyError(
                        f"unknown key {section}.{key}{origin}")
                continue
            kind, _ = SCHEMA[section][key]
            base[section][key] = _check_type(section, key, kind, value)
    return base


def parse_config_text(text: str, *, strict: bool = True,
                      presets: tuple = ()) -> RunConfig:
    """Parse TOML text into a validated :class:`RunConfig`.

    ``presets`` names preset overlays applied between the defaults and the
    user document.  Strict mode rejects unknown sections/keys.
    """
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ParseError(f"invalid TOML: {exc}") from exc
    data = _defaults()
    for name in presets:
        if name not in _PRESETS:
            raise ValidationError(f"unknown preset {name!r}")
        _merge(data, _PRESETS[name], strict=True, origin=f" (preset {name})")
    _merge(data, doc, strict=strict, origin="")
    return RunConfig(data)


def parse_config(path, *, strict: bool = True, presets: tuple = ()) \
        -> RunConfig:
    """Read and validate a TOML config file (see :func:`parse_config_text`)."""
    try:
        with open(path, "rb") as fh:
            text = fh.read().decode("utf-8")
    except FileNotFoundError:
        raise ParseError(f"config file not found: {path}") from None
    except UnicodeDecodeError as exc:
        raise ParseError(f"config file is not UTF-8: {exc}") from exc
    return parse_config_text(text, strict=strict, presets=presets)


def preset_overlay(name: str) -> dict:
    """The raw overlay dict of a named figure preset."""
    if name not in _PRESETS:
        raise ValidationError(f"unknown preset {name!r}")
    return _PRESETS[name]


def _fmt_value(v):
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, tuple):
        return "[" + ", ".join(_fmt_value(x) for x in v) + "]"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_config(cfg: RunConfig) -> str:
    """Serialize a config back to TOML; parsing the result reproduces the
    config exactly."""
    lines = []
    for section in SCHEMA:
        lines.append(f"[{section}]")
        for key in SCHEMA[section]:
            lines.append(f"{key} = {_fmt_value(cfg.data[section][key])}")
        lines.append("")
    return "\n".join(lines)
