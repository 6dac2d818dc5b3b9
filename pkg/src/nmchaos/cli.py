"""Command-line entry point.

Subcommands
-----------
simulate --config F --out F
    Integrate the configured system and write the trajectory CSV.
le --input F --column C --method {wolf|benettin} --out F [--config F]
    Wolf: estimate from a trajectory CSV column.  Benettin: ``--input``
    names a TOML config defining the flow (the column argument is echoed in
    the sidecar only).  Writes the running-estimate CSV.
sweep --figure {fig2..fig6|custom} --config F --out F
    Run a preset (or custom) parameter sweep, long-format CSV output.
oracle --config F --tmax T --ns N --out F
    Kernel-field reconstruction vs the closed system, per-time error
    columns.

Exit codes: 0 success, 1 configuration/validation error, 2 numerical
failure, 64 usage error.  Every command writes an effective-config echo
next to its output (``<out>.config.toml``).  The program is fully
deterministic; ``--seedless`` merely records that fact in logs.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, csvio
from .config import RunConfig, parse_config, parse_config_text
from .dynamics import integrate, make_rhs_array
from .errors import ConfigError, NmchaosError, ValidationError
from .experiments import (fig2_spec, fig3_spec, fig4_spec, fig5_spec,
                          fig6_spec, run_sweep)
from .kernel_oracle import evolve_kernel_field
from .lyapunov import benettin_max_le, wolf_max_le

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    p = _Parser(prog="nmchaos", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--seedless", action="store_true",
                   help="assert that the run uses no randomness (always "
                        "true; printed for CI logs)")
    p.add_argument("--lenient", action="store_true",
                   help="ignore unknown config keys instead of failing")
    sub = p.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="integrate one trajectory")
    sim.add_argument("--config", required=True)
    sim.add_argument("--out", required=True)

    le = sub.add_parser("le", help="estimate the maximum Lyapunov exponent")
    le.add_argument("--input", required=True,
                    help="trajectory CSV (wolf) or flow config TOML "
                         "(benettin)")
    le.add_argument("--column", required=True,
                    help="trajectory column to embed (wolf)")
    le.add_argument("--method", required=True, choices=("wolf", "benettin"))
    le.add_argument("--out", required=True)
    le.add_argument("--config", default=None,
                    help="optional config supplying [lyapunov] settings")

    sw = sub.add_parser("sweep", help="run a parameter sweep")
    sw.add_argument("--figure", required=True,
                    choices=("fig2", "fig3", "fig4", "fig5", "fig6",
                             "custom"))
    sw.add_argument("--config", required=True)
    sw.add_argument("--out", required=True)

    orc = sub.add_parser("oracle", help="kernel-field oracle comparison")
    orc.add_argument("--config", required=True)
    orc.add_argument("--tmax", required=True, type=float)
    orc.add_argument("--ns", required=True, type=int)
    orc.add_argument("--out", required=True)
    return p


def _echo_config(cfg: RunConfig, out_path: str):
    from .config import emit_config
    csvio.atomic_write_text(f"{out_path}.config.toml", emit_config(cfg))


def _cmd_simulate(args) -> int:
    cfg = parse_config(args.config, strict=not args.lenient)
    traj = integrate(cfg.system_params(), cfg.env_params(),
                     cfg.initial_state(),
                     cfg.get("integration", "t_max"),
                     cfg.get("integration", "dt_out"),
                     cfg.get("integration", "rel_tol"),
                     cfg.get("integration", "abs_tol"),
                     cfg.toggles())
    csvio.write_trajectory_csv(traj, args.out)
    _echo_config(cfg, args.out)
    return 0


def _cmd_le(args) -> int:
    if args.method == "wolf":
        cfg = (parse_config(args.config, strict=not args.lenient)
               if args.config else parse_config_text(""))
        cols = csvio.read_columns_csv(args.input)
        if args.column not in cols:
            raise ValidationError(
                f"column {args.column!r} not in {args.input} "
                f"(available: {', '.join(cols)})")
        if "t" not in cols or cols["t"].size < 2:
            raise ValidationError(f"{args.input} lacks a usable 't' column")
        dt = float(cols["t"][1] - cols["t"][0])
        series = wolf_max_le(cols[args.column], dt, cfg.embedding())
    else:
        cfg = parse_config(args.input, strict=not args.lenient)
        if args.config:
            raise ValidationError(
                "benettin reads its configuration from --input; "
                "drop --config")
        rhs = make_rhs_array(cfg.system_params(), cfg.env_params(),
                             cfg.toggles())
        series = benettin_max_le(
            rhs, cfg.initial_state().as_array(),
            delta0=cfg.get("lyapunov", "delta0"),
            renorm_dt=cfg.get("lyapunov", "renorm_dt"),
            horizon=cfg.get("integration", "t_max"))
    csvio.write_le_csv(series, args.out)
    _echo_config(cfg, args.out)
    return 0


def _sweep_spec_from(cfg: RunConfig, figure: str):
    sweep = cfg.data["sweep"]
    emb = cfg.embedding()

    def vals(key):
        v = sweep[key]
        return tuple(v) if v else None

    kwargs = {"embedding": emb}
    if sweep["t_max"] > 0:
        kwargs["t_max"] = sweep["t_max"]
    if figure == "fig2":
        return fig2_spec(vals("tau_values"), **kwargs)
    if figure == "fig3":
        return fig3_spec(vals("tau_values") or (0.5, 1.0, 10.0), **kwargs)
    if figure == "fig4":
        return fig4_spec(vals("omega_values")
                         or (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0),
                         **kwargs)
    if figure == "fig5":
        return fig5_spec(vals("kappa1_values"), vals("kappa2_values"),
                         **kwargs)
    if figure == "fig6":
        return fig6_spec(vals("tau_values"), **kwargs)
    # custom: base system/environment/initial from the config itself
    import dataclasses as _dc
    axes = []
    for key, axis in (("tau_values", "tau"), ("omega_values", "big_omega"),
                      ("kappa1_values", "kappa1"),
                      ("kappa2_values", "kappa2")):
        if sweep[key]:
            axes.append((axis, tuple(sweep[key])))
    if not 1 <= len(axes) <= 2:
        raise ValidationError(
            "custom sweeps need one or two non-empty value lists under "
            "[sweep]")
    from .experiments import SweepSpec
    t_max = sweep["t_max"] if sweep["t_max"] > 0 \
        else cfg.get("integration", "t_max")
    return SweepSpec("custom", cfg.system_params(), cfg.env_params(),
                     cfg.initial_state().obs, tuple(axes), ("q1", "p1"),
                     t_max, cfg.get("integration", "dt_out"),
                     toggles=cfg.toggles(), embedding=emb,
                     rel_tol=cfg.get("integration", "rel_tol"),
                     abs_tol=cfg.get("integration", "abs_tol"))


def _cmd_sweep(args) -> int:
    presets = (args.figure,) if args.figure != "custom" else ()
    cfg = parse_config(args.config, strict=not args.lenient, presets=presets)
    spec = _sweep_spec_from(cfg, args.figure)
    workers = cfg.get("sweep", "workers")
    env_threads = os.environ.get("NMCHAOS_THREADS")
    if env_threads:
        try:
            workers = max(1, int(env_threads))
        except ValueError:
            raise ValidationError(
                f"NMCHAOS_THREADS must be an integer, got {env_threads!r}")
    result = run_sweep(spec, workers=workers)
    csvio.write_sweep_csv(result, args.out)
    _echo_config(cfg, args.out)
    return 0


def _cmd_oracle(args) -> int:
    cfg = parse_config(args.config, strict=not args.lenient)
    sys_p, env_p = cfg.system_params(), cfg.env_params()
    oracle = evolve_kernel_field(sys_p, env_p, args.tmax, args.ns)
    dt_out = args.tmax / args.ns
    traj = integrate(sys_p, env_p, cfg.initial_state(), args.tmax, dt_out,
                     cfg.get("integration", "rel_tol"),
                     cfg.get("integration", "abs_tol"), cfg.toggles())
    csvio.write_oracle_csv(oracle, traj, args.out)
    _echo_config(cfg, args.out)
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "le": _cmd_le,
    "sweep": _cmd_sweep,
    "oracle": _cmd_oracle,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.seedless:
        print("seedless: this program contains no randomness; outputs are "
              "a pure function of config and argv", file=sys.stderr)
    np.seterr(over="ignore", invalid="ignore")
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"nmchaos: config error: {exc}", file=sys.stderr)
        return 1
    except NmchaosError as exc:
        print(f"nmchaos: numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
