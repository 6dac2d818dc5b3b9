"""plotkit command line: ``plotkit job.toml`` or
``plotkit --preset fig2 --input grid.csv --out grid.png``."""

from __future__ import annotations

import argparse
import sys

from .jobs import PRESETS, load_job, preset_job
from .render import EmptyInput, MissingColumn, plot

USAGE_EXIT = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def main(argv=None) -> int:
    p = _Parser(prog="plotkit", description=__doc__)
    p.add_argument("job", nargs="?", help="job TOML file")
    p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--input", help="input CSV (with --preset)")
    p.add_argument("--out", help="output PNG (with --preset)")
    try:
        args = p.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    try:
        if args.preset:
            if not (args.input and args.out):
                p.error("--preset requires --input and --out")
            job = preset_job(args.preset, args.input, args.out)
        elif args.job:
            job = load_job(args.job)
        else:
            p.error("give a job file or --preset/--input/--out")
        result = plot(job)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (MissingColumn, EmptyInput, ValueError, OSError) as exc:
        print(f"plotkit: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.path} ({result.kind}, {result.n_rows} rows, "
          f"scale [{result.vmin:.3g}, {result.vmax:.3g}])")
    return 0


if __name__ == "__main__":
    sys.exit(main())
