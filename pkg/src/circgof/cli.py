"""``circgof`` command line interface.

Exit codes: 0 success, 2 data errors, 3 fit failures.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, datasets, harness
from .errors import CircGofError, DataError
from .gof import DEFAULT_LAMBDAS
from .harness import RunManifest, render
from .regression import fit_mle

log = logging.getLogger("circgof")

EXIT_DATA = 2
EXIT_FIT = 3


def _add_output(p):
    p.add_argument("--format", choices=harness.FORMATS, default="text")
    p.add_argument("--output", "-o", help="write to this file instead of stdout")


def _add_pair_source(p):
    p.add_argument("--data", help="embedded dataset id or CSV file with paired angles")
    p.add_argument("--unit", choices=("deg", "rad"), default="deg", help="angle unit of CSV input")
    p.add_argument("--x-col", default="x")
    p.add_argument("--y-col", default="y")
    g = p.add_argument_group("DWD hourly wind files")
    g.add_argument("--dwd-x", help="DWD file supplying the covariate series")
    g.add_argument("--dwd-y", help="DWD file supplying the response series")
    g.add_argument("--x-hour", type=int, default=6)
    g.add_argument("--y-hour", type=int, default=12)
    _add_dwd_selection(g)
    g.add_argument("--last", type=int, help="keep only the most recent N pairs")


def _add_dwd_selection(g):
    g.add_argument("--weekday", type=int, default=2, help="0 = Monday (default 2, Wednesday)")
    g.add_argument("--start", help="first date, YYYY-MM-DD")
    g.add_argument("--end", help="last date, YYYY-MM-DD")


def _add_series_source(p):
    p.add_argument("--data", help="CSV file with one angle column")
    p.add_argument("--unit", choices=("deg", "rad"), default="deg")
    p.add_argument("--col", default="angle")
    g = p.add_argument_group("DWD hourly wind file")
    g.add_argument("--dwd", help="DWD file (.txt or .zip)")
    g.add_argument("--hour", type=int, default=None)
    _add_dwd_selection(g)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="circgof", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="maximum-likelihood fit of the Mobius regression")
    _add_pair_source(p)
    _add_output(p)

    p = sub.add_parser("gof", help="bootstrap goodness-of-fit p-values")
    _add_pair_source(p)
    p.add_argument("--B", type=int, default=1000, help="bootstrap replicates")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--lambda", dest="lambdas", type=float, action="append", help="Poisson weight mean (repeatable)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--replicates", action="store_true", help="include replicate values in JSON output")
    _add_output(p)

    p = sub.add_parser("power", help="warp-speed size/power study from a scenario file")
    p.add_argument("scenarios", help="scenario JSON file or bundled name (size-grid, power-grid)")
    p.add_argument("--B", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--lambda", dest="lambdas", type=float, action="append")
    p.add_argument("--alpha", dest="alphas", type=float, action="append", help="significance level (repeatable)")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--long", action="store_true", help="one row per statistic instead of the table layout")
    _add_output(p)

    p = sub.add_parser("autocorr", help="lagged circular correlation of an angle series")
    _add_series_source(p)
    p.add_argument("--max-lag", type=int, default=1)
    _add_output(p)

    p = sub.add_parser("stackplot-data", help="stack-plot coordinates of angles or model residuals")
    _add_series_source(p)
    p.add_argument("--residuals-of", help="dataset id or paired CSV: stack the residuals of its fit")
    p.add_argument("--x-col", default="x")
    p.add_argument("--y-col", default="y")
    p.add_argument("--resolution", type=float, help="bin width in the output unit")
    _add_output(p)

    p = sub.add_parser("datasets", help="list or show embedded datasets")
    dsub = p.add_subparsers(dest="action", required=True)
    _add_output(dsub.add_parser("list"))
    show = dsub.add_parser("show")
    show.add_argument("id", choices=sorted(datasets.DATASETS))
    _add_output(show)
    return ap


def _pair_sample(args):
    if args.dwd_x or args.dwd_y:
        if not (args.dwd_x and args.dwd_y):
            raise DataError("--dwd-x and --dwd-y must be given together")
        sample, days = harness.load_dwd_pair(
            args.dwd_x, args.dwd_y, args.x_hour, args.y_hour, args.weekday, args.start, args.end, args.last
        )
        log.info("paired %d days from %s to %s", len(days), days[0], days[-1])
        return sample
    if not args.data:
        raise DataError("give --data or --dwd-x/--dwd-y")
    return harness.load_sample(args.data, args.unit, args.x_col, args.y_col)


def _series(args):
    if args.dwd:
        return harness.load_series(args.dwd, dwd=True, hour=args.hour, weekday=args.weekday, start=args.start, end=args.end)
    if not args.data:
        raise DataError("give --data or --dwd")
    return harness.load_series(args.data, args.unit, args.col)


def _config(args) -> dict:
    skip = {"format", "output", "verbose"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def run(args) -> str:
    cmd = args.command
    manifest = RunManifest.start(cmd, _config(args), getattr(args, "seed", None))
    extra = None
    if cmd == "fit":
        fit, rows = harness.cmd_fit(_pair_sample(args))
        extra = {"residuals": fit.residuals, "fitted": fit.fitted}
    elif cmd == "gof":
        report, rows = harness.cmd_gof(
            _pair_sample(args), args.B, args.seed, tuple(args.lambdas or DEFAULT_LAMBDAS), args.threads
        )
        extra = {"report": report.to_dict(include_replicates=args.replicates)}
    elif cmd == "power":
        spec = harness.load_scenarios(args.scenarios)
        if args.seed is None:
            manifest.seed = spec.get("seed")
        results, rows = harness.cmd_power(
            spec, B=args.B, seed=args.seed, alphas=args.alphas, lambdas=args.lambdas, threads=args.threads
        )
        if not args.long:
            rows = harness.power_table(rows)
    elif cmd == "autocorr":
        rows = harness.cmd_autocorr(_series(args), args.max_lag)
    elif cmd == "stackplot-data":
        if args.residuals_of:
            sample = harness.load_sample(args.residuals_of, args.unit, args.x_col, args.y_col)
            angles = fit_mle(sample).residuals
        else:
            angles = _series(args)
        rows = harness.cmd_stackplot_data(angles, args.unit, args.resolution)
    elif cmd == "datasets":
        if args.action == "list":
            rows = [
                {"id": d.id, "n": len(d.x_values), "unit": d.angle_unit, "x": d.columns[0], "y": d.columns[1],
                 "sha256": d.checksum()[:16], "provenance": d.provenance}
                for d in datasets.DATASETS.values()
            ]
        else:
            d = datasets.get(args.id)
            rows = [{d.columns[0]: x, d.columns[1]: y} for x, y in zip(d.x_values, d.y_values)]
    else:  # pragma: no cover - argparse enforces the choices
        raise ValueError(cmd)
    return render(rows, args.format, manifest.finish(), extra)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * args.verbose, format="%(levelname)s %(name)s: %(message)s")
    try:
        text = run(args)
    except (DataError, FileNotFoundError, KeyError) as exc:
        print(f"circgof: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except CircGofError as exc:
        print(f"circgof: fit failed: {exc}", file=sys.stderr)
        return EXIT_FIT
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
