"""Command-line entry point.

    lanchester-ros {culture,sweep,organism,fit} --config PATH|NAME --out DIR [--emit-plot]

Exit codes: 0 success, 1 usage or configuration error, 2 numeric failure.
"""
import argparse
import logging
import sys
from dataclasses import replace

from .config import load_config, shipped_configs
from .errors import ConfigError, DomainError, NoExtinctionError, NumericBlowUpError
from .output import CultureOutcome, FitOutcome, emit_outputs, run

log = logging.getLogger("lanchester_ros")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="lanchester-ros",
                     description="Free-radical/antioxidant attrition models.")
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)
    for mode in ("culture", "sweep", "organism", "fit"):
        p = sub.add_parser(mode)
        p.add_argument("--config", required=True,
                       help=f"config file, or a shipped name ({', '.join(shipped_configs())})")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--emit-plot", action="store_true",
                       help="also write plot_data.csv and plot.png")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def _summary(cfg, result):
    if isinstance(result, CultureOutcome):
        t = result.extinction_time
        return f"extinction time: {'none' if t is None else f'{t:.6f}'}"
    if cfg.mode == "sweep":
        return "; ".join(f"{result.parameter}={e.value:g}: "
                         f"{'none' if e.extinction_time is None else f'{e.extinction_time:.6f}'}"
                         for e in result.entries)
    if cfg.mode == "organism":
        return (f"total dead {result.total_dead}, mean per minute "
                f"{result.mean_dead_per_minute:.1f}, threshold minute {result.threshold_minute}")
    if isinstance(result, FitOutcome):
        est = ", ".join(f"{k}={v:.6g}" for k, v in result.result.estimates.items())
        return f"{est}; residual {result.result.residual:.3g}"
    return ""


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, mode=args.mode)
        if args.emit_plot:
            cfg = replace(cfg, emit_plot=True)
        result = run(cfg)
        paths = emit_outputs(result, cfg, args.out)
    except (NoExtinctionError, NumericBlowUpError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for path in paths:
        log.info("wrote %s", path)
    print(_summary(cfg, result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
