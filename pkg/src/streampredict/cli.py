"""Command line interface: ``streampredict <subcommand> <config> [options]``."""
from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, pipeline
from .config import load_config
from .errors import ConfigError, ParseError, StreamPredictError
from .metrics import parse_metric

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_PARSE = 4
EXIT_PIPELINE = 5


def _parser():
    p = argparse.ArgumentParser(prog="streampredict",
                                description="Activity prediction in link streams.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="train, predict and evaluate")
    run.add_argument("config")
    run.add_argument("--predict-only", action="store_true",
                     help="skip evaluation (no ground truth for the prediction period)")

    score = sub.add_parser("score", help="write raw and normalised score tables")
    score.add_argument("config")
    score.add_argument("--stream", default="observation",
                       choices=["training", "observation", "full"])

    sw = sub.add_parser("sweep", help="two-metric alpha sweep")
    sw.add_argument("config")
    sw.add_argument("--metric-a", type=parse_metric)
    sw.add_argument("--metric-b", type=parse_metric)
    sw.add_argument("--points", type=int)

    cor = sub.add_parser("correlate", help="metric correlation matrix")
    cor.add_argument("config")
    cor.add_argument("--stream", default="training", choices=["training", "observation", "full"])

    hist = sub.add_parser("histogram", help="links per time bin")
    hist.add_argument("config")
    hist.add_argument("--granularity", type=float, required=True)
    hist.add_argument("--stream", default="full", choices=["training", "observation", "full"])

    ev = sub.add_parser("evaluate", help="score an external predictions file")
    ev.add_argument("predictions")
    ev.add_argument("config")
    return p


def _print_report(report):
    print(f"F-score {report.f_score:.4f}  precision {report.precision:.4f}  "
          f"recall {report.recall:.4f}  predicted {report.predicted_total:.1f}  "
          f"actual {report.actual_total:.1f}")
    for label, sub in report.breakdowns.items():
        print(f"  {label:<10} F {sub.f_score:.4f}  P {sub.precision:.4f}  R {sub.recall:.4f}  "
              f"pred {sub.predicted_total:.1f}  app {sub.actual_total:.1f}")


def _dispatch(args):
    config = load_config(args.config)
    if args.command == "run":
        result = pipeline.run_experiment(config, predict_only=args.predict_only)
        if result.report is not None:
            _print_report(result.report)
        print(f"wrote {len(result.files)} file(s) to {config.output_dir}")
    elif args.command == "score":
        tables = pipeline.score_tables(config, args.stream)
        print(f"scored {len(tables[0]) if tables else 0} pairs with {len(tables)} metric(s)")
    elif args.command == "sweep":
        rows = pipeline.sweep(config, args.metric_a, args.metric_b, args.points)
        best = max(rows, key=lambda r: r.f_all)
        print(f"{len(rows)} alphas; best F {best.f_all:.4f} at alpha {best.alpha:g}")
    elif args.command == "correlate":
        names, matrix = pipeline.correlate(config, args.stream)
        width = max(len(str(n)) for n in names)
        for name, row in zip(names, matrix):
            cells = " ".join("   nan" if v != v else f"{v:6.3f}" for v in row)
            print(f"{str(name):>{width}} {cells}")
    elif args.command == "histogram":
        for start, count in pipeline.histogram(config, args.granularity, args.stream):
            print(f"{start:g}\t{count}")
    elif args.command == "evaluate":
        report = pipeline.evaluate_predictions(config, args.predictions, write=True)
        _print_report(report)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        _dispatch(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except StreamPredictError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
