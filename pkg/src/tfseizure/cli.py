"""Command-line entry point: ``tfseizure <command> [options]``.

Every failure prints a single line ``tfseizure: error[<kind>]: <message>`` to
stderr and exits with status 2.
"""

from __future__ import annotations

import argparse
import sys

from tfseizure import pipeline
from tfseizure.errors import TfSeizureError
from tfseizure.pipeline import RunConfig

ERROR_PREFIX = "tfseizure: error"

# flag dest -> RunConfig / FeatureConfig key
_OVERRIDES = {
    "manifest": "manifest",
    "output_dir": "output_dir",
    "kernels": "kernels",
    "families": "family_sets",
    "n_seeds": "n_seeds",
    "seed": "seed",
    "train_fraction": "train_fraction",
    "best_k": "best_k",
    "n_bins": "n_bins",
    "alpha": "alpha",
    "lag_window": "lag_window_length",
    "fft_length": "fft_length",
    "jobs": "n_jobs",
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="run configuration file (key = value lines)")
    p.add_argument("--manifest", help="dataset manifest file")
    p.add_argument("--output-dir", dest="output_dir", help="directory for all outputs")
    p.add_argument("--kernels", help="comma-separated subset of swvd,cwd,spec")
    p.add_argument("--families", help="comma-separated subset of time_freq,tf")
    p.add_argument("--n-seeds", dest="n_seeds", help="number of split seeds")
    p.add_argument("--seed", help="first split seed")
    p.add_argument("--train-fraction", dest="train_fraction")
    p.add_argument("--best-k", dest="best_k")
    p.add_argument("--bins", dest="n_bins", help="equal-width bins for information gain")
    p.add_argument("--alpha", help="Choi-Williams alpha")
    p.add_argument("--lag-window", dest="lag_window", help="odd lag window length")
    p.add_argument("--fft-length", dest="fft_length", help="frequency bins M")
    p.add_argument("--jobs", help="worker processes for feature extraction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tfseizure",
                                     description="TFD-based EEG seizure detection pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="write feature CSVs from the corpus")
    _common(p)

    p = sub.add_parser("evaluate", help="repeated-split accuracy report from feature CSVs")
    _common(p)
    p.add_argument("csv", nargs="+")

    p = sub.add_parser("rank", help="information-gain ranking of a feature CSV")
    _common(p)
    p.add_argument("csv")

    p = sub.add_parser("render", help="greyscale PGM images of TFDs")
    _common(p)
    p.add_argument("--segment", action="append", default=[], help="source id (repeatable)")

    p = sub.add_parser("histogram", help="per-class histogram and normal overlap of one feature")
    _common(p)
    p.add_argument("csv")
    p.add_argument("feature")

    p = sub.add_parser("synth", help="write the synthetic surrogate corpus")
    p.add_argument("--out", required=True, help="corpus root directory")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--per-class", dest="per_class", type=int, default=50)
    return parser


def load_config(args) -> RunConfig:
    overrides = {key: getattr(args, dest) for dest, key in _OVERRIDES.items()
                 if getattr(args, dest, None) is not None}
    if args.config:
        return RunConfig.from_file(args.config, overrides)
    return RunConfig.from_mapping(overrides)


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "synth":
        print(pipeline.cmd_synth(args.out, args.seed, args.per_class))
        return 0

    config = load_config(args)
    if args.command == "extract":
        config.require_manifest()
        for path in pipeline.cmd_extract(config):
            print(path)
    elif args.command == "evaluate":
        path, _ = pipeline.cmd_evaluate(config, args.csv)
        print(path.read_text(), end="")
    elif args.command == "rank":
        path, result = pipeline.cmd_rank(config, args.csv)
        print(path)
        print("top-%d: %s" % (config.best_k, ", ".join(result.top(config.best_k))))
    elif args.command == "render":
        config.require_manifest()
        for path in pipeline.cmd_render(config, args.segment):
            print(path)
    elif args.command == "histogram":
        hist, fit_path, result = pipeline.cmd_histogram(config, args.csv, args.feature)
        print(hist)
        print(fit_path)
        print(f"overlap {result.overlap:.6g}")
    return 0


def main(argv=None) -> int:
    try:
        return run(argv)
    except TfSeizureError as exc:
        print(f"{ERROR_PREFIX}[{exc.kind}]: {exc}", file=sys.stderr)
    except OSError as exc:
        print(f"{ERROR_PREFIX}[io]: {exc}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
