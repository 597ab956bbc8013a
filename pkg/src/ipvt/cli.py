"""Command line front end: one subcommand per experiment.

Exit codes: 0 when the experiment's statistical checks pass, 2 when they
fail, 1 on usage errors.  Parameters may be given inline as key=value or in
a JSON config file (--config); the file wins on conflicts, with a warning.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import EXPERIMENTS, ExperimentConfig, run

EXIT_PASS = 0
EXIT_USAGE = 1
EXIT_STAT_FAIL = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract reserves 2 for
    # statistical failures, so usage errors are remapped to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ipvt",
                     description="Ideal Poisson-Voronoi tessellation "
                                 "experiments on the product of two "
                                 "hyperbolic planes.")
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name.replace("_", "-"),
                           help=f"run the {name} experiment")
        p.set_defaults(experiment=name)
        p.add_argument("--seed", type=int, default=0,
                       help="base seed for all RNG streams")
        p.add_argument("--out", default=".",
                       help="output directory for CSV/JSON/SVG artifacts")
        p.add_argument("--threads", type=int, default=1,
                       help="worker cap (results are independent of it)")
        p.add_argument("--config", default=None,
                       help="JSON file of experiment parameters; "
                            "overrides inline key=value on conflict")
        p.add_argument("params", nargs="*", metavar="key=value",
                       help="experiment parameters")
    return parser


def parse_inline_params(pairs) -> dict:
    out = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"parameters must look like key=value, "
                             f"got {pair!r}")
        out[key] = value
    return out


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE

    try:
        params = parse_inline_params(args.params)
        if args.config is not None:
            with open(args.config) as fh:
                file_params = json.load(fh)
            if not isinstance(file_params, dict):
                raise ValueError("config file must hold a JSON object")
            for key in sorted(set(params) & set(file_params)):
                print(f"warning: parameter {key!r} given both inline and in "
                      f"{args.config}; the file wins", file=sys.stderr)
            params.update(file_params)
        config = ExperimentConfig(args.experiment, seed=args.seed,
                                  parameters=params, output_dir=args.out)
        report = run(config)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    verdict = "PASS" if report.passed else "FAIL"
    print(f"{report.experiment}: {verdict} "
          f"(seed={report.seed}, wall={report.wall_time:.2f}s)")
    for key, value in sorted(report.statistics.items()):
        print(f"  {key} = {value}")
    for name, est in sorted(report.estimates.items()):
        print(f"  {name} = {est['value']:.6g} +/- {est['stderr']:.2g} "
              f"(n={est['n']})")
    return EXIT_PASS if report.passed else EXIT_STAT_FAIL


if __name__ == "__main__":
    raise SystemExit(main())
