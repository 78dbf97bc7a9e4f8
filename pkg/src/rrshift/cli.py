"""Command-line interface: ``rrshift {trajectory,shift,spectrum,verify,sweep}``.

Exit status: 0 on success, 1 on a numerical-tolerance failure, 2 on a
configuration or domain error.
"""

import argparse
import logging
import os
import sys
from dataclasses import replace

from .config import ExperimentConfig, load_config
from .errors import ConfigError, DomainError, ToleranceError
from . import harness

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("rrshift")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="rrshift",
        description="Radiation-reaction position shift: classical and QED-limit routes.",
    )
    parser.add_argument("command", choices=["trajectory", "shift", "spectrum", "verify", "sweep"])
    parser.add_argument("--config", metavar="PATH", help="JSON experiment config (defaults if omitted)")
    parser.add_argument("--out", metavar="DIR", default=".", help="output directory")
    parser.add_argument("--workers", metavar="N", type=int, default=None,
                        help="worker processes for sweeps (overrides config)")
    parser.add_argument("--tolerance-scale", metavar="X", type=float, default=1.0,
                        help="multiply every verify tolerance by X")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config) if args.config else ExperimentConfig().validate()
        if args.workers is not None:
            if args.workers < 1:
                raise ConfigError("--workers must be >= 1")
            cfg = replace(cfg, workers=args.workers)
        if not args.tolerance_scale > 0.0:
            raise ConfigError("--tolerance-scale must be positive")
        os.makedirs(args.out, exist_ok=True)
        if args.command == "trajectory":
            harness.cmd_trajectory(cfg, args.out)
        elif args.command == "shift":
            harness.cmd_shift(cfg, args.out)
        elif args.command == "spectrum":
            harness.cmd_spectrum(cfg, args.out)
        elif args.command == "sweep":
            harness.cmd_sweep(cfg, args.out)
        else:
            rep = harness.cmd_verify(cfg, args.out, args.tolerance_scale)
            for r in rep.records:
                print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.metric} error "
                      f"{r.rel_error if r.metric == 'rel' else r.abs_error:.3e} (tol {r.tolerance:.1e})")
            if not rep.passed:
                print("failed identities: " + ", ".join(rep.failures), file=sys.stderr)
                return EXIT_NUMERIC
    except (ConfigError, DomainError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ToleranceError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
