"""Command-line entry point: ``adaptive-rbf {sysid,classify,approx,gradcheck}``."""

import argparse
import dataclasses
import logging
import os
import sys

from .estimator import ARMS
from .exceptions import ConfigError, DataError, DivergenceError
from .experiments import (
    CsvSource,
    default_config,
    gradcheck,
    load_config,
    run_experiment,
    run_suite,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_DIVERGENCE = 4
EXIT_GRADCHECK = 5

log = logging.getLogger("adaptive_rbf")


def _add_common(p):
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--arm", default=None, help=f"one of {', '.join(ARMS)} or 'all' (default)")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (data noise and sample order)")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--eta", type=float, default=None, help="learning rate")
    p.add_argument("--shuffle", action="store_true", help="shuffle samples every epoch")
    p.add_argument("--workers", type=int, default=None, help="parallel arms (default: one per CPU)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="adaptive-rbf",
        description="RBF networks with an adaptive cosine/Gaussian kernel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("sysid", "nonlinear plant identification"),
        ("approx", "approximation of exp(x^2 - y)"),
        ("classify", "two-class pattern classification"),
    ]:
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "classify":
            p.add_argument("--data", help="CSV file (default: synthetic blobs)")
            p.add_argument("--target-column", default=None)
            p.add_argument("--split-column", default=None)
            p.add_argument("--emit-kernel-map", action="store_true",
                           help="also write kernel_map.csv (responses to the two class means)")
    p = sub.add_parser("gradcheck", help="check the mixing-weight gradient numerically")
    _add_common(p)
    p.add_argument("--trials", type=int, default=1000)
    return parser


def _config_for(args):
    if args.config:
        cfg = load_config(args.config, args.command)
    else:
        cfg = default_config(args.command)
    train_over = {}
    if args.epochs is not None:
        train_over["epochs"] = args.epochs
    if args.eta is not None:
        train_over["eta"] = args.eta
    if args.shuffle:
        train_over["shuffle"] = True
    if args.seed is not None:
        train_over["seed"] = args.seed
        if hasattr(cfg.data, "seed"):
            cfg.data = dataclasses.replace(cfg.data, seed=args.seed)
    try:
        if train_over:
            cfg.train = dataclasses.replace(cfg.train, **train_over)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    if args.out is not None:
        cfg.output_dir = args.out
    if args.command == "classify":
        if args.data:
            target = args.target_column
            if target is None:
                target = -1
            elif target.lstrip("-").isdigit():
                target = int(target)
            cfg.data = CsvSource(args.data, target, args.split_column)
        if args.emit_kernel_map:
            cfg.emit_kernel_map = True
    return cfg


def _print_table(summaries):
    cols = f"{'arm':<10} {'best_mse_db':>12} {'epoch':>6} {'alpha1':>8} {'alpha2':>8}"
    extra = any(s.test_accuracy is not None for s in summaries)
    if extra:
        cols += f" {'train_acc':>9} {'test_acc':>9}"
    print(cols)
    for s in summaries:
        if s.error:
            print(f"{s.arm:<10} FAILED: {s.error}")
            continue
        line = (f"{s.arm:<10} {s.best_mse_db:>12.4f} {s.best_epoch + 1:>6d} "
                f"{s.final_alpha1:>8.4f} {s.final_alpha2:>8.4f}")
        if extra:
            line += f" {s.train_accuracy:>9.4f} {s.test_accuracy:>9.4f}"
        print(line)


def _run(args):
    if args.command == "gradcheck":
        report = gradcheck(seed=args.seed or 0, trials=args.trials)
        print(f"trials={report.trials} max_rel_error={report.max_rel_error:.3e} "
              f"worst_trial={report.worst_trial} "
              f"{'PASS' if report.passed else 'FAIL'} (tol {report.tolerance:g})")
        return EXIT_OK if report.passed else EXIT_GRADCHECK

    cfg = _config_for(args)
    arm = args.arm or "all"
    if arm != "all" and arm not in ARMS:
        raise ConfigError(f"unknown arm {arm!r}")
    if arm != "all":
        cfg = cfg.with_arm(arm)
        summaries = [run_experiment(cfg)]
    else:
        configs = [cfg.with_arm(a, os.path.join(cfg.output_dir, a)) for a in ARMS]
        summaries = run_suite(configs, output_dir=cfg.output_dir, workers=args.workers)
    _print_table(summaries)
    failed = [s for s in summaries if s.error]
    if failed:
        if any(s.error.startswith("DivergenceError") for s in failed):
            return EXIT_DIVERGENCE
        if any(s.error.startswith(("DataError", "OSError")) for s in failed):
            return EXIT_DATA
        return EXIT_CONFIG
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE


if __name__ == "__main__":
    sys.exit(main())
