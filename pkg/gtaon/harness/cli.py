"""Command line interface of gtaon.

Subcommands: ``sweep``, ``chi2``, ``detect``, ``dd``, ``oracle``,
``yprime`` and ``witness``. Summaries are printed as JSON on standard
output; logs go to standard error. Exit codes: 0 on success, 1 on usage
or configuration errors, 2 when an oracle check fails. The environment
variable ``GTAON_THREADS`` caps the number of worker processes.
"""
import argparse
import logging
import sys

from gtaon.design import log2_binomial, tests_for_beta
from gtaon.divergence import (chi2_exact, chi2_lemma3_bound,
                              tests_for_eta)
from gtaon.exceptions import GTAONException, OracleFailure
from gtaon.harness import experiments, reporting
from gtaon.harness.config import SweepConfig
from gtaon.harness.engine import run_sweep
from gtaon.harness.grid_parser import parse_grid, parse_k_rule
from gtaon.harness.oracle_suite import run_oracle_suite


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_ORACLE = 2

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"


class ArgumentParser(argparse.ArgumentParser):
    """Argument parser exiting with `EXIT_USAGE` on bad arguments."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "{}: error: {}\n".format(self.prog, message))


def configure_logging(verbosity):
    level = {0: logging.WARNING, 1: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr)


def _emit(j_data, output=None):
    if output is not None:
        reporting.write_json(j_data, output)
    print(reporting.dumps(j_data))


def _tests(args, p, k):
    """n from --n, --beta or --eta."""
    if getattr(args, "n", None) is not None:
        return args.n
    if getattr(args, "beta", None) is not None:
        return tests_for_beta(p, k, args.beta)
    if getattr(args, "eta", None) is not None:
        return tests_for_eta(p, k, args.eta)
    raise GTAONException("One of --n, --beta or --eta is required")


def _k(args):
    return parse_k_rule(args.k)(args.p)


def command_sweep(args):
    if args.config is not None:
        config = SweepConfig.load(args.config)
        overrides = {
            key: value for key, value in (
                ("trials", args.trials), ("seed", args.seed),
                ("output", args.output))
            if value is not None
        }
        if overrides:
            config = config.replace(**overrides)
    else:
        if args.p is None or args.k is None or args.betas is None:
            raise GTAONException(
                "sweep needs --config or all of --p, --k and --betas")
        config = SweepConfig(
            p=args.p, k=args.k, betas=args.betas, design=args.design,
            decoder=args.decoder, detector=args.detector,
            trials=args.trials if args.trials is not None else 500,
            seed=args.seed if args.seed is not None else 0,
            alpha=args.alpha, delta=args.delta,
            alpha_prime=args.alpha_prime, output=args.output,
            dd_blocks=args.dd_blocks)
    curve, _ = run_sweep(config, workers=args.workers,
                         trials_output=args.trials_output)
    frame = curve.to_frame()
    _emit({"config": config.to_json(),
           "cells": frame.to_dict(orient="records")})
    return EXIT_OK


def command_chi2(args):
    k = _k(args)
    n = _tests(args, args.p, k)
    report = chi2_exact(args.p, k, n, eta=args.eta)
    j_data = report.to_json()
    if args.tight and report.eta is not None:
        j_data["lemma3_bound_tight"] = chi2_lemma3_bound(
            args.p, k, report.eta, tight=True)
    _emit(j_data, args.output)
    return EXIT_OK


def command_detect(args):
    k = _k(args)
    n = _tests(args, args.p, k)
    summary = experiments.run_detect_experiment(
        args.p, k, n, detector=args.detector, trials=args.trials,
        seed=args.seed, reduced=args.reduced)
    _emit(summary, args.output)
    return EXIT_OK


def command_dd(args):
    summary = experiments.run_dd_experiment(
        args.p, _k(args), args.c, args.trials, seed=args.seed)
    _emit(summary, args.output)
    return EXIT_OK


def command_oracle(args):
    report = run_oracle_suite(
        max_p=args.max_p, max_k=args.max_k, max_n=args.max_n,
        seed=args.seed, samples=args.samples)
    _emit(report.to_json(), args.output)
    try:
        report.raise_for_failures()
    except OracleFailure as e:
        logger.error("oracle_failed %s", e)
        return EXIT_ORACLE
    return EXIT_OK


def command_yprime(args):
    frame = experiments.run_yprime_experiment(
        args.k, parse_grid(args.deltas), args.tests, seed=args.seed, p=args.p)
    if args.csv is not None:
        reporting.write_csv(frame, args.csv)
    _emit({"k": args.k, "tests": args.tests,
           "rows": frame.to_dict(orient="records")}, args.output)
    return EXIT_OK


def command_witness(args):
    k = _k(args)
    n = _tests(args, args.p, k)
    summary = experiments.run_witness_experiment(
        args.p, k, n, args.trials, seed=args.seed, budget=args.budget)
    summary["log2_binomial"] = log2_binomial(args.p, k)
    _emit(summary, args.output)
    return EXIT_OK


def _add_tests_group(parser, beta=True):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--n", type=int, help="Number of tests.")
    if beta:
        group.add_argument(
            "--beta", type=float,
            help="Tests as a fraction of k log2(p / k).")
    group.add_argument(
        "--eta", type=float,
        help="Tests n = floor((1 - eta) log2 C(p, k)).")


def build_parser():
    parser = ArgumentParser(
        prog="gtaon",
        description="Group testing: all-or-nothing phase transition toolkit.")
    parser.add_argument("-v", "--verbose", action="count", default=0,
                        help="Increase log verbosity (-v info, -vv debug).")
    sub = parser.add_subparsers(dest="command", parser_class=ArgumentParser)
    sub.required = True

    sweep = sub.add_parser("sweep", help="Recovery phase-transition sweep.")
    sweep.add_argument("--config", help="Sweep configuration (JSON or TOML).")
    sweep.add_argument("--p", type=int)
    sweep.add_argument("--k", help="k or a k-rule such as 'ceil(p^0.7)'.")
    sweep.add_argument("--betas", help="Grid such as '0.5:1.4:0.1'.")
    sweep.add_argument("--design", default="bernoulli")
    sweep.add_argument("--decoder", default="rank_overlap")
    sweep.add_argument("--detector", default=None)
    sweep.add_argument("--trials", type=int, default=None)
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--alpha", type=float, default=0.25)
    sweep.add_argument("--delta", type=float, default=0.1)
    sweep.add_argument("--alpha-prime", type=float, default=None)
    sweep.add_argument("--dd-blocks", type=int, default=None,
                       help="Also run definite-defective blocks per trial.")
    sweep.add_argument("--workers", type=int, default=None)
    sweep.add_argument("--output", help="Per-cell CSV.")
    sweep.add_argument("--trials-output", help="Per-trial CSV.")
    sweep.set_defaults(func=command_sweep)

    chi2 = sub.add_parser("chi2", help="Exact chi2 divergence and bounds.")
    chi2.add_argument("--p", type=int, required=True)
    chi2.add_argument("--k", required=True)
    _add_tests_group(chi2, beta=False)
    chi2.add_argument("--tight", action="store_true",
                      help="Also report the tighter intermediate bound.")
    chi2.add_argument("--output")
    chi2.set_defaults(func=command_chi2)

    detect = sub.add_parser("detect", help="Paired detection trials.")
    detect.add_argument("--p", type=int, required=True)
    detect.add_argument("--k", required=True)
    _add_tests_group(detect)
    detect.add_argument("--detector", choices=("covered", "trivial"),
                        default="covered")
    detect.add_argument("--trials", type=int, default=1000)
    detect.add_argument("--seed", type=int, default=0)
    detect.add_argument("--reduced", dest="reduced", action="store_true",
                        default=None,
                        help="Sample the covered count without building X.")
    detect.add_argument("--materialise", dest="reduced",
                        action="store_false")
    detect.add_argument("--output")
    detect.set_defaults(func=command_detect)

    dd = sub.add_parser("dd", help="Definite-defective trials.")
    dd.add_argument("--p", type=int, required=True)
    dd.add_argument("--k", required=True)
    dd.add_argument("--c", type=int, default=1)
    dd.add_argument("--trials", type=int, default=10000)
    dd.add_argument("--seed", type=int, default=0)
    dd.add_argument("--output")
    dd.set_defaults(func=command_dd)

    oracle = sub.add_parser("oracle", help="Run the oracle suite.")
    oracle.add_argument("--max-p", type=int, default=6)
    oracle.add_argument("--max-k", type=int, default=2)
    oracle.add_argument("--max-n", type=int, default=3)
    oracle.add_argument("--seed", type=int, default=0)
    oracle.add_argument("--samples", type=int, default=10 ** 5)
    oracle.add_argument("--output")
    oracle.set_defaults(func=command_oracle)

    yprime = sub.add_parser("yprime", help="Extra-test prediction.")
    yprime.add_argument("--k", type=int, required=True)
    yprime.add_argument("--p", type=int, default=None)
    yprime.add_argument("--deltas", default="[0, 0.25, 0.5, 0.75, 1]")
    yprime.add_argument("--tests", type=int, default=10 ** 5)
    yprime.add_argument("--seed", type=int, default=0)
    yprime.add_argument("--csv")
    yprime.add_argument("--output")
    yprime.set_defaults(func=command_yprime)

    witness = sub.add_parser(
        "witness", help="Disjoint consistent sets against 1 / (1 + chi2).")
    witness.add_argument("--p", type=int, required=True)
    witness.add_argument("--k", required=True)
    _add_tests_group(witness)
    witness.add_argument("--trials", type=int, default=10000)
    witness.add_argument("--seed", type=int, default=0)
    witness.add_argument("--budget", type=int, default=10 ** 5)
    witness.add_argument("--output")
    witness.set_defaults(func=command_witness)
    return parser


def main(argv=None):
    """Entry point; returns the process exit code."""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.verbose)
    try:
        return args.func(args)
    except GTAONException as e:
        logger.error("command_failed command=%s error=%s", args.command, e)
        print("gtaon {}: error: {}".format(args.command, e), file=sys.stderr)
        return EXIT_USAGE
