"""Command-line interface: ``spar adapt | diagnose | synth | verify``.

Exit status is 0 on success, 1 when a verification check fails and 2 on
usage, input or format errors.
"""

import argparse
import logging
import sys

from spar.adapt import spar_adapt
from spar.matrixio import load_matrix, load_targets, save_report
from spar.riskmodel import inflation_profile
from spar.spectral import RankTolerance, decompose, pinv_apply
from spar.statfun import DEFAULT_ALPHA, mle_sigma2
from spar.synthetic import SyntheticConfig, run_experiment, write_table
from spar.verify import verify_theorems

log = logging.getLogger("spar")


class UsageError(Exception):
    pass


def _alpha(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (0.0 <= value < 1.0):
        raise argparse.ArgumentTypeError(f"alpha must lie in [0, 1), got {value}")
    return value


def _nonneg(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value >= 0.0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative number, got {value}")
    return value


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def build_parser():
    parser = argparse.ArgumentParser(prog="spar", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_inputs(p):
        p.add_argument("--train", required=True, help="source feature matrix (CSV)")
        p.add_argument("--targets", required=True, help="source labels (one column)")
        p.add_argument("--test", required=True, help="unlabeled target feature matrix (CSV)")
        p.add_argument("--header", action="store_true", help="input files start with a header line")
        p.add_argument("--sigma2", type=_nonneg, help="known noise variance (skips the MLE)")
        p.add_argument("--rank-tol", type=_nonneg, default=RankTolerance().relative_threshold)
        p.add_argument("--out", required=True)

    p = sub.add_parser("adapt", help="fit OLS and project out inflated target directions")
    add_inputs(p)
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)

    p = sub.add_parser("diagnose", help="write the per-direction variance inflation profile")
    add_inputs(p)

    p = sub.add_parser("synth", help="run synthetic covariate-shift experiments")
    p.add_argument("--experiment", type=int, choices=(1, 2, 3, 4), action="append",
                   help="experiment id (repeatable; default all)")
    p.add_argument("--config", help="JSON SyntheticConfig to run instead of a preset")
    p.add_argument("--seeds", type=_positive_int, default=10)
    p.add_argument("--base-seed", type=int, default=0)
    p.add_argument("--alpha", type=_alpha, default=DEFAULT_ALPHA)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="Monte Carlo verification of the risk formulas")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--instances", type=_positive_int, default=20)
    return parser


def _load_inputs(args):
    x = load_matrix(args.train, args.header)
    y = load_targets(args.targets, args.header)
    z = load_matrix(args.test, args.header)
    if len(y) != x.shape[0]:
        raise UsageError(f"{args.targets} has {len(y)} labels but {args.train} has {x.shape[0]} rows")
    if x.shape[1] != z.shape[1]:
        raise UsageError(f"{args.train} has {x.shape[1]} columns but {args.test} has {z.shape[1]}")
    return x, y, z


def cmd_adapt(args):
    x, y, z = _load_inputs(args)
    report = spar_adapt(x, y, z, args.alpha, RankTolerance(args.rank_tol), args.sigma2)
    if report.rank_deficient:
        log.warning("source matrix is rank deficient (rank %d < %d)", report.source_rank, x.shape[1])
    save_report(report, args.out)
    log.info("selected %s of %d target directions", report.selected_indices, len(report.ledger))
    return 0


def cmd_diagnose(args):
    x, y, z = _load_inputs(args)
    tol = RankTolerance(args.rank_tol)
    spec_x = decompose(x, tol)
    sigma2 = args.sigma2
    if sigma2 is None:
        sigma2 = mle_sigma2(x, y, pinv_apply(spec_x, y))
    rows = inflation_profile(spec_x, decompose(z, tol), sigma2)
    with open(args.out, "w", newline="", encoding="utf-8") as fh:
        fh.write("j,lambda_z_sq,normalized_var\n")
        for j, lam_sq, nv in rows:
            fh.write(f"{j},{lam_sq:.17g},{nv:.17g}\n")
    return 0


def cmd_synth(args):
    if args.config:
        cfg = SyntheticConfig.from_json(args.config)
        results = [run_experiment("config", args.seeds, args.base_seed, args.alpha, config=cfg)]
    else:
        experiments = args.experiment or [1, 2, 3, 4]
        results = [run_experiment(e, args.seeds, args.base_seed, args.alpha) for e in experiments]
    write_table(args.out, results)
    for res in results:
        for exp, method, mean, std, _ in res.rows():
            log.info("experiment %s %-10s %.3e +- %.3e", exp, method, mean, std)
    return 0


def cmd_verify(args):
    if args.trials < 1000:
        raise UsageError("--trials must be at least 1000")
    report = verify_theorems(args.trials, args.seed, args.instances)
    for line in report.lines():
        print(line)
    return 0 if report.passed else 1


COMMANDS = {"adapt": cmd_adapt, "diagnose": cmd_diagnose, "synth": cmd_synth, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (UsageError, OSError, ValueError) as exc:
        print(f"spar {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
