"""Command line entry point: ``fewweight <command> --p P --ell L [--k K] ...``.

Reports go to standard output as JSON (or CSV for spectra). Diagnostics go
to standard error. Exit codes: 0 agreement, 1 finding, 2 usage, 3 capacity,
4 internal error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import List, Optional

from app.config import settings
from app.errors import FewWeightError
from app.reports import (
    METHODS,
    bent_report,
    build_spec,
    construct_report,
    field_setup,
    params_report,
    predict_report,
    sample_report,
    spectrum_report,
    to_csv,
    to_json,
    verify_report,
    weil_report,
)

logger = logging.getLogger(__name__)

FAMILIES = ("square", "alpha-kasami", "kasami", "coulter")
EXIT_INTERNAL = 4


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid int value: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _field_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, required=True, help="odd prime characteristic")
    parser.add_argument("--ell", type=int, required=True, help="odd prime ℓ ≠ p")
    parser.add_argument("--k", type=int, default=1, help="exponent k ≥ 1 (default 1)")
    parser.add_argument("--verbose", action="store_true", help="log at DEBUG level")


def _code_args(parser: argparse.ArgumentParser, *, with_format: bool = False) -> None:
    _field_args(parser)
    which = parser.add_mutually_exclusive_group(required=True)
    which.add_argument("--du", type=int, metavar="U", help="the set D_u for u in F_p")
    which.add_argument("--dprime", choices=FAMILIES, metavar="FAMILY", help="the set D′ for a bent family")
    parser.add_argument("--i", type=int, help="exponent i of the bent family")
    parser.add_argument("--method", choices=METHODS, default="auto", help="weight evaluation method")
    parser.add_argument("--ceiling", type=int, help=f"q² ceiling (default {settings.pair_ceiling})")
    if with_format:
        parser.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fewweight", description="Few-weight p-ary codes from D_u and D′.")
    sub = parser.add_subparsers(dest="command", required=True)

    _field_args(sub.add_parser("params", help="field parameters and residue-class partition"))

    weil = sub.add_parser("weil", help="Weil sums by brute force and closed form")
    _field_args(weil)
    weil.add_argument("--a", type=int, required=True, help="coefficient a (element code)")
    weil.add_argument("--b-log", type=int, dest="b_log", help="b = α^j; omitted means b = 0")
    weil.add_argument("--u", type=int, help="u in F_p for w(u, b)")
    weil.add_argument("--method", choices=("brute", "closed", "both"), default="both")

    bent = sub.add_parser("bent", help="verify a bent candidate and extract its profile")
    _field_args(bent)
    bent.add_argument("--dprime", choices=FAMILIES, required=True, metavar="FAMILY")
    bent.add_argument("--i", type=int)
    bent.add_argument("--epsilon", type=int, choices=(-1, 1), help="expected sign ε_f")

    _code_args(sub.add_parser("construct", help="build the defining set"))
    _code_args(sub.add_parser("spectrum", help="weight distribution"), with_format=True)
    _code_args(sub.add_parser("predict", help="weight distribution from the theorem tables"), with_format=True)
    _code_args(sub.add_parser("verify", help="compare the spectrum with the prediction"), with_format=True)

    sample = sub.add_parser("sample", help="direct weights of seeded random codewords")
    _code_args(sample)
    sample.add_argument("--samples", type=_positive_int, default=settings.sample_size)
    sample.add_argument("--seed", type=int, default=settings.sample_seed)
    return parser


def _run(args: argparse.Namespace) -> int:
    if args.command == "params":
        print(to_json(params_report(args.p, args.ell, args.k)))
        return 0
    if args.command == "weil":
        report = weil_report(args.p, args.ell, args.k, a=args.a, b_log=args.b_log, u=args.u, method=args.method)
        print(to_json(report))
        return 0
    if args.command == "bent":
        report = bent_report(args.p, args.ell, args.k, family=args.dprime, i=args.i, stated_epsilon=args.epsilon)
        print(to_json(report))
        return 0

    _, _, part = field_setup(args.p, args.ell, args.k)
    spec = build_spec(part, du=args.du, dprime=args.dprime, i=args.i)
    fmt = getattr(args, "format", "json")

    if args.command == "construct":
        print(to_json(construct_report(spec, part, ceiling=args.ceiling)))
        return 0
    if args.command == "spectrum":
        report = spectrum_report(spec, part, args.method, ceiling=args.ceiling)
        print(to_csv(report) if fmt == "csv" else to_json(report), end="" if fmt == "csv" else "\n")
        return 0
    if args.command == "predict":
        report = predict_report(spec)
        print(to_csv(report) if fmt == "csv" else to_json(report), end="" if fmt == "csv" else "\n")
        return 0
    if args.command == "verify":
        verdict = verify_report(spec, part, args.method, ceiling=args.ceiling)
        print(to_csv(verdict.observed) if fmt == "csv" else to_json(verdict), end="" if fmt == "csv" else "\n")
        if not verdict.equal:
            logger.error("Observed spectrum differs from the prediction at %d weights", len(verdict.diff))
            return 1
        return 0
    if args.command == "sample":
        print(to_json(sample_report(spec, part, args.samples, args.seed, ceiling=args.ceiling)))
        return 0
    raise AssertionError(f"unhandled command {args.command!r}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format=settings.log_format,
        stream=sys.stderr,
    )
    try:
        return _run(args)
    except FewWeightError as exc:
        logger.error("%s: %s", exc.detail, exc)
        return exc.exit_code
    except Exception as exc:
        logger.exception("%s failed: %s", args.command, exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
