"""Command line entry point: ``binthue {solve,sweep,oracle,compare}``."""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from .errors import (
    CheckpointMismatch,
    FixtureParseError,
    PrecisionError,
    PrecisionExhausted,
    ReducibleInputError,
)
from .numerics import PrecisionPolicy
from .oracle import OracleQuery, brute_solve
from .runner import SweepConfig, compare_fixture, packaged_fixture, parse_bound, sweep
from .thue_core import DEFAULT_C, EquationInstance, solve_instance

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INPUT = 2
EXIT_PRECISION = 3
EXIT_IO = 4

log = logging.getLogger("binthue")


def _bound(text: str) -> int:
    try:
        return parse_bound(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _policy(args) -> PrecisionPolicy:
    return PrecisionPolicy.from_env(initial_digits=args.digits)


def _print_triples(triples) -> None:
    for t in triples:
        print(f"{t.n},{t.m},{t.x},{t.y},{t.rhs}")


def _print_diff(missing, extra) -> None:
    for t in missing:
        print(f"missing {t.n},{t.m},{t.x},{t.y},{t.rhs}")
    for t in extra:
        print(f"extra {t.n},{t.m},{t.x},{t.y},{t.rhs}")


def cmd_solve(args) -> int:
    triples = solve_instance(EquationInstance(args.n, args.m, args.C), _policy(args))
    _print_triples(triples)
    return EXIT_OK


def cmd_oracle(args) -> int:
    _print_triples(brute_solve(OracleQuery(args.n, args.m, args.y_max)))
    return EXIT_OK


def cmd_sweep(args) -> int:
    fixture = args.fixture
    if fixture == "published":
        fixture = packaged_fixture(args.n)
    cfg = SweepConfig(
        n=args.n,
        m_lo=args.m_lo,
        m_hi=args.m_hi,
        C=args.C,
        policy=_policy(args),
        workers=args.workers,
        output_path=args.out,
        checkpoint_path=args.checkpoint,
        fixture_path=fixture,
    )
    report = sweep(cfg)
    print(
        f"solved={report.solved_count} skipped_reducible={report.skipped_reducible_count} "
        f"solutions={report.solutions_found} max_digits={report.max_digits_used} "
        f"escalations={len(report.escalations)} wall_time={report.wall_time:.1f}s",
        file=sys.stderr,
    )
    if report.fixture_diff is not None:
        missing, extra = report.fixture_diff
        _print_diff(missing, extra)
        if missing or extra:
            return EXIT_MISMATCH
    return EXIT_OK


def cmd_compare(args) -> int:
    m_range = None
    if args.m_lo is not None or args.m_hi is not None:
        m_range = (args.m_lo or 0, args.m_hi if args.m_hi is not None else float("inf"))
    missing, extra = compare_fixture(args.out, args.fixture, m_range)
    _print_diff(missing, extra)
    return EXIT_MISMATCH if missing or extra else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="binthue",
        description="Small solutions of x^n - m*y^n = +-1.",
        epilog="BINTHUE_DIGITS, BINTHUE_MAX_DIGITS and BINTHUE_GROWTH override the precision defaults.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, m=True):
        p.add_argument("--n", type=int, required=True, help="exponent (4 or an odd prime)")
        if m:
            p.add_argument("--m", type=int, required=True)

    def precision(p):
        p.add_argument("--C", type=_bound, default=DEFAULT_C, help="height bound, e.g. 10^500")
        p.add_argument("--digits", type=int, default=None, help="initial working precision")

    p = sub.add_parser("solve", help="solve one equation")
    common(p)
    precision(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep", help="solve for every m in a range")
    common(p, m=False)
    p.add_argument("--m-lo", type=int, required=True)
    p.add_argument("--m-hi", type=int, required=True)
    precision(p)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--fixture", default=None, help="solutions CSV to compare with, or 'published' for the packaged table")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="brute-force search over y")
    common(p)
    p.add_argument("--y-max", type=int, required=True)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("compare", help="compare a solutions CSV with a fixture")
    p.add_argument("--out", required=True)
    p.add_argument("--fixture", required=True)
    p.add_argument("--m-lo", type=int, default=None, help="only expect fixture rows with m >= this")
    p.add_argument("--m-hi", type=int, default=None, help="only expect fixture rows with m <= this")
    p.set_defaults(func=cmd_compare)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except PrecisionExhausted as exc:
        print(f"error: {exc} (m={exc.m})", file=sys.stderr)
        return EXIT_PRECISION
    except (FixtureParseError, CheckpointMismatch, ReducibleInputError, PrecisionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
