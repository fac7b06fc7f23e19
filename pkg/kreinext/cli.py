"""Command-line surface: `kreinext <subcommand> ...`.

Reports go to standard output as JSON; diagnostics go to standard error.
Exit status: 0 success, 1 malformed input, 2 invariant violation,
3 verification failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .shared import (
    KreinExtError,
    MalformedInputError,
    Tolerance,
    configure_logging,
    load_environment,
    resolve_tolerance,
)
from .services.extensions import ExtensionParametrization
from .services.problem_files import SPECIAL_GAMMAS, load_candidate, load_problem, resolve_gamma
from .services.reports import (
    EXIT_OK,
    EXIT_VERIFICATION,
    compare_report,
    dumps,
    error_payload,
    exit_code_for,
    extend_report,
    membership_report,
    parametrize_report,
    problem_parametrization,
    run_demo,
    run_verify,
)

logger = logging.getLogger(__name__)


class _ArgumentParser(argparse.ArgumentParser):
    """Usage errors are malformed input, not argparse's exit status 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise MalformedInputError(f"{self.prog}: {message}")


def parse_dims(text: str) -> List[int]:
    """'2..5' (inclusive), '2,4,6' or '3'."""
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
            dims = list(range(low, high + 1))
        else:
            dims = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise MalformedInputError(f"invalid --dims value {text!r}") from exc
    if not dims or min(dims) < 1:
        raise MalformedInputError(f"--dims must name positive dimensions, got {text!r}")
    return dims


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="kreinext", description="Positive selfadjoint extensions via Cayley transforms.")
    parser.add_argument(
        "--profile",
        choices=["default", "strict", "loose"],
        default=None,
        help="Tolerance profile (default: $KREINEXT_TOLERANCE_PROFILE or 'default')",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    p_param = sub.add_parser("parametrize", help="Parametrization data and the Gamma coordinate basis")
    p_param.add_argument("problem", help="Problem JSON file")

    gamma_help = f"Gamma JSON file or one of {', '.join(SPECIAL_GAMMAS)}"
    p_extend = sub.add_parser("extend", help="Extension attached to one Gamma")
    p_extend.add_argument("problem")
    p_extend.add_argument("--gamma", required=True, help=gamma_help)

    p_member = sub.add_parser("membership", help="Is a candidate matrix a contraction extension?")
    p_member.add_argument("problem")
    p_member.add_argument("--candidate", required=True, help="Candidate matrix JSON file")
    p_member.add_argument("--route", choices=["direct", "interval", "both"], default="both")

    p_compare = sub.add_parser("compare", help="Order of two extensions")
    p_compare.add_argument("problem")
    p_compare.add_argument("--gamma-a", required=True, help=gamma_help)
    p_compare.add_argument("--gamma-b", required=True, help=gamma_help)

    p_verify = sub.add_parser("verify", help="Run every randomized verification suite")
    p_verify.add_argument("--dims", default="2..5", help="Ambient dimensions, e.g. 2..5 or 2,4")
    p_verify.add_argument("--trials", type=int, default=200)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--workers", type=int, default=None, help="Trial pool size (default: $KREINEXT_WORKERS)")

    p_demo = sub.add_parser("demo", help="Worked examples")
    p_demo.add_argument("example", choices=["laplacian"])
    p_demo.add_argument("--size", type=int, default=6)
    p_demo.add_argument("--samples", type=int, default=50)
    p_demo.add_argument("--seed", type=int, default=0)
    p_demo.add_argument("--workers", type=int, default=None)
    return parser


def _problem(path: str, profile: Optional[str]) -> Tuple[ExtensionParametrization, Tolerance]:
    problem = load_problem(path)
    tol = problem.resolve_tolerance(profile)
    return problem_parametrization(problem.to_operator(tol), tol), tol


def dispatch(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """Run one parsed command; returns the report and its exit status."""
    if args.command == "verify":
        payload = run_verify(parse_dims(args.dims), args.trials, args.seed, resolve_tolerance(args.profile), args.workers)
        return payload, EXIT_OK if payload["passed"] else EXIT_VERIFICATION
    if args.command == "demo":
        payload = run_demo(args.size, args.samples, args.seed, resolve_tolerance(args.profile), args.workers)
        return payload, EXIT_OK if payload["passed"] else EXIT_VERIFICATION

    p, tol = _problem(args.problem, args.profile)
    if args.command == "parametrize":
        return parametrize_report(p), EXIT_OK
    if args.command == "extend":
        return extend_report(p, resolve_gamma(args.gamma, p.defect_dim, tol), tol), EXIT_OK
    if args.command == "membership":
        return membership_report(p, load_candidate(args.candidate), args.route, tol), EXIT_OK
    if args.command == "compare":
        gamma_a = resolve_gamma(args.gamma_a, p.defect_dim, tol)
        gamma_b = resolve_gamma(args.gamma_b, p.defect_dim, tol)
        return compare_report(p, gamma_a, gamma_b, tol), EXIT_OK
    raise MalformedInputError(f"unknown command {args.command!r}")


def run(argv: Optional[Sequence[str]] = None) -> int:
    load_environment()
    configure_logging("WARNING")
    try:
        args = build_parser().parse_args(argv)
        payload, status = dispatch(args)
    except KreinExtError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        print(dumps(error_payload(exc)))
        return exit_code_for(exc)
    print(dumps(payload))
    return status


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
