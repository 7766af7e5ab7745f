import argparse
import logging
from typing import Any, Dict, Tuple

from app.repositories.output_repository import OutputRepository
from app.services.verification import VerificationService
from app.utils.errors import EXIT_CHECK_FAILED, EXIT_OK, exit_code_for

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("verify", help="Run verification suites")
    parser.add_argument(
        "--suite",
        action="append",
        required=True,
        help="Suite name (repeatable), or 'all'",
    )
    parser.add_argument("--json", default=None, help="Write the report to this path")
    parser.set_defaults(handler=verify)


def verify(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """Run the named suites and report every check's residual and tolerance"""
    names = []
    for name in args.suite:
        names.extend(VerificationService.suites() if name == "all" else [name])
    try:
        results = VerificationService.run(dict.fromkeys(names))
    except Exception as e:
        logger.error(f"Verification failed to run: {str(e)}")
        return {"error": str(e), "type": type(e).__name__}, exit_code_for(e)

    report = VerificationService.report(results)
    if args.json:
        OutputRepository.write_json(report, args.json)
    return report, EXIT_OK if report["pass"] else EXIT_CHECK_FAILED
