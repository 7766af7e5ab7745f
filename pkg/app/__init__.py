import argparse
import json
import logging
import sys
from typing import List, Optional

from app.repositories.output_repository import to_jsonable

logger = logging.getLogger(__name__)


class RegpropApp:
    """Command tree plus dispatch; each handler returns (payload, exit_code)"""

    def __init__(self, parser: argparse.ArgumentParser):
        self.parser = parser

    def run(self, argv: Optional[List[str]] = None) -> int:
        args = self.parser.parse_args(argv)
        payload, code = args.handler(args)
        print(json.dumps(to_jsonable(payload), indent=2))
        if code != 0:
            logger.info(f"{args.command} finished with exit code {code}")
        return code


def create_app() -> RegpropApp:
    """Application factory"""
    parser = argparse.ArgumentParser(
        prog="regprop",
        description="Regularized propagation in projective coordinates",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    from app.controllers import elements_controller, propagate_controller, stm_controller, verify_controller

    propagate_controller.register(subparsers)
    verify_controller.register(subparsers)
    stm_controller.register(subparsers)
    elements_controller.register(subparsers)

    return RegpropApp(parser)


def main() -> None:
    from config.settings import Config

    logging.basicConfig(level=Config.LOG_LEVEL)
    sys.exit(create_app().run())
