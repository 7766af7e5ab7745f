import argparse
import logging
from typing import Any, Dict, Tuple

from app.models.scenario import OrbitElements
from app.models.state import CartesianState
from app.services.elements import ElementsService
from app.utils.errors import EXIT_OK, EXIT_USAGE, exit_code_for

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("elements", help="Convert between orbit elements and Cartesian state")
    direction = parser.add_mutually_exclusive_group(required=True)
    direction.add_argument("--to-cartesian", dest="direction", action="store_const", const="to_cartesian")
    direction.add_argument("--to-elements", dest="direction", action="store_const", const="to_elements")
    parser.add_argument("--a", type=float, help="Semi-major axis (negative for hyperbolae)")
    parser.add_argument("--e", type=float, help="Eccentricity")
    parser.add_argument("--i", type=float, default=0.0, help="Inclination [deg]")
    parser.add_argument("--omega", type=float, default=0.0, help="Argument of periapsis [deg]")
    parser.add_argument("--raan", type=float, default=0.0, help="Right ascension of the node [deg]")
    parser.add_argument("--f", type=float, default=0.0, help="True anomaly [deg]")
    parser.add_argument("--r", type=float, nargs=3, help="Position vector")
    parser.add_argument("--v", type=float, nargs=3, help="Velocity vector")
    parser.add_argument("--mu", type=float, default=1.0, help="Gravitational parameter k1")
    parser.set_defaults(handler=elements)


def elements(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    if args.direction == "to_cartesian" and (args.a is None or args.e is None):
        return {"error": "--to-cartesian needs --a and --e"}, EXIT_USAGE
    if args.direction == "to_elements" and (args.r is None or args.v is None):
        return {"error": "--to-elements needs --r and --v"}, EXIT_USAGE

    try:
        if args.direction == "to_cartesian":
            el = OrbitElements.from_degrees(
                {"a": args.a, "e": args.e, "i": args.i, "omega": args.omega, "raan": args.raan, "f": args.f}
            )
            return ElementsService.elements_to_cartesian(el, args.mu).to_dict(), EXIT_OK
        cart = CartesianState(args.r, args.v)
        return ElementsService.cartesian_to_elements(cart, args.mu).to_degrees(), EXIT_OK
    except ValueError as e:
        return {"error": str(e)}, EXIT_USAGE
    except Exception as e:
        logger.error(f"Element conversion failed: {str(e)}")
        return {"error": str(e), "type": type(e).__name__}, exit_code_for(e)
