import argparse
import logging
from pathlib import Path
from typing import Any, Dict, Tuple

from app.models.flow import KeplerFlowInput
from app.models.scenario import Scenario
from app.models.stm import Stm8
from app.repositories.output_repository import OutputRepository
from app.repositories.scenario_repository import ScenarioRepository
from app.services.closed_form import ClosedFormService
from app.services.dynamics import DynamicsService
from app.services.projective_transform import ProjectiveTransformService
from app.services.scenario_service import ScenarioService
from app.services.stm import StmService
from app.utils.errors import EXIT_OK, ConfigError, exit_code_for

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("stm", help="State transition matrix of (q, p, u, w) over tau")
    parser.add_argument("--config", required=True, help="Scenario YAML document")
    parser.add_argument("--tau", type=float, required=True, help="True-anomaly span")
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument("--closed-form", dest="mode", action="store_const", const="closed_form")
    mode.add_argument("--variational", dest="mode", action="store_const", const="variational")
    parser.add_argument("--out", default=None, help="Write the STM report JSON to this path")
    parser.set_defaults(handler=stm, mode="closed_form")


def stm(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    try:
        scenario = ScenarioService.normalize(ScenarioRepository.load(args.config))
        matrix, final = compute_stm(scenario, args.tau, args.mode)
        payload = {
            "scenario": scenario.name,
            "mode": args.mode,
            **matrix.to_dict(),
            "final_state": final.tolist(),
        }
        if args.out:
            payload["file"] = str(OutputRepository.write_json(payload, Path(args.out)))
        return payload, EXIT_OK
    except Exception as e:
        logger.error(f"STM for {args.config} failed: {str(e)}")
        return {"error": str(e), "type": type(e).__name__}, exit_code_for(e)


def compute_stm(scenario: Scenario, tau: float, mode: str) -> Tuple[Stm8, Any]:
    """Closed-form Phi (Kepler only) or the variational STM of the scenario's model"""
    if not scenario.transform.is_default:
        raise ConfigError("The (q, p, u, w) STM uses n = m = -1")
    cart = ScenarioService.initial_cartesian(scenario)
    x0 = ProjectiveTransformService.inverse(cart).to_quasi()
    k1 = scenario.gravitational_parameter

    if mode == "closed_form":
        if scenario.model != "kepler":
            raise ConfigError(f"Closed-form STM needs the kepler model, not {scenario.model}")
        final = ClosedFormService.kepler_flow(KeplerFlowInput(x0, k1), tau).to_array()
        return StmService.phi_full(x0, k1, tau), final

    model = ScenarioService.build_model(scenario)
    field = DynamicsService.quasi_field(model, "tau")
    jacobian = StmService.kepler_quasi_jacobian(k1, "tau") if scenario.model == "kepler" else None
    y0 = list(x0.to_array()) + [0.0]
    return StmService.stm_variational(
        field, y0, (0.0, tau), jacobian, "modified", "tau", scenario.integrator
    )
