import argparse
import logging
from pathlib import Path
from typing import Any, Dict, Tuple

from app.repositories.output_repository import OutputRepository
from app.repositories.scenario_repository import ScenarioRepository
from app.services.scenario_service import PropagationResult, ScenarioService
from app.utils.errors import EXIT_OK, exit_code_for
from config.settings import Config

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("propagate", help="Propagate a scenario and write trajectory files")
    parser.add_argument("--config", required=True, help="Scenario YAML document")
    parser.add_argument("--out", default=None, help="Output directory (overrides the scenario)")
    parser.set_defaults(handler=propagate)


def propagate(args: argparse.Namespace) -> Tuple[Dict[str, Any], int]:
    """
    Load a scenario, propagate it and write the trajectory CSV, the drift
    JSON and (when requested) the recovered Cartesian CSV
    """
    try:
        scenario = ScenarioRepository.load(args.config)
        result = ScenarioService.run(scenario)
        out_dir = Path(args.out or scenario.output.get("directory") or Config.REGPROP_OUTPUT_DIR)
        files = write_outputs(result, out_dir)
        payload = ScenarioService.summary(result)
        payload["files"] = files
        return payload, EXIT_OK
    except Exception as e:
        logger.error(f"Propagation of {args.config} failed: {str(e)}")
        return {"error": str(e), "type": type(e).__name__}, exit_code_for(e)


def write_outputs(result: PropagationResult, out_dir: Path) -> Dict[str, str]:
    name = result.scenario.name
    output = result.scenario.output
    files = {
        "trajectory": OutputRepository.write_frame(
            result.frame, out_dir / output.get("trajectory", f"{name}_trajectory.csv")
        ),
        "drift": OutputRepository.write_json(
            result.drift.to_dict(), out_dir / output.get("drift", f"{name}_drift.json")
        ),
    }
    if result.cartesian is not None:
        files["cartesian"] = OutputRepository.write_frame(
            result.cartesian, out_dir / f"{name}_cartesian.csv"
        )
    return {key: str(path) for key, path in files.items()}
