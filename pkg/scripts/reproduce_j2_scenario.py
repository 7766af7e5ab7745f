import sys
from pathlib import Path

PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

import logging
from datetime import datetime

from tqdm import tqdm

from app.controllers.propagate_controller import write_outputs
from app.repositories.output_repository import OutputRepository
from app.repositories.scenario_repository import ScenarioRepository
from app.services.scenario_service import ScenarioService
from app.services.verification import VerificationService
from config.settings import Config

logging.basicConfig(level=Config.LOG_LEVEL)
logger = logging.getLogger(__name__)

RUNS = [
    ("cartesian", "t"),
    ("projective", "t"),
    ("extended", "s"),
    ("extended", "tau"),
    ("projective_quasi", "tau"),
]


class J2Reproduction:
    @staticmethod
    def run(out_dir: Path, periods: float) -> dict:
        """
        Propagate the Earth J2 test orbit in every coordinate set, write the
        trajectories and drift reports, and compare positions along every run
        """
        stats = {"start_time": datetime.now(), "runs": {}, "errors": 0}
        frames, reference = {}, None
        for coordinates, parameter in tqdm(RUNS, desc="J2 runs", disable=not Config.SHOW_PROGRESS):
            scenario = ScenarioService.reference_j2_scenario(periods, coordinates, parameter)
            label = f"{coordinates}_{parameter}"
            try:
                ScenarioRepository.save(scenario, out_dir / f"{label}.yaml")
                result = ScenarioService.run(scenario)
                result.scenario.output["trajectory"] = f"{label}_trajectory.csv"
                result.scenario.output["drift"] = f"{label}_drift.json"
                files = write_outputs(result, out_dir)
                frames[label] = result.cartesian
                if label == "cartesian_t":
                    reference = result.trajectory
                stats["runs"][label] = {"files": files, "drift": result.drift.to_dict()}
            except Exception as e:
                logger.error(f"Run {label} failed: {str(e)}")
                stats["errors"] += 1

        if reference is not None:
            stats["position_error"] = {
                label: VerificationService.position_error(frame, reference) for label, frame in frames.items()
            }

        logger.info("Running the symplecticity checks")
        checks = VerificationService.symplectic_suite(periods)
        OutputRepository.write_json(
            VerificationService.report({"symplectic": checks}), out_dir / "symplectic.json"
        )
        stats["end_time"] = datetime.now()
        stats["duration"] = stats["end_time"] - stats["start_time"]
        return stats


if __name__ == "__main__":
    import argparse

    parser = argparse.ArgumentParser(description="Reproduce the Earth J2 verification runs")
    parser.add_argument("--out", default=str(Path(Config.REGPROP_OUTPUT_DIR) / "j2"), help="Output directory")
    parser.add_argument(
        "--periods", type=float, default=Config.VERIFY_PERIODS, help="Orbital periods (default: 20)"
    )
    args = parser.parse_args()

    out_dir = Path(args.out)
    logger.info(f"Reproducing J2 scenario over {args.periods} periods into {out_dir}")
    result = J2Reproduction.run(out_dir, args.periods)

    logger.info("Summary:")
    for label, run in result["runs"].items():
        drift = run["drift"]
        logger.info(f"{label}: max |q|-1 {drift['max_q_drift']}, max lambda {drift['max_lambda_drift']}")
    for label, error in result.get("position_error", {}).items():
        logger.info(f"{label}: final position error vs Cartesian {error:.3e}")
    logger.info(f"Errors: {result['errors']}")
    logger.info(f"Duration: {result['duration']}")
