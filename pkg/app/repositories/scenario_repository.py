import logging
from pathlib import Path
from typing import Union

import yaml

from app.models.scenario import Scenario
from app.utils.errors import ConfigError

logger = logging.getLogger(__name__)

SECTIONS = ("scenario", "model", "integrator", "output")


class ScenarioRepository:
    """Scenario documents on disk (YAML with scenario/model/integrator/output sections)"""

    @staticmethod
    def load(path: Union[str, Path]) -> Scenario:
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f)
        except FileNotFoundError as e:
            raise ConfigError(f"Scenario file not found: {path}") from e
        except yaml.YAMLError as e:
            logger.error(f"Could not parse {path}: {str(e)}")
            raise ConfigError(f"Could not parse {path}: {str(e)}") from e

        if not isinstance(data, dict):
            raise ConfigError(f"{path} must hold a mapping of sections")
        unknown = [key for key in data if key not in SECTIONS]
        if unknown:
            raise ConfigError(f"Unknown sections in {path}: {', '.join(unknown)}")
        scenario = Scenario.from_dict(data)
        logger.debug(f"Loaded scenario {scenario.name} from {path}")
        return scenario

    @staticmethod
    def save(scenario: Scenario, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(scenario.to_dict(), f, sort_keys=False, default_flow_style=False)
        logger.info(f"Wrote scenario {scenario.name} to {path}")
        return path
