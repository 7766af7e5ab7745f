import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def to_jsonable(value: Any) -> Any:
    """numpy scalars and arrays to JSON-native values"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.generic):
        return value.item()
    return value


class OutputRepository:
    """Trajectory CSV files and JSON reports"""

    @staticmethod
    def write_frame(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
        """Comma separated, header row, '\\n' endings, 17 significant digits"""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        logger.info(f"Wrote {len(frame)} rows to {path}")
        return path

    @staticmethod
    def read_frame(path: Union[str, Path]) -> pd.DataFrame:
        return pd.read_csv(path, float_precision="round_trip")

    @staticmethod
    def write_json(data: Dict[str, Any], path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            json.dump(to_jsonable(data), f, indent=2)
            f.write("\n")
        logger.info(f"Wrote report to {path}")
        return path

    @staticmethod
    def read_json(path: Union[str, Path]) -> Dict[str, Any]:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
