from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from config.settings import Config


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = Config.REL_TOL
    abs_tol: float = Config.ABS_TOL
    initial_step: Optional[float] = None
    max_step: float = np.inf
    max_steps: int = Config.MAX_STEPS

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("Integrator tolerances must be positive")
        if self.max_step <= 0:
            raise ValueError("max_step must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be at least 1")

    def to_dict(self) -> Dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "initial_step": self.initial_step,
            "max_step": None if np.isinf(self.max_step) else self.max_step,
            "max_steps": self.max_steps,
        }


@dataclass
class Trajectory:
    """Accepted steps of one integration, parameter samples strictly monotone"""

    params: np.ndarray
    states: np.ndarray
    derivatives: np.ndarray
    parameter: str = "t"
    rejected: int = 0
    constraints: List = field(default_factory=list)

    @property
    def start(self) -> float:
        return float(self.params[0])

    @property
    def end(self) -> float:
        return float(self.params[-1])

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    def __len__(self) -> int:
        return len(self.params)

    def interpolate(self, value: float) -> np.ndarray:
        """Cubic Hermite state at an arbitrary parameter inside the span"""
        params = self.params
        direction = np.sign(params[-1] - params[0]) or 1.0
        lo, hi = sorted((params[0], params[-1]))
        if not lo <= value <= hi:
            raise ValueError(f"{value} outside trajectory span [{lo}, {hi}]")
        idx = int(np.searchsorted(direction * params, direction * value, side="right")) - 1
        idx = min(max(idx, 0), len(params) - 2)
        h = params[idx + 1] - params[idx]
        theta = (value - params[idx]) / h
        y0, y1 = self.states[idx], self.states[idx + 1]
        f0, f1 = self.derivatives[idx], self.derivatives[idx + 1]
        h00 = 2 * theta**3 - 3 * theta**2 + 1
        h10 = theta**3 - 2 * theta**2 + theta
        h01 = -2 * theta**3 + 3 * theta**2
        h11 = theta**3 - theta**2
        return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


@dataclass
class DriftReport:
    max_q_drift: Optional[float] = None
    max_lambda_drift: Optional[float] = None
    samples: int = 0
    extras: Dict = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return self.samples == 0

    def to_dict(self) -> Dict:
        return {
            "max_q_drift": self.max_q_drift,
            "max_lambda_drift": self.max_lambda_drift,
            "samples": self.samples,
            **self.extras,
        }
