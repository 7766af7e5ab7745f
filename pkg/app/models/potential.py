from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

# r, t -> (V1, dV1/dr)
PerturbationFn = Callable[[np.ndarray, float], Tuple[float, np.ndarray]]
# r, t -> dV1/dt
TimeRateFn = Callable[[np.ndarray, float], float]
# r, v, t -> a_nc
NonconservativeFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]


@dataclass(frozen=True)
class PotentialModel:
    """Central V0 = -k1/r - k2/(2 r^2) plus optional perturbing terms"""

    k1: float = 1.0
    k2: float = 0.0
    perturbation: Optional[PerturbationFn] = None
    perturbation_rate: Optional[TimeRateFn] = None
    nonconservative: Optional[NonconservativeFn] = None
    label: str = "kepler"

    @property
    def is_central(self) -> bool:
        return self.perturbation is None and self.nonconservative is None

    def central_potential(self, r: float) -> float:
        return -self.k1 / r - 0.5 * self.k2 / (r * r)

    def central_force(self, r_vec: np.ndarray) -> np.ndarray:
        r = np.linalg.norm(r_vec)
        return -(self.k1 / r**2 + self.k2 / r**3) * (r_vec / r)

    def perturbing_potential(self, r_vec: np.ndarray, t: float) -> Tuple[float, np.ndarray]:
        if self.perturbation is None:
            return 0.0, np.zeros(3)
        value, grad = self.perturbation(r_vec, t)
        return float(value), np.asarray(grad, dtype=float)

    def time_rate(self, r_vec: np.ndarray, t: float) -> float:
        if self.perturbation_rate is None:
            return 0.0
        return float(self.perturbation_rate(r_vec, t))

    def nonconservative_acceleration(
        self, r_vec: np.ndarray, v_vec: np.ndarray, t: float
    ) -> np.ndarray:
        if self.nonconservative is None:
            return np.zeros(3)
        return np.asarray(self.nonconservative(r_vec, v_vec, t), dtype=float)

    def to_dict(self) -> Dict:
        return {"kind": self.label, "k1": self.k1, "k2": self.k2}


@dataclass(frozen=True, eq=False)
class GeneralizedForce:
    f: np.ndarray
    fu: float

    def to_dict(self) -> Dict:
        return {"f": np.asarray(self.f).tolist(), "fu": self.fu}


@dataclass(frozen=True)
class FrequencyPair:
    omega: float
    varpi: float

    @property
    def precession_per_radial_period(self) -> float:
        return 2.0 * np.pi * (1.0 / self.varpi - 1.0)


@dataclass(frozen=True)
class J2Model:
    """Oblateness term with the constants folded into j2 = 1.5 J2 k1 R^2"""

    j2: float
    k1: float
    radius: float

    @classmethod
    def from_constants(cls, j2_coefficient: float, k1: float, radius: float) -> "J2Model":
        if radius <= 0:
            raise ValueError("Equatorial radius must be positive")
        return cls(j2=1.5 * j2_coefficient * k1 * radius**2, k1=k1, radius=radius)

    def to_dict(self) -> Dict:
        return {"j2": self.j2, "k1": self.k1, "radius": self.radius}
