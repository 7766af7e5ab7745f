import logging
from typing import Optional

import numpy as np

from app.models.potential import GeneralizedForce, J2Model, PotentialModel
from app.models.state import ProjectiveState
from app.utils.errors import DegenerateState, OriginSingularity

logger = logging.getLogger(__name__)

E3 = np.array([0.0, 0.0, 1.0])


class PerturbationService:
    """J2 oblateness and the plumbing from Cartesian models to PotentialModel"""

    @staticmethod
    def j2_potential_cartesian(r: np.ndarray, model: J2Model) -> float:
        r = np.asarray(r, dtype=float)
        r_mag = np.linalg.norm(r)
        if r_mag == 0:
            raise OriginSingularity("J2 potential undefined at the origin")
        z = r[2] / r_mag
        return model.j2 / (3.0 * r_mag**3) * (3.0 * z * z - 1.0)

    @staticmethod
    def j2_force_cartesian(r: np.ndarray, model: J2Model) -> np.ndarray:
        """F = -dV/dr"""
        r = np.asarray(r, dtype=float)
        r_mag = np.linalg.norm(r)
        if r_mag == 0:
            raise OriginSingularity("J2 force undefined at the origin")
        r_hat = r / r_mag
        z = r_hat[2]
        return model.j2 / r_mag**4 * ((5.0 * z * z - 1.0) * r_hat - 2.0 * z * E3)

    @staticmethod
    def j2_generalized(x: ProjectiveState, model: J2Model) -> GeneralizedForce:
        """
        (f, f_u) obtained by differentiating the unsimplified projective
        J2 term, n = m = -1
        """
        q_norm = PerturbationService._check(x)
        q_hat = x.q / q_norm
        z = q_hat[2]
        f = 2.0 / q_norm * model.j2 * x.u**3 * (z * z * q_hat - z * E3)
        fu = -model.j2 * x.u**2 * (3.0 * z * z - 1.0)
        return GeneralizedForce(f=f, fu=float(fu))

    @staticmethod
    def j2_hamiltonian_term(x: ProjectiveState, model: J2Model) -> float:
        q_norm = PerturbationService._check(x)
        z = x.q[2] / q_norm
        return model.j2 * x.u**3 * (3.0 * z * z - 1.0) / 3.0

    @staticmethod
    def j2_potential_model(model: J2Model, k2: float = 0.0) -> PotentialModel:
        def perturbation(r, t):
            return (
                PerturbationService.j2_potential_cartesian(r, model),
                -PerturbationService.j2_force_cartesian(r, model),
            )

        return PotentialModel(k1=model.k1, k2=k2, perturbation=perturbation, label="j2")

    @staticmethod
    def build_model(
        kind: str,
        k1: float = 1.0,
        k2: float = 0.0,
        j2_model: Optional[J2Model] = None,
    ) -> PotentialModel:
        """Potential model from a scenario's model kind"""
        if kind == "kepler":
            return PotentialModel(k1=k1, label="kepler")
        if kind == "manev":
            return PotentialModel(k1=k1, k2=k2, label="manev")
        if kind == "j2":
            if j2_model is None:
                raise ValueError("j2 model kind needs J2 constants")
            return PerturbationService.j2_potential_model(j2_model, k2)
        raise ValueError(f"Unknown model kind {kind}")

    @staticmethod
    def _check(x: ProjectiveState) -> float:
        q_norm = np.linalg.norm(x.q)
        if x.u <= 0 or q_norm == 0:
            raise DegenerateState(f"J2 term undefined for u={x.u}, |q|={q_norm}")
        return q_norm
