import logging
from typing import Tuple

import numpy as np

from app.models.state import (
    CartesianState,
    ConstraintReport,
    PerifocalFrame,
    ProjectiveState,
    TransformParams,
)
from app.services.so3_kinematics import So3Service
from app.utils.errors import (
    AsymptoteReached,
    DegenerateState,
    OriginSingularity,
    RectilinearOrbit,
)
from config.settings import Config

logger = logging.getLogger(__name__)

DEFAULT_PARAMS = TransformParams()


class ProjectiveTransformService:
    """The projective point transformation r = u^n q^m q, lifted to momenta"""

    @staticmethod
    def forward(
        state: ProjectiveState, params: TransformParams = DEFAULT_PARAMS
    ) -> CartesianState:
        """
        Full map to (r, v). Never simplified with q=1 or lambda=0.
        """
        q_norm = np.linalg.norm(state.q)
        if state.u <= 0 or q_norm == 0:
            raise DegenerateState(f"Cannot map state with u={state.u}, |q|={q_norm}")
        n, m = params.n, params.m
        q_hat = state.q / q_norm
        scale = state.u**n * q_norm**m
        r = scale * state.q
        tangential = state.p - np.dot(q_hat, state.p) * q_hat
        radial = state.u / (n * q_norm) * state.pu
        v = (tangential + radial * q_hat) / scale
        return CartesianState(r, v)

    @staticmethod
    def inverse(
        cart: CartesianState, params: TransformParams = DEFAULT_PARAMS
    ) -> ProjectiveState:
        """Restricted inverse with q = 1 and lambda = 0"""
        r_norm = np.linalg.norm(cart.r)
        if r_norm == 0:
            raise OriginSingularity("Position vector is zero")
        n, m = params.n, params.m
        r_hat = cart.r / r_norm
        u = r_norm ** (1.0 / n)
        p = r_norm * (cart.v + m * np.dot(r_hat, cart.v) * r_hat)
        pu = n * r_norm ** (-1.0 / n) * np.dot(cart.r, cart.v)
        return ProjectiveState(r_hat, u, p, pu)

    @staticmethod
    def lagrange_multiplier(
        state: ProjectiveState, params: TransformParams = DEFAULT_PARAMS
    ) -> float:
        q_norm = np.linalg.norm(state.q)
        if q_norm == 0:
            raise DegenerateState("Lagrange multiplier undefined at q = 0")
        coupling = (params.m + 1.0) / params.n * state.u * state.pu
        return float((np.dot(state.q, state.p) - coupling) / q_norm)

    @staticmethod
    def constraint_report(
        state: ProjectiveState, params: TransformParams = DEFAULT_PARAMS
    ) -> ConstraintReport:
        return ConstraintReport(
            q_norm=float(np.linalg.norm(state.q)),
            lam=ProjectiveTransformService.lagrange_multiplier(state, params),
        )

    @staticmethod
    def lvlh_basis(state: ProjectiveState) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Radial, transverse and normal unit vectors"""
        l_vec, _, l_mag = So3Service.angular_momentum(state.q, state.p)
        if l_mag == 0:
            raise RectilinearOrbit("LVLH basis undefined for q parallel to p")
        t_r = So3Service.unit(state.q)
        t_l = l_vec / l_mag
        t_tau = -So3Service.hodge_dual(t_l) @ t_r
        return t_r, t_tau, t_l

    @staticmethod
    def perifocal_frame(state: ProjectiveState, k1: float) -> PerifocalFrame:
        """
        Eccentricity (LRL) and Hamilton vectors from the unsimplified
        relations. Assumes the n = m = -1 transformation.
        Built from the unnormalized l* = (q x p)*, so l |h| = |e| and h is perpendicular to e.
        """
        if k1 <= 0:
            raise ValueError("k1 must be positive")
        l_vec, l_star, l_mag = So3Service.angular_momentum(state.q, state.p)
        if l_mag == 0:
            raise RectilinearOrbit("Perifocal frame undefined for zero angular momentum")
        q_hat = So3Service.unit(state.q)
        l2 = l_mag**2
        w = state.w
        offset = state.u - k1 / l2
        lq = l_star @ q_hat
        e_vec = (l2 * offset * q_hat - w * lq) / k1
        h_vec = (-offset * lq - w * q_hat) / k1
        return PerifocalFrame(
            e_vec=e_vec,
            h_vec=h_vec,
            l_hat=l_vec / l_mag,
            eccentricity=float(np.linalg.norm(e_vec)),
            semilatus_rectum=l2 / k1,
        )

    @staticmethod
    def conic_radius(p_slr: float, ecc: float, true_anomaly: float) -> float:
        denom = 1.0 + ecc * np.cos(true_anomaly)
        if denom <= 0:
            raise AsymptoteReached(
                f"1 + e cos f = {denom:.3e} for e={ecc}, f={true_anomaly}"
            )
        return p_slr / denom

    @staticmethod
    def classify_eccentricity(ecc: float) -> str:
        """Deterministic conic branch for a given eccentricity"""
        if ecc < 0:
            raise ValueError(f"Eccentricity must be non-negative, got {ecc}")
        if ecc < Config.CIRCULAR_TOL:
            return "circular"
        if abs(ecc - 1.0) < Config.PARABOLIC_TOL:
            return "parabolic"
        return "elliptic" if ecc < 1.0 else "hyperbolic"
