import logging
from typing import Optional, Tuple

import numpy as np
from scipy import integrate, optimize

from app.models.flow import KeplerFlowInput, ManevFlowInput
from app.models.state import CartesianState, ProjectiveState, QuasiState
from app.services.projective_transform import ProjectiveTransformService
from app.services.so3_kinematics import So3Service
from app.utils.errors import (
    AsymptoteReached,
    BranchMismatch,
    DegenerateState,
    ImaginaryFrequency,
    RectilinearOrbit,
)
from config.settings import Config

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


class ClosedFormService:
    """Unperturbed Kepler and Manev flows, Cartesian recovery and time of flight"""

    @staticmethod
    def kepler_flow(inp: KeplerFlowInput, tau: float, rotation: str = "rodrigues") -> QuasiState:
        """
        Flow of (q, p, u, w) over true anomaly tau.

        simplified=True uses l = |p| and the q=1, lambda=0 forms;
        rotation selects exp(-l^* tau) (rodrigues) or exp(A tau / l) (amatrix)
        for the (q, p) part of the full flow.
        """
        x0 = inp.x0
        l_vec, _, l_mag = ClosedFormService._angular_momentum(x0)
        if inp.simplified:
            p_mag = np.linalg.norm(x0.p)
            c, s = np.cos(tau), np.sin(tau)
            q = c * x0.q + s / p_mag * x0.p
            p = c * x0.p - p_mag * s * x0.q
            u, w = ClosedFormService._radial(x0.u, x0.w, inp.k1, p_mag, p_mag, tau)
            return QuasiState(q, p, u, w)
        q, p = ClosedFormService._rotate(x0, l_vec, l_mag, tau, rotation)
        u, w = ClosedFormService._radial(x0.u, x0.w, inp.k1, l_mag, l_mag, tau)
        return QuasiState(q, p, u, w)

    @staticmethod
    def manev_flow(inp: ManevFlowInput, tau: float, rotation: str = "rodrigues") -> QuasiState:
        """
        Kepler rotation of (q, p); (u, w) oscillate at varpi = omega / l
        with omega^2 = l^2 - k2
        """
        x0 = inp.x0
        l_vec, _, l_mag = ClosedFormService._angular_momentum(x0)
        if inp.k2 == 0:
            omega = l_mag
        else:
            omega2 = l_mag**2 - inp.k2
            if omega2 <= 0:
                raise ImaginaryFrequency(f"l^2 - k2 = {omega2:.3e} is not positive")
            omega = np.sqrt(omega2)
        q, p = ClosedFormService._rotate(x0, l_vec, l_mag, tau, rotation)
        u, w = ClosedFormService._radial(x0.u, x0.w, inp.k1, l_mag, omega, tau)
        return QuasiState(q, p, u, w)

    @staticmethod
    def apsidal_advance(inp: ManevFlowInput, revolutions: int = 1) -> float:
        """
        Angle the periapsis advances per radial period, found by root
        finding on w_tau of the closed-form Manev flow
        """
        _, _, l_mag = ClosedFormService._angular_momentum(inp.x0)
        omega2 = l_mag**2 - inp.k2
        if omega2 <= 0:
            raise ImaginaryFrequency(f"l^2 - k2 = {omega2:.3e} is not positive")
        varpi = np.sqrt(omega2) / l_mag

        def w_of(tau):
            return ClosedFormService.manev_flow(inp, tau).w

        horizon = (revolutions + 1.5) * TWO_PI / varpi
        grid = np.linspace(0.0, horizon, int(64 * (revolutions + 2)))
        values = np.array([w_of(tau) for tau in grid])
        periapses = []
        for a, b, wa, wb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
            # periapsis: u at a maximum, w changes sign from + to -
            if wa > 0 >= wb:
                periapses.append(optimize.brentq(w_of, a, b, xtol=Config.ROOT_XTOL))
        if len(periapses) < revolutions + 1:
            raise DegenerateState("No periapsis passages found; orbit may be circular")
        span = periapses[revolutions] - periapses[0]
        return span / revolutions - TWO_PI

    @staticmethod
    def pu_from_w(u: float, w: float) -> float:
        if u <= 0:
            raise DegenerateState(f"p_u = w/u^2 needs u > 0, got {u}")
        return w / (u * u)

    @staticmethod
    def recover_cartesian(flow_state: QuasiState, mode: str = "simplified") -> CartesianState:
        """
        simplified: r = q/u, v = u p - w q (valid on q=1, lambda=0);
        full: the projective transformation itself
        """
        if flow_state.u <= 0:
            raise DegenerateState(f"Cartesian recovery needs u > 0, got {flow_state.u}")
        if mode == "simplified":
            return CartesianState(
                flow_state.q / flow_state.u,
                flow_state.u * flow_state.p - flow_state.w * flow_state.q,
            )
        if mode == "full":
            return ProjectiveTransformService.forward(flow_state.to_projective())
        raise ValueError(f"Unknown recovery mode {mode}")

    @staticmethod
    def time_of_flight(
        ecc: float, k1: float, l: float, tau: float, branch: Optional[str] = None
    ) -> float:
        """
        Time since periapsis at true anomaly tau for a conic of eccentricity ecc
        """
        kind = ProjectiveTransformService.classify_eccentricity(ecc)
        if branch is not None and branch != kind:
            raise BranchMismatch(f"e={ecc} is {kind}, not {branch}")
        scale = l**3 / k1**2
        if kind == "circular":
            return scale * tau
        if kind == "parabolic":
            if abs(tau) >= np.pi:
                raise AsymptoteReached(f"Parabolic true anomaly {tau} beyond asymptote")
            half = np.tan(0.5 * tau)
            return scale * 0.5 * (half + half**3 / 3.0)
        if kind == "hyperbolic":
            limit = np.arccos(-1.0 / ecc)
            if abs(tau) >= limit or 1.0 + ecc * np.cos(tau) <= Config.ASYMPTOTE_GUARD:
                raise AsymptoteReached(
                    f"Hyperbolic true anomaly {tau} beyond asymptote {limit}"
                )
            series = ClosedFormService._near_parabolic(ecc, tau)
            if series is not None:
                return scale * series
            e2 = ecc * ecc - 1.0
            half = np.sqrt((ecc - 1.0) / (ecc + 1.0)) * np.tan(0.5 * tau)
            return scale * (
                -2.0 / e2**1.5 * np.arctanh(half)
                + ecc * np.sin(tau) / (e2 * (1.0 + ecc * np.cos(tau)))
            )

        revolutions = np.round(tau / TWO_PI)
        wrapped = tau - TWO_PI * revolutions
        e2 = 1.0 - ecc * ecc
        period = TWO_PI / e2**1.5
        series = ClosedFormService._near_parabolic(ecc, wrapped)
        if series is not None:
            principal = series
        else:
            half = np.sqrt((1.0 - ecc) / (1.0 + ecc)) * np.tan(0.5 * wrapped)
            principal = 2.0 / e2**1.5 * np.arctan(half) - ecc * np.sin(wrapped) / (
                e2 * (1.0 + ecc * np.cos(wrapped))
            )
        return scale * (principal + revolutions * period)

    @staticmethod
    def time_of_flight_between(
        ecc: float, k1: float, l: float, tau0: float, tau1: float
    ) -> float:
        """
        t(tau1) - t(tau0) by adaptive quadrature of dt/dtau = 1/(l u^2)
        """
        for tau in (tau0, tau1):
            if ecc >= 1.0 and 1.0 + ecc * np.cos(tau) <= Config.ASYMPTOTE_GUARD:
                raise AsymptoteReached(f"True anomaly {tau} at or beyond the asymptote")

        def rate(tau):
            u = k1 / l**2 * (1.0 + ecc * np.cos(tau))
            return 1.0 / (l * u * u)

        value, abserr = integrate.quad(rate, tau0, tau1, epsabs=0.0, epsrel=1e-13, limit=500)
        logger.debug(f"Time-of-flight quadrature {value:.17g} (estimated error {abserr:.3e})")
        return value

    @staticmethod
    def sigma_inhomogeneous(l: float, k1: float, tau: float) -> Tuple[float, float]:
        if l <= 0:
            raise RectilinearOrbit("Inhomogeneous term needs l > 0")
        return k1 / l**2 * (1.0 - np.cos(tau)), k1 / l * np.sin(tau)

    @staticmethod
    def varsigma_inhomogeneous(l: float, k1: float, tau: float) -> Tuple[float, float]:
        """Inhomogeneous term of the inverse flow, equal to sigma at -tau"""
        return ClosedFormService.sigma_inhomogeneous(l, k1, -tau)

    @staticmethod
    def lambda_matrix(l: float, n: int = 1) -> np.ndarray:
        """Lambda_2n = [[0, I_n], [-l^2 I_n, 0]]"""
        eye = np.eye(n)
        zero = np.zeros((n, n))
        return np.block([[zero, eye], [-(l**2) * eye, zero]])

    @staticmethod
    def lambda_exponential(l: float, n: int, tau: float) -> np.ndarray:
        """exp(Lambda_2n tau / l) in closed form"""
        c, s = np.cos(tau), np.sin(tau)
        eye = np.eye(n)
        return np.block([[c * eye, s / l * eye], [-l * s * eye, c * eye]])

    @staticmethod
    def a_matrix(q: np.ndarray, p: np.ndarray) -> np.ndarray:
        """Alternative generator of the central-force (q, p) flow in s"""
        qp = float(np.dot(q, p))
        eye = np.eye(3)
        return np.block(
            [[-qp * eye, np.dot(q, q) * eye], [-np.dot(p, p) * eye, qp * eye]]
        )

    @staticmethod
    def a_exponential(q: np.ndarray, p: np.ndarray, tau: float) -> np.ndarray:
        _, _, l_mag = So3Service.angular_momentum(q, p)
        qp = float(np.dot(q, p))
        c, s = np.cos(tau), np.sin(tau)
        eye = np.eye(3)
        return np.block(
            [
                [(c - qp * s / l_mag) * eye, (np.dot(q, q) * s / l_mag) * eye],
                [-(np.dot(p, p) * s / l_mag) * eye, (c + qp * s / l_mag) * eye],
            ]
        )

    @staticmethod
    def generator_matrix(l_vec: np.ndarray) -> np.ndarray:
        """M = L (+) Lambda_2 for the modified ordering (q, p, u, w)"""
        l_mag = np.linalg.norm(l_vec)
        l_star = So3Service.hodge_dual(l_vec)
        m = np.zeros((8, 8))
        m[0:3, 0:3] = -l_star
        m[3:6, 3:6] = -l_star
        m[6:8, 6:8] = ClosedFormService.lambda_matrix(l_mag, 1)
        return m

    @staticmethod
    def forcing_vector(k1: float) -> np.ndarray:
        k = np.zeros(8)
        k[7] = k1
        return k

    # helpers

    @staticmethod
    def _angular_momentum(x0: QuasiState):
        l_vec, l_star, l_mag = So3Service.angular_momentum(x0.q, x0.p)
        if l_mag == 0:
            raise RectilinearOrbit("Closed-form flow undefined for zero angular momentum")
        return l_vec, l_star, l_mag

    @staticmethod
    def _rotate(x0: QuasiState, l_vec, l_mag, tau, rotation):
        if rotation == "rodrigues":
            rot = So3Service.rodrigues_rotation(l_vec, tau)
            return rot @ x0.q, rot @ x0.p
        if rotation == "amatrix":
            qp = ClosedFormService.a_exponential(x0.q, x0.p, tau) @ np.concatenate([x0.q, x0.p])
            return qp[0:3], qp[3:6]
        raise ValueError(f"Unknown rotation form {rotation}")

    @staticmethod
    def _radial(u0, w0, k1, l_mag, omega, tau):
        """(u, w) oscillator at frequency omega / l in tau about k1 / omega^2"""
        angle = omega / l_mag * tau
        c, s = np.cos(angle), np.sin(angle)
        offset = u0 - k1 / omega**2
        u = offset * c + w0 / omega * s + k1 / omega**2
        w = -omega * offset * s + w0 * c
        return u, w

    @staticmethod
    def _near_parabolic(ecc: float, tau: float) -> Optional[float]:
        """
        Series for the integral of (1 + e cos tau)^-2 about e = 1, used
        where the closed-form branches lose digits to cancellation
        """
        if abs(ecc - 1.0) >= Config.NEAR_PARABOLIC_BAND or abs(tau) >= np.pi:
            return None
        a, b = 1.0 + ecc, 1.0 - ecc
        half = np.tan(0.5 * tau)
        ratio = -b * half * half / a
        if abs(ratio) >= Config.NEAR_PARABOLIC_RATIO:
            return None
        total = 0.0
        for k in range(200):
            term = (k + 1) * ratio**k * (
                half / (2 * k + 1) + half**3 / (2 * k + 3)
            )
            total += term
            if abs(term) <= 1e-18 * abs(total):
                break
        return 2.0 / a**2 * total
