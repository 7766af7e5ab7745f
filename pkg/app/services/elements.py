import logging

import numpy as np

from app.models.scenario import OrbitElements
from app.models.state import CartesianState
from app.utils.errors import AsymptoteReached, OriginSingularity, RectilinearOrbit
from config.settings import Config

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi


class ElementsService:
    """Classical orbit elements to and from inertial position and velocity"""

    @staticmethod
    def elements_to_cartesian(el: OrbitElements, k1: float = 1.0) -> CartesianState:
        """
        Conic state through the perifocal frame. Below the degeneracy
        thresholds the node folds into the argument of periapsis (i ~ 0) and
        the argument of periapsis into the true anomaly (e ~ 0).
        """
        if k1 <= 0:
            raise ValueError("k1 must be positive")
        denom = 1.0 + el.e * np.cos(el.true_anomaly)
        if denom <= Config.ASYMPTOTE_GUARD:
            raise AsymptoteReached(f"1 + e cos f = {denom:.3e}; radius is unbounded")
        slr = el.semilatus_rectum()
        if slr <= 0:
            raise RectilinearOrbit("Semilatus rectum is zero")

        raan, arg, anomaly = ElementsService._fold(el.i, el.e, el.raan, el.omega_arg, el.true_anomaly)
        r_mag = slr / (1.0 + el.e * np.cos(anomaly))
        theta = arg + anomaly
        ci, si = np.cos(el.i), np.sin(el.i)
        cO, sO = np.cos(raan), np.sin(raan)
        ct, st = np.cos(theta), np.sin(theta)
        r = r_mag * np.array(
            [ct * cO - ci * st * sO, ct * sO + ci * st * cO, st * si]
        )
        h = np.sqrt(k1 * slr)
        ew_s, ew_c = el.e * np.sin(arg), el.e * np.cos(arg)
        v = (k1 / h) * np.array(
            [
                -(cO * (ew_s + st) + ci * (ew_c + ct) * sO),
                -(sO * (ew_s + st) - ci * (ew_c + ct) * cO),
                (ew_c + ct) * si,
            ]
        )
        return CartesianState(r, v)

    @staticmethod
    def cartesian_to_elements(c: CartesianState, k1: float = 1.0) -> OrbitElements:
        """Inverse conversion with the same degeneracy folding"""
        r_mag = np.linalg.norm(c.r)
        if r_mag == 0:
            raise OriginSingularity("Position vector is zero")
        h_vec = np.cross(c.r, c.v)
        h = np.linalg.norm(h_vec)
        if h == 0:
            raise RectilinearOrbit("Elements undefined for rectilinear motion")
        slr = h * h / k1
        e_vec = np.cross(c.v, h_vec) / k1 - c.r / r_mag
        e = float(np.linalg.norm(e_vec))
        alpha = 2.0 / r_mag - np.dot(c.v, c.v) / k1
        if abs(e - 1.0) < Config.PARABOLIC_TOL:
            a = slr / 2.0
        else:
            a = 1.0 / alpha
        inc = float(np.arccos(np.clip(h_vec[2] / h, -1.0, 1.0)))
        node = np.cross([0.0, 0.0, 1.0], h_vec)
        n_mag = np.linalg.norm(node)

        circular = e < Config.CIRCULAR_TOL
        equatorial = inc < Config.DEGENERATE_INCLINATION
        radial_out = np.dot(c.r, c.v) >= 0

        if equatorial:
            raan = 0.0
        else:
            raan = ElementsService._angle(node[0] / n_mag, node[1] >= 0)

        if circular:
            arg = 0.0
            if equatorial:
                anomaly = ElementsService._angle(c.r[0] / r_mag, c.r[1] >= 0)
            else:
                anomaly = ElementsService._angle(
                    np.dot(node, c.r) / (n_mag * r_mag), c.r[2] >= 0
                )
        else:
            if equatorial:
                arg = ElementsService._angle(e_vec[0] / e, e_vec[1] >= 0)
            else:
                arg = ElementsService._angle(np.dot(node, e_vec) / (n_mag * e), e_vec[2] >= 0)
            anomaly = ElementsService._angle(np.dot(e_vec, c.r) / (e * r_mag), radial_out)

        # hyperbolic anomalies are reported in (-pi, pi]
        if e > 1.0 and anomaly > np.pi:
            anomaly -= TWO_PI
        return OrbitElements(
            a=float(a), e=e, i=inc, omega_arg=arg, raan=raan, true_anomaly=anomaly
        )

    @staticmethod
    def orbital_period(a: float, k1: float = 1.0) -> float:
        if a <= 0:
            raise ValueError("Orbital period needs a bound orbit")
        return TWO_PI * np.sqrt(a**3 / k1)

    @staticmethod
    def _fold(inc, ecc, raan, arg, anomaly):
        if inc < Config.DEGENERATE_INCLINATION:
            arg, raan = arg + raan, 0.0
        if ecc < Config.CIRCULAR_TOL:
            anomaly, arg = anomaly + arg, 0.0
        return raan, arg, anomaly

    @staticmethod
    def _angle(cosine: float, upper: bool) -> float:
        angle = float(np.arccos(np.clip(cosine, -1.0, 1.0)))
        return angle if upper else TWO_PI - angle
