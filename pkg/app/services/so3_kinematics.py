import numpy as np
from typing import Tuple

from app.utils.errors import NonAntisymmetric, ZeroAxis
from config.settings import Config


class So3Service:
    """3-vector and 3x3 algebra in the Hodge-dual sign convention"""

    @staticmethod
    def hodge_dual(u: np.ndarray) -> np.ndarray:
        """
        u* with (u*)_ij = eps_ijk u_k, so that u* . w = w x u
        """
        u = np.asarray(u, dtype=float)
        return np.array(
            [
                [0.0, u[2], -u[1]],
                [-u[2], 0.0, u[0]],
                [u[1], -u[0], 0.0],
            ]
        )

    @staticmethod
    def hodge_inverse(a: np.ndarray) -> np.ndarray:
        """Recover u from an antisymmetric u*"""
        a = np.asarray(a, dtype=float)
        scale = max(1.0, np.abs(a).max())
        if np.abs(a + a.T).max() > Config.ANTISYMMETRY_TOL * scale:
            raise NonAntisymmetric(
                f"Matrix is not antisymmetric (|A + A^T| = {np.abs(a + a.T).max():.3e})"
            )
        return 0.5 * np.array(
            [a[1, 2] - a[2, 1], a[2, 0] - a[0, 2], a[0, 1] - a[1, 0]]
        )

    @staticmethod
    def rodrigues_rotation(axis_moment: np.ndarray, angle: float) -> np.ndarray:
        """
        R = exp(-l^* angle) for the unit axis l^ along axis_moment
        """
        axis_moment = np.asarray(axis_moment, dtype=float)
        rho = np.linalg.norm(axis_moment)
        if rho < Config.ZERO_AXIS:
            raise ZeroAxis("Rotation axis has zero length")
        axis = axis_moment / rho
        c, s = np.cos(angle), np.sin(angle)
        return (
            c * np.eye(3)
            - s * So3Service.hodge_dual(axis)
            + (1.0 - c) * np.outer(axis, axis)
        )

    @staticmethod
    def angular_momentum(x: np.ndarray, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
        """
        Returns (x cross y, x wedge y, magnitude)
        """
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        vec = np.cross(x, y)
        mat = np.outer(x, y) - np.outer(y, x)
        return vec, mat, float(np.linalg.norm(vec))

    @staticmethod
    def unit(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return x / np.linalg.norm(x)
