import logging
from typing import Callable, Optional, Tuple

import numpy as np

from app.models.state import QuasiState
from app.models.stm import ORDERINGS, Stm8, SymplecticForm
from app.models.trajectory import IntegratorConfig
from app.services.closed_form import ClosedFormService
from app.services.propagator import PropagatorService
from app.services.so3_kinematics import So3Service
from app.utils.errors import (
    ConstraintViolated,
    DegenerateState,
    DimensionMismatch,
    OrderingMismatch,
    RectilinearOrbit,
)
from config.settings import Config

logger = logging.getLogger(__name__)

Jacobian = Callable[[float, np.ndarray], np.ndarray]

Q, P, U, W = slice(0, 3), slice(3, 6), 6, 7


class StmService:
    """Closed-form Kepler STMs, variational propagation and symplectic checks"""

    @staticmethod
    def sigma_matrix(l_vec: np.ndarray, tau: float) -> Stm8:
        """Sigma_tau = exp(M tau / l): R (+) R (+) the 2x2 radial rotation"""
        l_vec = np.asarray(l_vec, dtype=float)
        l_mag = np.linalg.norm(l_vec)
        if l_mag == 0:
            raise RectilinearOrbit("Sigma undefined for zero angular momentum")
        rot = So3Service.rodrigues_rotation(l_vec, tau)
        entries = np.zeros((8, 8))
        entries[Q, Q] = rot
        entries[P, P] = rot
        entries[6:8, 6:8] = ClosedFormService.lambda_exponential(l_mag, 1, tau)
        return Stm8(entries, "modified", "tau")

    @staticmethod
    def phi_full(x0: QuasiState, k1: float, tau: float) -> Stm8:
        """
        Jacobian of the unsimplified Kepler flow in tau, d x_tau / d x0,
        ordering (q, p, u, w)
        """
        parts = StmService._partials(x0.q, x0.p)
        g, h, dg_dq, dg_dp, dh_dq, dh_dp, dl_dq, dl_dp, l_mag = parts
        c, s = np.cos(tau), np.sin(tau)
        entries = np.zeros((8, 8))
        entries[Q, Q] = c * np.eye(3) + s / l_mag * dg_dq - s / l_mag**2 * np.outer(g, dl_dq)
        entries[Q, P] = s / l_mag * dg_dp - s / l_mag**2 * np.outer(g, dl_dp)
        entries[P, Q] = s / l_mag * dh_dq - s / l_mag**2 * np.outer(h, dl_dq)
        entries[P, P] = c * np.eye(3) + s / l_mag * dh_dp - s / l_mag**2 * np.outer(h, dl_dp)

        du_dl = -x0.w * s / l_mag**2 - 2.0 * k1 * (1.0 - c) / l_mag**3
        dw_dl = -x0.u * s - k1 * s / l_mag**2
        entries[U, Q] = du_dl * dl_dq
        entries[U, P] = du_dl * dl_dp
        entries[W, Q] = dw_dl * dl_dq
        entries[W, P] = dw_dl * dl_dp
        entries[6:8, 6:8] = ClosedFormService.lambda_exponential(l_mag, 1, tau)
        return Stm8(entries, "modified", "tau")

    @staticmethod
    def phi_simplified(x0: QuasiState, k1: float, tau: float) -> Stm8:
        """Phi with |q| = 1 and q.p = 0 substituted, so l = |p|"""
        p_mag = StmService._check_constraints(x0)
        q = x0.q
        p_hat = x0.p / p_mag
        l_hat = np.cross(q, p_hat)
        c, s = np.cos(tau), np.sin(tau)
        rot = c * np.eye(3) - s * So3Service.hodge_dual(l_hat)
        axis = np.outer(l_hat, l_hat)

        entries = np.zeros((8, 8))
        entries[Q, Q] = rot
        entries[Q, P] = s / p_mag * axis
        entries[P, Q] = -p_mag * s * axis
        entries[P, P] = rot
        du = -(2.0 * k1 * (1.0 - c) / p_mag**2 + x0.w * s / p_mag)
        dw = -(x0.u + k1 / p_mag**2) * s
        entries[U, Q] = du * q
        entries[U, P] = du * p_hat / p_mag
        entries[W, Q] = dw * p_mag * q
        entries[W, P] = dw * p_hat
        entries[6:8, 6:8] = ClosedFormService.lambda_exponential(p_mag, 1, tau)
        return Stm8(entries, "modified", "tau")

    @staticmethod
    def theta_matrix(x0: QuasiState, k1: float, tau: float) -> Stm8:
        """
        Jacobian of the pre-simplified flow q_tau = cq + (s/p)p,
        p_tau = cp - p s q. Not the same matrix as Phi.
        """
        p_mag = StmService._check_constraints(x0)
        p_hat = x0.p / p_mag
        c, s = np.cos(tau), np.sin(tau)
        eye = np.eye(3)

        entries = np.zeros((8, 8))
        entries[Q, Q] = c * eye
        entries[Q, P] = s / p_mag * (eye - np.outer(p_hat, p_hat))
        entries[P, Q] = -p_mag * s * eye
        entries[P, P] = c * eye - s * np.outer(x0.q, p_hat)
        entries[U, P] = -(2.0 * k1 * (1.0 - c) / p_mag**2 + x0.w * s / p_mag) / p_mag * p_hat
        entries[W, P] = -(x0.u + k1 / p_mag**2) * s * p_hat
        entries[6:8, 6:8] = ClosedFormService.lambda_exponential(p_mag, 1, tau)
        return Stm8(entries, "modified", "tau")

    @staticmethod
    def psi_canonical(phi: Stm8, x0: QuasiState, x_tau: QuasiState) -> Stm8:
        """
        Convert a (q, p, u, w) STM to canonical (q, p, u, p_u) through
        w = u^2 p_u at both ends
        """
        if phi.ordering != "modified":
            raise OrderingMismatch(f"Expected a modified-ordering STM, got {phi.ordering}")
        to_canonical = StmService._radial_jacobian(x_tau, inverse=True)
        from_canonical = StmService._radial_jacobian(x0, inverse=False)
        return Stm8(to_canonical @ phi.entries @ from_canonical, "canonical", phi.parameter)

    @staticmethod
    def phi_from_psi(psi: Stm8, x0: QuasiState, x_tau: QuasiState) -> Stm8:
        """Inverse of psi_canonical"""
        if psi.ordering != "canonical":
            raise OrderingMismatch(f"Expected a canonical-ordering STM, got {psi.ordering}")
        to_modified = StmService._radial_jacobian(x_tau, inverse=False)
        from_modified = StmService._radial_jacobian(x0, inverse=True)
        return Stm8(to_modified @ psi.entries @ from_modified, "modified", psi.parameter)

    @staticmethod
    def stm_variational(
        rhs: Callable[[float, np.ndarray], np.ndarray],
        x0: np.ndarray,
        span: Tuple[float, float],
        jacobian: Optional[Jacobian] = None,
        ordering: str = "modified",
        parameter: str = "tau",
        config: Optional[IntegratorConfig] = None,
    ) -> Tuple[Stm8, np.ndarray]:
        """
        Integrate dPhi/de = (dX/dx) Phi, Phi(0) = I, alongside the state.

        The STM covers the leading components of x0 named by the ordering;
        trailing components (t carried by s and tau fields) ride along and
        must not feed back into them. Without a jacobian callback central
        finite differences of rhs are used. Returns the STM and final state.
        """
        x0 = np.asarray(x0, dtype=float)
        size = len(ORDERINGS[ordering])
        if x0.size < size:
            raise DimensionMismatch(f"{ordering} STM needs {size} state entries, got {x0.size}")
        dim = x0.size
        if jacobian is None:
            jacobian = StmService.field_jacobian(rhs)

        def augmented(eps: float, y: np.ndarray) -> np.ndarray:
            x = y[:dim]
            phi = y[dim:].reshape(size, size)
            jac = np.asarray(jacobian(eps, x))[:size, :size]
            return np.concatenate([rhs(eps, x), (jac @ phi).ravel()])

        y0 = np.concatenate([x0, np.eye(size).ravel()])
        traj = PropagatorService.integrate(augmented, y0, span, config, parameter)
        final = traj.final_state
        logger.debug(f"Variational {ordering}/{parameter} STM over {span}: {len(traj)} steps")
        return Stm8(final[dim:].reshape(size, size), ordering, parameter), final[:dim]

    @staticmethod
    def finite_difference_jacobian(
        func: Callable[[np.ndarray], np.ndarray], x: np.ndarray, step: float = Config.FD_STEP
    ) -> np.ndarray:
        """Central differences, h = step * max(1, |x_i|) per component"""
        x = np.asarray(x, dtype=float)
        columns = []
        for i in range(x.size):
            h = step * max(1.0, abs(x[i]))
            plus, minus = x.copy(), x.copy()
            plus[i] += h
            minus[i] -= h
            columns.append((np.asarray(func(plus)) - np.asarray(func(minus))) / (2.0 * h))
        return np.column_stack(columns)

    @staticmethod
    def field_jacobian(rhs: Callable[[float, np.ndarray], np.ndarray]) -> Jacobian:
        def jacobian(eps: float, x: np.ndarray) -> np.ndarray:
            return StmService.finite_difference_jacobian(lambda y: rhs(eps, y), x)

        return jacobian

    @staticmethod
    def flow_jacobian(
        flow: Callable[[QuasiState], QuasiState], x0: QuasiState
    ) -> np.ndarray:
        """Finite-difference Jacobian of a quasi-state flow map"""
        return StmService.finite_difference_jacobian(
            lambda y: flow(QuasiState.from_array(y)).to_array(), x0.to_array()
        )

    @staticmethod
    def kepler_quasi_jacobian(k1: float = 1.0, parameter: str = "tau") -> Jacobian:
        """
        Analytic Jacobian of the unperturbed (q, p, u, w) field. In s the
        field is q' = g, p' = h, u' = w, w' = -l^2 u + k1; tau divides it
        by l and t multiplies it by u^2.
        """
        if parameter not in ("s", "tau", "t"):
            raise ValueError(f"Unknown evolution parameter {parameter}")

        def jacobian(eps: float, y: np.ndarray) -> np.ndarray:
            q, p, u, w = y[Q], y[P], y[U], y[W]
            g, h, dg_dq, dg_dp, dh_dq, dh_dp, dl_dq, dl_dp, l_mag = StmService._partials(q, p)
            field = np.concatenate([g, h, [w, -(l_mag**2) * u + k1]])
            grad_l = np.concatenate([dl_dq, dl_dp, [0.0, 0.0]])
            jac = np.zeros((8, 8))
            jac[Q, Q], jac[Q, P] = dg_dq, dg_dp
            jac[P, Q], jac[P, P] = dh_dq, dh_dp
            jac[U, W] = 1.0
            jac[W, :] = -2.0 * l_mag * u * grad_l
            jac[W, U] = -(l_mag**2)
            if parameter == "tau":
                return jac / l_mag - np.outer(field, grad_l) / l_mag**2
            if parameter == "t":
                grad_u = np.zeros(8)
                grad_u[U] = 2.0 * u
                return u * u * jac + np.outer(field, grad_u)
            return jac

        return jacobian

    @staticmethod
    def symplectic_residual(stm: Stm8, form: Optional[SymplecticForm] = None) -> float:
        """||S^T J S - J||_inf, J defaulting to the ordering's own form"""
        if form is None:
            form = SymplecticForm.for_ordering(stm.ordering)
        s = stm.entries
        j = form.matrix
        if s.shape != j.shape:
            raise DimensionMismatch(f"STM {s.shape} does not match form {form.name} {j.shape}")
        return float(np.linalg.norm(s.T @ j @ s - j, np.inf))

    # helpers

    @staticmethod
    def _partials(q: np.ndarray, p: np.ndarray):
        """
        g = -l^* q, h = -l^* p and their derivatives, with those of l = |q x p|
        """
        _, _, l_mag = So3Service.angular_momentum(q, p)
        if l_mag == 0:
            raise RectilinearOrbit("Kepler STM undefined for zero angular momentum")
        qq, pp, qp = float(np.dot(q, q)), float(np.dot(p, p)), float(np.dot(q, p))
        eye = np.eye(3)
        g = qq * p - qp * q
        h = qp * p - pp * q
        dg_dq = 2.0 * np.outer(p, q) - qp * eye - np.outer(q, p)
        dg_dp = qq * eye - np.outer(q, q)
        dh_dq = np.outer(p, p) - pp * eye
        dh_dp = np.outer(p, q) + qp * eye - 2.0 * np.outer(q, p)
        dl_dq = (pp * q - qp * p) / l_mag
        dl_dp = (qq * p - qp * q) / l_mag
        return g, h, dg_dq, dg_dp, dh_dq, dh_dp, dl_dq, dl_dp, l_mag

    @staticmethod
    def _check_constraints(x0: QuasiState) -> float:
        q_norm = np.linalg.norm(x0.q)
        p_mag = np.linalg.norm(x0.p)
        if p_mag == 0:
            raise RectilinearOrbit("Simplified STM undefined for p = 0")
        radial = abs(np.dot(x0.q / q_norm, x0.p)) if q_norm > 0 else np.inf
        if abs(q_norm - 1.0) > Config.CONSTRAINT_TOL or radial > Config.CONSTRAINT_TOL:
            raise ConstraintViolated(
                f"Simplified STM needs |q| = 1 and q.p = 0, got |q|-1={q_norm - 1.0:.3e}, "
                f"q.p={radial:.3e}"
            )
        return float(p_mag)

    @staticmethod
    def _radial_jacobian(x: QuasiState, inverse: bool) -> np.ndarray:
        """
        d(q, p, u, w)/d(q, p, u, p_u), or its inverse, as an 8x8 matrix
        """
        if x.u <= 0:
            raise DegenerateState(f"w <-> p_u conversion needs u > 0, got {x.u}")
        jac = np.eye(8)
        pu = x.w / x.u**2
        if inverse:
            jac[W, U] = -2.0 * pu / x.u
            jac[W, W] = 1.0 / x.u**2
        else:
            jac[W, U] = 2.0 * x.u * pu
            jac[W, W] = x.u**2
        return jac
