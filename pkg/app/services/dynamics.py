import logging
from typing import Callable, Tuple

import numpy as np

from app.models.potential import FrequencyPair, GeneralizedForce, PotentialModel
from app.models.state import (
    CartesianState,
    ExtendedState,
    ProjectiveState,
    QuasiState,
    TransformParams,
)
from app.services.projective_transform import DEFAULT_PARAMS, ProjectiveTransformService
from app.services.so3_kinematics import So3Service
from app.utils.errors import (
    DegenerateState,
    ImaginaryFrequency,
    OriginSingularity,
    RectilinearOrbit,
)

logger = logging.getLogger(__name__)

VectorField = Callable[[float, np.ndarray], np.ndarray]


class DynamicsService:
    """Hamiltonians and vector fields in t, s and tau"""

    @staticmethod
    def hamiltonian_cartesian(c: CartesianState, model: PotentialModel, t: float = 0.0) -> float:
        r = np.linalg.norm(c.r)
        if r == 0:
            raise OriginSingularity("Hamiltonian undefined at the origin")
        v1, _ = model.perturbing_potential(c.r, t)
        return 0.5 * float(np.dot(c.v, c.v)) + model.central_potential(r) + v1

    @staticmethod
    def hamiltonian_projective(
        x: ProjectiveState,
        params: TransformParams = DEFAULT_PARAMS,
        model: PotentialModel = PotentialModel(),
        t: float = 0.0,
    ) -> float:
        """
        H = (1/(u^2n q^(2m+2))) (l^2 + u^2 p_u^2 / n^2) / 2 + V
        """
        DynamicsService._check(x)
        n, m = params.n, params.m
        q_norm = np.linalg.norm(x.q)
        _, _, l_mag = So3Service.angular_momentum(x.q, x.p)
        kinetic = 0.5 * DynamicsService._metric(x, params) * (
            l_mag**2 + (x.u * x.pu / n) ** 2
        )
        r_mag = x.u**n * q_norm ** (m + 1)
        r_vec = x.u**n * q_norm**m * x.q
        v1, _ = model.perturbing_potential(r_vec, t)
        return kinetic + model.central_potential(r_mag) + v1

    @staticmethod
    def generalized_forces(
        force: np.ndarray, x: ProjectiveState, params: TransformParams = DEFAULT_PARAMS
    ) -> GeneralizedForce:
        """
        Pull a Cartesian force back to (f, f_u) conjugate to (q, u)
        """
        q_norm = np.linalg.norm(x.q)
        if q_norm == 0:
            raise DegenerateState("Generalized forces undefined at q = 0")
        n, m = params.n, params.m
        force = np.asarray(force, dtype=float)
        q_hat = x.q / q_norm
        radial = np.dot(q_hat, force)
        f = x.u**n * q_norm**m * (force + m * radial * q_hat)
        fu = n * x.u ** (n - 1) * q_norm ** (m + 1) * radial
        return GeneralizedForce(f=f, fu=float(fu))

    @staticmethod
    def cartesian_force(
        c: CartesianState, model: PotentialModel, t: float = 0.0, include_central: bool = True
    ) -> np.ndarray:
        """Total (or perturbing-only) Cartesian force per unit mass"""
        _, grad = model.perturbing_potential(c.r, t)
        force = -grad + model.nonconservative_acceleration(c.r, c.v, t)
        if include_central:
            force = force + model.central_force(c.r)
        return force

    @staticmethod
    def perturbing_forces(
        x: ProjectiveState,
        params: TransformParams = DEFAULT_PARAMS,
        model: PotentialModel = PotentialModel(),
        t: float = 0.0,
    ) -> GeneralizedForce:
        """(f, f_u) of F = -dV1/dr + a_nc, excluding the central V0"""
        if model.is_central:
            return GeneralizedForce(np.zeros(3), 0.0)
        cart = ProjectiveTransformService.forward(x, params)
        force = DynamicsService.cartesian_force(cart, model, t, include_central=False)
        return DynamicsService.generalized_forces(force, x, params)

    @staticmethod
    def rhs_time(
        x: ProjectiveState,
        params: TransformParams = DEFAULT_PARAMS,
        model: PotentialModel = PotentialModel(),
        t: float = 0.0,
    ) -> np.ndarray:
        """
        d/dt of (q, u, p, p_u), standard ordering
        """
        DynamicsService._check(x)
        n, m = params.n, params.m
        q_norm = np.linalg.norm(x.q)
        _, l_star, l_mag = So3Service.angular_momentum(x.q, x.p)
        metric = DynamicsService._metric(x, params)
        radial_kinetic = (x.u * x.pu / n) ** 2

        cart = ProjectiveTransformService.forward(x, params)
        force = DynamicsService.cartesian_force(cart, model, t)
        gen = DynamicsService.generalized_forces(force, x, params)

        q_dot = -metric * (l_star @ x.q)
        u_dot = metric * x.u**2 * x.pu / n**2
        p_dot = (
            -metric * (l_star @ x.p)
            + (m + 1.0) * metric / q_norm**2 * (l_mag**2 + radial_kinetic) * x.q
            + gen.f
        )
        pu_dot = (
            n * metric / x.u * (l_mag**2 + (n - 1.0) / n**3 * (x.u * x.pu) ** 2)
            + gen.fu
        )
        return np.concatenate([q_dot, [u_dot], p_dot, [pu_dot]])

    @staticmethod
    def rhs_s(
        xe: ExtendedState,
        params: TransformParams = DEFAULT_PARAMS,
        model: PotentialModel = PotentialModel(),
        raw_extended: bool = False,
    ) -> np.ndarray:
        """
        d/ds of (q, u, p, p_u, t, p_t) with dt = r^2 ds.

        The default form eliminates p_t = -H and is the conformal scaling
        r^2 * rhs_time. raw_extended keeps the (H + p_t) gradient term of
        the extended Hamiltonian r^2 (H + p_t).
        """
        x = xe.base
        r2, grad_r2 = DynamicsService._r_squared(x, params)
        body = r2 * DynamicsService.rhs_time(x, params, model, xe.t)
        if raw_extended:
            energy = DynamicsService.hamiltonian_projective(x, params, model, xe.t) + xe.pt
            body[4:8] -= energy * grad_r2[0:4]
        alpha = DynamicsService._nonconservative_forces(x, params, model, xe.t)
        coords_prime = np.concatenate([body[0:3], [body[3]]])
        alpha_flat = np.concatenate([alpha.f, [alpha.fu]])
        cart = ProjectiveTransformService.forward(x, params)
        pt_prime = -(r2 * model.time_rate(cart.r, xe.t) + np.dot(alpha_flat, coords_prime))
        return np.concatenate([body, [r2, pt_prime]])

    @staticmethod
    def rhs_tau(
        xe: ExtendedState,
        params: TransformParams = DEFAULT_PARAMS,
        model: PotentialModel = PotentialModel(),
        raw_extended: bool = False,
    ) -> np.ndarray:
        """rhs_s divided by the current |q x p|"""
        _, _, l_mag = So3Service.angular_momentum(xe.base.q, xe.base.p)
        if l_mag == 0:
            raise RectilinearOrbit("tau parameterization undefined for zero angular momentum")
        return DynamicsService.rhs_s(xe, params, model, raw_extended) / l_mag

    @staticmethod
    def rhs_quasi(
        x: QuasiState,
        model: PotentialModel = PotentialModel(),
        parameter: str = "s",
        t: float = 0.0,
    ) -> np.ndarray:
        """
        Derivative of (q, p, u, w) for the n = m = -1 transformation.

        u' = w, w' = -omega^2 u + k1 + f_u in s; tau divides by l and
        t multiplies by u^2.
        """
        _, l_star, l_mag = So3Service.angular_momentum(x.q, x.p)
        omega2 = l_mag**2 - model.k2
        p_rate = -(l_star @ x.p)
        w_rate = -omega2 * x.u + model.k1
        if not model.is_central:
            if x.u <= 0:
                raise DegenerateState(f"Perturbed quasi dynamics need u > 0, got {x.u}")
            gen = DynamicsService.perturbing_forces(x.to_projective(), DEFAULT_PARAMS, model, t)
            p_rate = p_rate + gen.f / x.u**2
            w_rate = w_rate + gen.fu
        deriv = np.concatenate([-(l_star @ x.q), p_rate, [x.w, w_rate]])
        if parameter == "s":
            return deriv
        if parameter == "tau":
            if l_mag == 0:
                raise RectilinearOrbit("tau parameterization undefined for zero angular momentum")
            return deriv / l_mag
        if parameter == "t":
            return deriv * x.u**2
        raise ValueError(f"Unknown evolution parameter {parameter}")

    @staticmethod
    def angular_momentum_rates(
        x: ProjectiveState, force: GeneralizedForce, params: TransformParams = DEFAULT_PARAMS
    ) -> Tuple[np.ndarray, float, float]:
        """
        Time rates of the angular momentum vector, its magnitude and |p|
        """
        l_vec, _, l_mag = So3Service.angular_momentum(x.q, x.p)
        ldot_vec = np.cross(x.q, force.f)
        if l_mag == 0:
            raise RectilinearOrbit("Angular momentum magnitude rate undefined at l = 0")
        ldot_mag = float(np.dot(l_vec, ldot_vec) / l_mag)
        p_mag = np.linalg.norm(x.p)
        pdot_mag = float(np.dot(x.p, force.f) / p_mag) if p_mag > 0 else 0.0
        return ldot_vec, ldot_mag, pdot_mag

    @staticmethod
    def frequency_pair(l_mag: float, k2: float) -> FrequencyPair:
        omega2 = l_mag**2 - k2
        if omega2 <= 0:
            raise ImaginaryFrequency(f"l^2 - k2 = {omega2:.3e} is not positive")
        omega = np.sqrt(omega2)
        return FrequencyPair(omega=float(omega), varpi=float(omega / l_mag))

    @staticmethod
    def second_order_residual(
        x: ProjectiveState,
        q_dd: np.ndarray,
        u_dd: float,
        model: PotentialModel = PotentialModel(),
        parameter: str = "s",
        t: float = 0.0,
    ) -> Tuple[np.ndarray, float]:
        """
        Residuals of the perturbed oscillator form of the q and u equations.
        The caller supplies second derivatives in the chosen parameter.
        """
        _, l_star, l_mag = So3Service.angular_momentum(x.q, x.p)
        gen = DynamicsService.perturbing_forces(x, DEFAULT_PARAMS, model, t)
        q2 = float(np.dot(x.q, x.q))
        omega2 = l_mag**2 - model.k2
        q_dd = np.asarray(q_dd, dtype=float)
        if parameter == "s":
            res_q = q_dd + l_mag**2 * x.q - q2 / x.u**2 * gen.f
            res_u = u_dd + omega2 * x.u - model.k1 - gen.fu
            return res_q, float(res_u)
        if parameter == "tau":
            if l_mag == 0:
                raise RectilinearOrbit("tau residual undefined for zero angular momentum")
            q_ring = -(l_star @ x.q) / l_mag
            u_ring = x.w / l_mag
            proj = np.eye(3) - np.outer(q_ring, x.p) / l_mag
            res_q = q_dd + x.q - q2 / (x.u**2 * l_mag**2) * (proj @ gen.f)
            res_u = (
                u_dd
                + omega2 / l_mag**2 * x.u
                - model.k1 / l_mag**2
                - (gen.fu - q2 / (l_mag * x.u**2) * u_ring * np.dot(x.p, gen.f)) / l_mag**2
            )
            return res_q, float(res_u)
        raise ValueError(f"Unknown evolution parameter {parameter}")

    # vector fields for the integrator

    @staticmethod
    def time_field(
        params: TransformParams = DEFAULT_PARAMS, model: PotentialModel = PotentialModel()
    ) -> VectorField:
        def field(t: float, y: np.ndarray) -> np.ndarray:
            return DynamicsService.rhs_time(ProjectiveState.from_array(y), params, model, t)

        return field

    @staticmethod
    def s_field(
        params: TransformParams = DEFAULT_PARAMS,
        model: PotentialModel = PotentialModel(),
        raw_extended: bool = False,
    ) -> VectorField:
        def field(s: float, y: np.ndarray) -> np.ndarray:
            return DynamicsService.rhs_s(ExtendedState.from_array(y), params, model, raw_extended)

        return field

    @staticmethod
    def tau_field(
        params: TransformParams = DEFAULT_PARAMS,
        model: PotentialModel = PotentialModel(),
        raw_extended: bool = False,
    ) -> VectorField:
        def field(tau: float, y: np.ndarray) -> np.ndarray:
            return DynamicsService.rhs_tau(ExtendedState.from_array(y), params, model, raw_extended)

        return field

    @staticmethod
    def quasi_field(model: PotentialModel = PotentialModel(), parameter: str = "tau") -> VectorField:
        """
        (q, p, u, w) for parameter t; (q, p, u, w, t) for s and tau
        """

        def field(eps: float, y: np.ndarray) -> np.ndarray:
            t = eps if parameter == "t" else y[8]
            x = QuasiState.from_array(y[0:8])
            deriv = DynamicsService.rhs_quasi(x, model, parameter, t)
            if parameter == "t":
                return deriv
            _, _, l_mag = So3Service.angular_momentum(x.q, x.p)
            t_prime = 1.0 / x.u**2
            if parameter == "tau":
                t_prime /= l_mag
            return np.concatenate([deriv, [t_prime]])

        return field

    @staticmethod
    def cartesian_field(model: PotentialModel = PotentialModel()) -> VectorField:
        def field(t: float, y: np.ndarray) -> np.ndarray:
            cart = CartesianState.from_array(y)
            if np.linalg.norm(cart.r) == 0:
                raise OriginSingularity("Cartesian field evaluated at the origin")
            return np.concatenate([cart.v, DynamicsService.cartesian_force(cart, model, t)])

        return field

    # helpers

    @staticmethod
    def _check(x: ProjectiveState):
        if x.u <= 0 or not np.any(x.q):
            raise DegenerateState(f"Degenerate projective state u={x.u}, |q|={np.linalg.norm(x.q)}")

    @staticmethod
    def _metric(x: ProjectiveState, params: TransformParams) -> float:
        q_norm = np.linalg.norm(x.q)
        return x.u ** (-2.0 * params.n) * q_norm ** (-2.0 * params.m - 2.0)

    @staticmethod
    def _r_squared(x: ProjectiveState, params: TransformParams) -> Tuple[float, np.ndarray]:
        """r^2 = u^2n q^(2m+2) and its gradient in (q, u)"""
        n, m = params.n, params.m
        q_norm = np.linalg.norm(x.q)
        r2 = x.u ** (2 * n) * q_norm ** (2 * m + 2)
        grad_q = (2 * m + 2) * x.u ** (2 * n) * q_norm ** (2 * m) * x.q
        grad_u = 2 * n * x.u ** (2 * n - 1) * q_norm ** (2 * m + 2)
        return r2, np.concatenate([grad_q, [grad_u]])

    @staticmethod
    def _nonconservative_forces(
        x: ProjectiveState, params: TransformParams, model: PotentialModel, t: float
    ) -> GeneralizedForce:
        if model.nonconservative is None:
            return GeneralizedForce(np.zeros(3), 0.0)
        cart = ProjectiveTransformService.forward(x, params)
        a_nc = model.nonconservative_acceleration(cart.r, cart.v, t)
        return DynamicsService.generalized_forces(a_nc, x, params)
