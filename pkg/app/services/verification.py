import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.linalg import expm
from tqdm import tqdm

from app.models.flow import KeplerFlowInput, ManevFlowInput
from app.models.potential import J2Model, PotentialModel
from app.models.scenario import CheckResult, OrbitElements, Scenario
from app.models.state import CartesianState, ExtendedState, ProjectiveState, QuasiState, TransformParams
from app.models.trajectory import IntegratorConfig, Trajectory
from app.services.closed_form import ClosedFormService
from app.services.dynamics import DynamicsService
from app.services.elements import ElementsService
from app.services.perturbations import PerturbationService
from app.services.projective_transform import ProjectiveTransformService
from app.services.propagator import PropagatorService
from app.services.scenario_service import ScenarioService
from app.services.so3_kinematics import So3Service
from app.services.stm import StmService
from app.utils.errors import UnknownSuite
from config.settings import Config

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
FAMILY = (TransformParams(-1, -1), TransformParams(-1, 0), TransformParams(1, 0))
TIGHT = IntegratorConfig(rel_tol=1e-13, abs_tol=1e-13)


class VerificationService:
    """Named verification suites returning per-check residuals"""

    @staticmethod
    def suites() -> Dict[str, Callable[[], List[CheckResult]]]:
        return {
            "roundtrip": VerificationService.roundtrip_suite,
            "conservation": VerificationService.conservation_suite,
            "closedform": VerificationService.closed_form_suite,
            "stm": VerificationService.stm_suite,
            "symplectic": VerificationService.symplectic_suite,
            "j2": VerificationService.j2_suite,
        }

    @staticmethod
    def run_suite(name: str) -> List[CheckResult]:
        suites = VerificationService.suites()
        if name not in suites:
            raise UnknownSuite(f"Unknown suite {name}; choose from {', '.join(suites)}")
        logger.info(f"Running verification suite {name}")
        checks = suites[name]()
        failed = [c.name for c in checks if not c.passed]
        if failed:
            logger.error(f"Suite {name} failed checks: {', '.join(failed)}")
        return checks

    @staticmethod
    def run(names: Iterable[str], threads: int = Config.REGPROP_THREADS) -> Dict[str, List[CheckResult]]:
        """Run independent suites, at most `threads` at a time"""
        names = list(names)
        suites = VerificationService.suites()
        unknown = [n for n in names if n not in suites]
        if unknown:
            raise UnknownSuite(f"Unknown suite {', '.join(unknown)}; choose from {', '.join(suites)}")
        with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
            futures = {name: pool.submit(VerificationService.run_suite, name) for name in names}
            return {name: futures[name].result() for name in names}

    @staticmethod
    def report(results: Dict[str, List[CheckResult]]) -> Dict:
        passed = all(c.passed for checks in results.values() for c in checks)
        return {
            "pass": passed,
            "suites": {name: [c.to_dict() for c in checks] for name, checks in results.items()},
        }

    # sample states

    @staticmethod
    def random_cartesian(rng: np.random.Generator, count: int, e_max: float = 2.5) -> List[CartesianState]:
        """Conic states with e in [0, e_max] and semilatus rectum in [0.5, 3], k1 = 1"""
        states = []
        for _ in range(count):
            e = rng.uniform(0.0, e_max)
            slr = rng.uniform(0.5, 3.0)
            if abs(e - 1.0) < 1e-9:
                a = slr / 2.0
            else:
                a = slr / (1.0 - e * e)
            if e < 1.0:
                f = rng.uniform(0.0, TWO_PI)
            else:
                limit = 0.9 * np.arccos(-1.0 / e)
                f = rng.uniform(-limit, limit)
            el = OrbitElements(
                a=a,
                e=e,
                i=rng.uniform(0.0, np.pi),
                omega_arg=rng.uniform(0.0, TWO_PI),
                raan=rng.uniform(0.0, TWO_PI),
                true_anomaly=f,
            )
            states.append(ElementsService.elements_to_cartesian(el))
        return states

    @staticmethod
    def stock_state(ecc: float, anomaly: float = 0.0) -> QuasiState:
        """Constraint-satisfying quasi state on a conic with l = 1, k1 = 1"""
        a = 0.5 if abs(ecc - 1.0) < 1e-12 else 1.0 / (1.0 - ecc * ecc)
        el = OrbitElements(a=a, e=ecc, i=0.4, omega_arg=0.5, raan=0.6, true_anomaly=anomaly)
        cart = ElementsService.elements_to_cartesian(el)
        return ProjectiveTransformService.inverse(cart).to_quasi()

    @staticmethod
    def generic_state(ecc: float = 0.3) -> QuasiState:
        """A state off the constraint manifold (|q| != 1, q.p != 0)"""
        x = VerificationService.stock_state(ecc, 0.7)
        return QuasiState(1.3 * x.q, x.p + 0.2 * x.q, x.u, x.w)

    # suites

    @staticmethod
    def roundtrip_suite(samples: int = 1000) -> List[CheckResult]:
        rng = np.random.default_rng(Config.REGPROP_SEED)
        states = VerificationService.random_cartesian(rng, samples)
        forward_err = inverse_err = 0.0
        ham_err = {params: 0.0 for params in FAMILY}
        model = PotentialModel()
        for cart in tqdm(states, desc="roundtrip", disable=not Config.SHOW_PROGRESS):
            x = ProjectiveTransformService.inverse(cart)
            back = ProjectiveTransformService.forward(x)
            forward_err = max(
                forward_err,
                np.linalg.norm(back.r - cart.r) / np.linalg.norm(cart.r),
                np.linalg.norm(back.v - cart.v) / np.linalg.norm(cart.v),
            )
            again = ProjectiveTransformService.inverse(back).to_array()
            inverse_err = max(
                inverse_err,
                np.max(np.abs(again - x.to_array())) / np.max(np.abs(x.to_array())),
            )
            r = np.linalg.norm(cart.r)
            scale = 0.5 * np.dot(cart.v, cart.v) + 1.0 / r
            h_cart = DynamicsService.hamiltonian_cartesian(cart, model)
            for params in FAMILY:
                xp = ProjectiveTransformService.inverse(cart, params)
                h_proj = DynamicsService.hamiltonian_projective(xp, params, model)
                ham_err[params] = max(ham_err[params], abs(h_proj - h_cart) / scale)

        checks = [
            CheckResult.below("roundtrip.forward_inverse", forward_err, 1e-12),
            CheckResult.below("roundtrip.inverse_forward", inverse_err, 1e-12),
        ]
        for params, err in ham_err.items():
            name = f"roundtrip.hamiltonian_n{params.n:+.0f}_m{params.m:+.0f}"
            checks.append(CheckResult.below(name, err, 1e-13))
        return checks

    @staticmethod
    def conservation_suite(samples: int = 200) -> List[CheckResult]:
        rng = np.random.default_rng(Config.REGPROP_SEED + 1)
        j2 = PerturbationService.j2_potential_model(J2Model.from_constants(Config.EARTH_J2, 1.0, 1.0))
        model = replace(j2, nonconservative=lambda r, v, t: -1e-3 * v, label="j2_drag")
        q_rate = lam_rate = 0.0
        for cart in VerificationService.random_cartesian(rng, samples, e_max=0.9):
            for params in FAMILY:
                x = ProjectiveTransformService.inverse(cart, params)
                xdot = DynamicsService.rhs_time(x, params, model)
                q_dot = xdot[0:3]
                q_rate = max(q_rate, abs(np.dot(x.q, q_dot)) / (np.linalg.norm(x.q) * np.linalg.norm(q_dot)))
                grad = VerificationService._lambda_gradient(x, params)
                lam_rate = max(lam_rate, abs(np.dot(grad, xdot)) / (np.linalg.norm(grad) * np.linalg.norm(xdot)))
        checks = [
            CheckResult.below("conservation.q_norm_rate", q_rate, 1e-14),
            CheckResult.below("conservation.lambda_rate", lam_rate, 1e-14),
        ]
        checks.append(VerificationService._reparameterization_check())
        return checks

    @staticmethod
    def closed_form_suite() -> List[CheckResult]:
        checks = []
        kepler = PotentialModel()

        def field(tau, y):
            return DynamicsService.rhs_quasi(QuasiState.from_array(y), kepler, "tau")

        flow_err = 0.0
        for ecc in (0.0, 0.2, 0.9, 1.0, 1.8):
            x0 = VerificationService.stock_state(ecc)
            traj = PropagatorService.integrate(field, x0.to_array(), (0.0, 40.0 * np.pi), TIGHT, "tau")
            inp = KeplerFlowInput(x0)
            for tau, y in zip(traj.params, traj.states):
                exact = ClosedFormService.kepler_flow(inp, tau).to_array()
                flow_err = max(flow_err, np.max(np.abs(exact - y)))
        checks.append(CheckResult.below("closedform.flow_vs_integration", flow_err, 1e-9))

        drift = 0.0
        rotation_err = 0.0
        for ecc in (0.2, 0.9):
            x0 = VerificationService.stock_state(ecc)
            frame0 = ProjectiveTransformService.perifocal_frame(x0.to_projective(), 1.0)
            l0, _, _ = So3Service.angular_momentum(x0.q, x0.p)
            for tau in (0.5, 1.7, 3.9, 12.0):
                x = ClosedFormService.kepler_flow(KeplerFlowInput(x0), tau)
                frame = ProjectiveTransformService.perifocal_frame(x.to_projective(), 1.0)
                l_vec, _, _ = So3Service.angular_momentum(x.q, x.p)
                drift = max(
                    drift,
                    np.max(np.abs(l_vec - l0)),
                    abs(np.linalg.norm(x.p) - np.linalg.norm(x0.p)),
                    np.max(np.abs(frame.e_vec - frame0.e_vec)),
                    np.max(np.abs(frame.h_vec - frame0.h_vec)),
                )
                alt = ClosedFormService.kepler_flow(KeplerFlowInput(x0), tau, rotation="amatrix")
                rotation_err = max(rotation_err, np.max(np.abs(alt.to_array() - x.to_array())))
        checks.append(CheckResult.below("closedform.conserved_quantities", drift, 1e-12))
        checks.append(CheckResult.below("closedform.amatrix_vs_rodrigues", rotation_err, 1e-12))

        degeneration = 0.0
        x0 = VerificationService.stock_state(0.4, 0.9)
        for tau in (0.3, 2.2, 7.1):
            a = ClosedFormService.manev_flow(ManevFlowInput(x0, 1.0, 0.0), tau).to_array()
            b = ClosedFormService.kepler_flow(KeplerFlowInput(x0), tau).to_array()
            degeneration = max(degeneration, np.max(np.abs(a - b)))
        checks.append(CheckResult.below("closedform.manev_degeneration", degeneration, 1e-15))

        precession = 0.0
        x0 = VerificationService.stock_state(0.2, 1.0)
        for ratio in (0.01, 0.1, 0.5):
            advance = ClosedFormService.apsidal_advance(ManevFlowInput(x0, 1.0, ratio))
            expected = DynamicsService.frequency_pair(1.0, ratio).precession_per_radial_period
            precession = max(precession, abs(advance - expected))
        checks.append(CheckResult.below("closedform.apsidal_advance", precession, 1e-9))

        checks.extend(VerificationService._time_of_flight_checks())

        sigma_err = 0.0
        for tau in (0.4, 2.5, -1.3):
            sigma = np.array(ClosedFormService.sigma_inhomogeneous(1.3, 1.0, tau))
            inverse = ClosedFormService.lambda_exponential(1.3, 1, -tau)
            varsigma = np.array(ClosedFormService.varsigma_inhomogeneous(1.3, 1.0, tau))
            sigma_err = max(sigma_err, np.max(np.abs(-inverse @ sigma - varsigma)))
        checks.append(CheckResult.below("closedform.varsigma_identity", sigma_err, 1e-14))
        return checks

    @staticmethod
    def stm_suite() -> List[CheckResult]:
        checks = []
        x0 = VerificationService.generic_state(0.3)
        tau = 1.7
        phi = StmService.phi_full(x0, 1.0, tau).entries
        fd = StmService.flow_jacobian(lambda x: ClosedFormService.kepler_flow(KeplerFlowInput(x), tau), x0)
        checks.append(
            CheckResult.below("stm.phi_vs_finite_difference", np.max(np.abs(phi - fd)) / max(1.0, np.max(np.abs(phi))), 1e-6)
        )

        stock = VerificationService.stock_state(0.3, 0.7)
        kepler = PotentialModel()

        def tau_field(eps, y):
            return DynamicsService.rhs_quasi(QuasiState.from_array(y), kepler, "tau")

        variational, _ = StmService.stm_variational(
            tau_field, stock.to_array(), (0.0, 4.0 * np.pi),
            StmService.kepler_quasi_jacobian(1.0, "tau"), "modified", "tau", TIGHT,
        )
        closed = StmService.phi_full(stock, 1.0, 4.0 * np.pi)
        checks.append(
            CheckResult.below("stm.phi_vs_variational", np.max(np.abs(variational.entries - closed.entries)), 1e-8)
        )

        l_vec, _, _ = So3Service.angular_momentum(stock.q, stock.p)
        sigma = StmService.sigma_matrix(l_vec, 2.3)
        checks.append(CheckResult.below("stm.sigma_symplectic", StmService.symplectic_residual(sigma), 1e-13))

        t1, t2 = 0.9, 2.4
        x1 = ClosedFormService.kepler_flow(KeplerFlowInput(x0), t1)
        composed = StmService.phi_full(x1, 1.0, t2).compose(StmService.phi_full(x0, 1.0, t1))
        direct = StmService.phi_full(x0, 1.0, t1 + t2)
        checks.append(CheckResult.below("stm.semigroup", np.max(np.abs(composed.entries - direct.entries)), 1e-10))
        x_tau = ClosedFormService.kepler_flow(KeplerFlowInput(x0), tau)
        round_trip = StmService.phi_full(x0, 1.0, tau).entries @ StmService.phi_full(x_tau, 1.0, -tau).entries
        checks.append(CheckResult.below("stm.inverse", np.max(np.abs(round_trip - np.eye(8))), 1e-10))

        simplified = StmService.phi_simplified(stock, 1.0, tau).entries
        full = StmService.phi_full(stock, 1.0, tau).entries
        checks.append(CheckResult.below("stm.simplified_vs_full", np.max(np.abs(simplified - full)), 1e-10))

        theta = StmService.theta_matrix(stock, 1.0, tau).entries
        theta_fd = StmService.flow_jacobian(
            lambda x: ClosedFormService.kepler_flow(KeplerFlowInput(x, simplified=True), tau), stock
        )
        checks.append(CheckResult.below("stm.theta_vs_finite_difference", np.max(np.abs(theta - theta_fd)), 1e-6))
        checks.append(CheckResult.above("stm.theta_differs_from_phi", np.max(np.abs(theta - full)), 1e-3))

        l_mag = np.linalg.norm(l_vec)
        eig = np.linalg.eigvals(ClosedFormService.generator_matrix(l_vec))
        expected = np.array([-1.0, -1.0, -1.0, 0.0, 0.0, 1.0, 1.0, 1.0]) * l_mag
        spectrum = max(np.max(np.abs(eig.real)), np.max(np.abs(np.sort(eig.imag) - expected)))
        checks.append(CheckResult.below("stm.generator_eigenvalues", spectrum, 1e-12))

        lam_err = 0.0
        for n in (1, 3, 4):
            oracle = expm(ClosedFormService.lambda_matrix(l_mag, n) * 1.1 / l_mag)
            lam_err = max(lam_err, np.max(np.abs(ClosedFormService.lambda_exponential(l_mag, n, 1.1) - oracle)))
        amat = expm(ClosedFormService.a_matrix(stock.q, stock.p) * 1.1 / l_mag)
        lam_err = max(lam_err, np.max(np.abs(ClosedFormService.a_exponential(stock.q, stock.p, 1.1) - amat)))
        checks.append(CheckResult.below("stm.exponential_forms", lam_err, 1e-12))

        t_field = DynamicsService.quasi_field(kepler, "t")
        phi_t, x_end = StmService.stm_variational(
            t_field, stock.to_array(), (0.0, 2.0),
            StmService.kepler_quasi_jacobian(1.0, "t"), "modified", "t", TIGHT,
        )
        psi = StmService.psi_canonical(phi_t, stock, QuasiState.from_array(x_end))
        checks.append(CheckResult.below("stm.psi_symplectic", StmService.symplectic_residual(psi), 1e-10))
        back = StmService.phi_from_psi(psi, stock, QuasiState.from_array(x_end))
        checks.append(CheckResult.below("stm.psi_round_trip", np.max(np.abs(back.entries - phi_t.entries)), 1e-12))
        return checks

    @staticmethod
    def symplectic_suite(periods: float = Config.VERIFY_PERIODS) -> List[CheckResult]:
        """
        Under J2: the t-STM of (q, u, p, p_u) is symplectic, the s-STM of the
        same coordinates is not, the extended (q, u, p, p_u, t, p_t) s-STM is
        """
        scenario = ScenarioService.normalize(ScenarioService.reference_j2_scenario(periods))
        model = ScenarioService.build_model(scenario)
        cart = ScenarioService.initial_cartesian(scenario)
        x0 = ProjectiveTransformService.inverse(cart)
        config = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-11)
        period = ElementsService.orbital_period(scenario.elements.a) * periods
        s_end = TWO_PI / np.linalg.norm(np.cross(cart.r, cart.v)) * periods
        pt0 = -DynamicsService.hamiltonian_projective(x0, model=model)
        xe = ExtendedState(x0, 0.0, pt0).to_array()

        stm_t, _ = StmService.stm_variational(
            DynamicsService.time_field(model=model), x0.to_array(), (0.0, period),
            ordering="standard", parameter="t", config=config,
        )
        stm_s, _ = StmService.stm_variational(
            DynamicsService.s_field(model=model), xe, (0.0, s_end),
            ordering="standard", parameter="s", config=config,
        )
        stm_ext, _ = StmService.stm_variational(
            DynamicsService.s_field(model=model, raw_extended=True), xe, (0.0, s_end),
            ordering="extended10", parameter="s", config=config,
        )
        return [
            CheckResult.below("symplectic.time_stm", StmService.symplectic_residual(stm_t), 1e-6),
            CheckResult.above("symplectic.s_stm_not_symplectic", StmService.symplectic_residual(stm_s), 1e-2),
            CheckResult.below("symplectic.extended_s_stm", StmService.symplectic_residual(stm_ext), 1e-6),
        ]

    @staticmethod
    def j2_suite(periods: float = Config.VERIFY_PERIODS) -> List[CheckResult]:
        checks = []
        rng = np.random.default_rng(Config.REGPROP_SEED + 2)
        j2 = J2Model.from_constants(Config.EARTH_J2, 1.0, 1.0)
        route = wrong = 0.0
        for cart in VerificationService.random_cartesian(rng, 100, e_max=0.9):
            x = ProjectiveTransformService.inverse(cart)
            x = ProjectiveState(1.2 * x.q, x.u, x.p / 1.2, x.pu)
            analytic = PerturbationService.j2_generalized(x, j2)
            force = PerturbationService.j2_force_cartesian(ProjectiveTransformService.forward(x).r, j2)
            mapped = DynamicsService.generalized_forces(force, x)
            scale = max(np.linalg.norm(mapped.f), abs(mapped.fu))
            route = max(route, np.max(np.abs(analytic.f - mapped.f)) / scale, abs(analytic.fu - mapped.fu) / scale)
            q_hat = x.q / np.linalg.norm(x.q)
            # gradient of the J2 term after substituting |q| = 1 first
            pre_simplified = -2.0 * j2.j2 * x.u**3 * q_hat[2] * np.array([0.0, 0.0, 1.0])
            wrong = max(wrong, np.max(np.abs(pre_simplified - mapped.f)))
        checks.append(CheckResult.below("j2.route_equivalence", route, 1e-13))
        checks.append(CheckResult.above("j2.presimplified_gradient_differs", wrong, 1e-6))

        tau_run = ScenarioService.run(ScenarioService.reference_j2_scenario(periods, "extended", "tau"))
        checks.append(CheckResult.below("j2.q_norm_drift", tau_run.drift.max_q_drift, 1e-9))
        checks.append(CheckResult.below("j2.lambda_drift", tau_run.drift.max_lambda_drift, 1e-9))

        proj = ScenarioService.run(ScenarioService.reference_j2_scenario(periods, "projective", "t"))
        ref = ScenarioService.run(ScenarioService.reference_j2_scenario(periods, "cartesian", "t"))
        checks.append(
            CheckResult.below(
                "j2.cartesian_cross_validation",
                VerificationService.position_error(proj.cartesian, ref.trajectory),
                1e-6,
            )
        )

        states = proj.trajectory.states
        l3 = states[:, 0] * states[:, 5] - states[:, 1] * states[:, 4]
        checks.append(CheckResult.below("j2.polar_angular_momentum", np.max(np.abs(l3 - l3[0])), 1e-9))

        s_run = ScenarioService.run(ScenarioService.reference_j2_scenario(periods, "extended", "s"))
        model = ScenarioService.build_model(s_run.scenario)
        energy = max(
            abs(DynamicsService.hamiltonian_projective(ProjectiveState.from_array(y[0:8]), model=model) + y[9])
            for y in s_run.trajectory.states
        )
        checks.append(CheckResult.below("j2.extended_energy", energy, 1e-9))
        return checks

    @staticmethod
    def cartesian_at_times(
        traj: Trajectory, times: Sequence[float], time_channel: Optional[int] = None
    ) -> np.ndarray:
        """Rows of (x, y, z, vx, vy, vz) at physical times for Cartesian or standard-ordered projective runs"""
        states = PropagatorService.states_at_times(traj, times, time_channel)
        if states.shape[1] == 6:
            return states
        return np.array(
            [ProjectiveTransformService.forward(ProjectiveState.from_array(y[0:8])).to_array() for y in states]
        )

    @staticmethod
    def trajectory_spread(runs: Sequence[Tuple[Trajectory, Optional[int]]], times: Sequence[float]) -> float:
        """Largest Cartesian component difference from the first run at matched physical times"""
        samples = [VerificationService.cartesian_at_times(traj, times, channel) for traj, channel in runs]
        return max(float(np.max(np.abs(s - samples[0]))) for s in samples)

    @staticmethod
    def position_error(frame: pd.DataFrame, reference: Trajectory) -> float:
        """
        Largest distance between the recovered positions of a run and a
        Cartesian t-reference, sampled at every output step of the run
        """
        times = np.clip(frame["t"].to_numpy(), *sorted((reference.start, reference.end)))
        r_ref = VerificationService.cartesian_at_times(reference, times)[:, 0:3]
        return float(np.max(np.linalg.norm(frame[["x", "y", "z"]].to_numpy() - r_ref, axis=1)))

    # helpers

    @staticmethod
    def _lambda_gradient(x: ProjectiveState, params: TransformParams) -> np.ndarray:
        """Gradient of lambda in standard ordering (q, u, p, p_u)"""
        q_norm = np.linalg.norm(x.q)
        c = (params.m + 1.0) / params.n
        lam = ProjectiveTransformService.lagrange_multiplier(x, params)
        d_q = x.p / q_norm - lam * x.q / q_norm**2
        d_u = -c * x.pu / q_norm
        d_p = x.q / q_norm
        d_pu = -c * x.u / q_norm
        return np.concatenate([d_q, [d_u], d_p, [d_pu]])

    @staticmethod
    def _time_of_flight_checks() -> List[CheckResult]:
        worst = 0.0
        cases = {
            0.5: (0.7, 2.9, 7.5, -1.2),
            0.999999: (0.3, 1.0, 2.0),
            1.0: (0.4, np.pi / 2, 2.5),
            1.000001: (0.3, 1.0, 2.0),
            1.8: (0.5, 1.5, -1.0),
        }
        l_mag = 1.3
        for ecc, taus in cases.items():
            for tau in taus:
                closed = ClosedFormService.time_of_flight(ecc, 1.0, l_mag, tau)
                quad = ClosedFormService.time_of_flight_between(ecc, 1.0, l_mag, 0.0, tau)
                worst = max(worst, abs(closed - quad) / abs(quad))
        circular = abs(ClosedFormService.time_of_flight(0.0, 1.0, l_mag, 2.0) - l_mag**3 * 2.0)

        monotone = True
        for ecc, limit in ((0.5, 4.0 * np.pi), (1.5, 0.95 * np.arccos(-1.0 / 1.5))):
            samples = [ClosedFormService.time_of_flight(ecc, 1.0, l_mag, tau) for tau in np.linspace(0.0, limit, 200)]
            monotone = monotone and bool(np.all(np.diff(samples) > 0))
        return [
            CheckResult.below("closedform.time_of_flight_vs_quadrature", worst, 1e-10),
            CheckResult.below("closedform.time_of_flight_circular", circular, 1e-15),
            CheckResult("closedform.time_of_flight_monotone", 0.0 if monotone else 1.0, 0.5, monotone),
        ]

    @staticmethod
    def _reparameterization_check() -> CheckResult:
        """
        t-, s- and tau-propagations of one Kepler orbit pass through the same
        Cartesian states at matched physical times, read through t(s) and t(tau)
        """
        base = Scenario(
            name="reparameterization",
            elements=OrbitElements(a=1.3, e=0.2, i=0.5, omega_arg=1.1, raan=0.4, true_anomaly=0.3),
            coordinates="projective",
            parameter="t",
            periods=2.0,
            integrator=TIGHT,
        )
        expected_t = 2.0 * ElementsService.orbital_period(1.3)
        runs = []
        for parameter, coords in (("t", "projective"), ("s", "extended"), ("tau", "extended")):
            traj = ScenarioService.run(replace(base, parameter=parameter, coordinates=coords)).trajectory
            runs.append((traj, None if parameter == "t" else 8))
        clock_end = max(
            abs((traj.end if channel is None else traj.final_state[channel]) - expected_t)
            for traj, channel in runs
        )
        # clock ends differ in the last bits, stay strictly inside
        times = np.linspace(0.0, expected_t, 41)[:-1]
        residual = max(clock_end, VerificationService.trajectory_spread(runs, times))
        return CheckResult.below("conservation.reparameterization", residual, 1e-8)
