import logging
from dataclasses import dataclass, replace
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from app.models.potential import J2Model, PotentialModel
from app.models.scenario import OrbitElements, Scenario
from app.models.state import CartesianState, ExtendedState, ProjectiveState, QuasiState
from app.models.trajectory import DriftReport, Trajectory
from app.services.closed_form import ClosedFormService
from app.services.dynamics import DynamicsService
from app.services.elements import ElementsService
from app.services.perturbations import PerturbationService
from app.services.projective_transform import ProjectiveTransformService
from app.services.propagator import PropagatorService
from app.utils.errors import ConfigError
from config.settings import Config

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * np.pi
CARTESIAN_COLUMNS = ["t", "x", "y", "z", "vx", "vy", "vz"]


@dataclass
class PropagationResult:
    scenario: Scenario
    trajectory: Trajectory
    frame: pd.DataFrame
    drift: DriftReport
    cartesian: Optional[pd.DataFrame] = None


class ScenarioService:
    """Turns a scenario into a model, an initial state and a propagation run"""

    @staticmethod
    def normalize(scenario: Scenario) -> Scenario:
        """
        Rescale SI input (km, s) to units with R_e = 1 and k1 = 1.
        Spans in t and s are rescaled; tau is already dimensionless.
        """
        if scenario.units == "scaled":
            return scenario
        length = scenario.equatorial_radius
        mu = scenario.gravitational_parameter
        time = np.sqrt(length**3 / mu)
        velocity = length / time

        elements = cartesian = None
        if scenario.elements is not None:
            elements = scenario.elements.scaled(length)
        else:
            cartesian = CartesianState(scenario.cartesian.r / length, scenario.cartesian.v / velocity)
        span = scenario.span
        if span is not None:
            if scenario.parameter == "t":
                span = (span[0] / time, span[1] / time)
            elif scenario.parameter == "s":
                span = (span[0] * length**2 / time, span[1] * length**2 / time)
        logger.info(f"Normalized SI scenario {scenario.name}: length {length} km, time {time:.6g} s")
        return replace(
            scenario,
            units="scaled",
            elements=elements,
            cartesian=cartesian,
            span=span,
            gravitational_parameter=1.0,
            manev_coefficient=scenario.manev_coefficient / (mu * length),
            equatorial_radius=1.0,
        )

    @staticmethod
    def build_model(scenario: Scenario) -> PotentialModel:
        j2_model = None
        if scenario.model == "j2":
            j2_model = J2Model.from_constants(
                scenario.j2_coefficient,
                scenario.gravitational_parameter,
                scenario.equatorial_radius,
            )
        return PerturbationService.build_model(
            scenario.model,
            scenario.gravitational_parameter,
            scenario.manev_coefficient,
            j2_model,
        )

    @staticmethod
    def initial_cartesian(scenario: Scenario) -> CartesianState:
        if scenario.cartesian is not None:
            return scenario.cartesian
        return ElementsService.elements_to_cartesian(
            scenario.elements, scenario.gravitational_parameter
        )

    @staticmethod
    def resolve_span(scenario: Scenario, cart: CartesianState) -> Tuple[float, float]:
        """Explicit span, or a number of Kepler periods in the run's parameter"""
        if scenario.span is not None:
            return scenario.span
        k1 = scenario.gravitational_parameter
        if scenario.parameter == "tau":
            return 0.0, TWO_PI * scenario.periods
        el = ElementsService.cartesian_to_elements(cart, k1)
        if el.e >= 1.0:
            raise ConfigError("periods needs a bound orbit; give an explicit span")
        if scenario.parameter == "t":
            return 0.0, ElementsService.orbital_period(el.a, k1) * scenario.periods
        # ds = dtau / l over one revolution
        l_mag = np.linalg.norm(np.cross(cart.r, cart.v))
        return 0.0, TWO_PI / l_mag * scenario.periods

    @staticmethod
    def setup(scenario: Scenario):
        """
        Vector field, initial array, monitor, radial-rate function and
        column names for the scenario's coordinates and parameter
        """
        model = ScenarioService.build_model(scenario)
        cart = ScenarioService.initial_cartesian(scenario)
        params = scenario.transform
        coords, parameter = scenario.coordinates, scenario.parameter
        labels = ["q1", "q2", "q3", "u", "p1", "p2", "p3", "pu"]

        if coords == "cartesian":
            field = DynamicsService.cartesian_field(model)
            rate = ScenarioService._cartesian_radial_rate
            return field, cart.to_array(), None, rate, CARTESIAN_COLUMNS

        if coords == "projective_quasi":
            if not params.is_default:
                raise ConfigError("Quasi coordinates use n = m = -1")
            x0 = ProjectiveTransformService.inverse(cart).to_quasi()
            field = DynamicsService.quasi_field(model, parameter)
            y0 = x0.to_array()
            columns = [parameter, "q1", "q2", "q3", "p1", "p2", "p3", "u", "w"]
            if parameter != "t":
                y0 = np.concatenate([y0, [0.0]])
                columns.append("t")
            monitor = PropagatorService.projective_monitor("quasi")
            return field, y0, monitor, lambda y: y[7], columns

        x0 = ProjectiveTransformService.inverse(cart, params)
        monitor = PropagatorService.projective_monitor("standard", params)

        def rate(y):
            return y[3] ** 2 * y[7]

        if parameter == "t":
            if coords == "extended":
                raise ConfigError("Extended coordinates need the s or tau parameter")
            field = DynamicsService.time_field(params, model)
            return field, x0.to_array(), monitor, rate, ["t"] + labels

        pt0 = -DynamicsService.hamiltonian_projective(x0, params, model, 0.0)
        y0 = ExtendedState(x0, 0.0, pt0).to_array()
        if parameter == "s":
            field = DynamicsService.s_field(params, model, scenario.raw_extended)
        else:
            field = DynamicsService.tau_field(params, model, scenario.raw_extended)
        columns = [parameter] + labels + ["t", "pt"]
        return field, y0, monitor, rate, columns

    @staticmethod
    def run(scenario: Scenario) -> PropagationResult:
        scenario = ScenarioService.normalize(scenario)
        field, y0, monitor, rate, columns = ScenarioService.setup(scenario)
        cart = ScenarioService.initial_cartesian(scenario)
        span = ScenarioService.resolve_span(scenario, cart)
        logger.info(
            f"Propagating {scenario.name}: {scenario.model} in {scenario.coordinates}/"
            f"{scenario.parameter} over {span}"
        )
        traj, drift = PropagatorService.propagate_with_monitor(
            field, y0, span, scenario.integrator, monitor, scenario.parameter
        )

        data = np.column_stack([traj.params, traj.states])
        frame = pd.DataFrame(data, columns=columns)
        if scenario.coordinates == "projective" and scenario.parameter != "t":
            frame = frame.drop(columns=["pt"])

        passages = PropagatorService.find_periapses(traj, rate)
        drift.extras["periapsis_passages"] = passages
        drift.extras["steps"] = len(traj) - 1
        drift.extras["rejected_steps"] = traj.rejected

        result = PropagationResult(scenario, traj, frame, drift)
        if scenario.output.get("cartesian", False):
            mode = scenario.output.get("recovery", "simplified")
            result.cartesian = ScenarioService.recover_frame(scenario, traj, mode)
        return result

    @staticmethod
    def recover_frame(scenario: Scenario, traj: Trajectory, mode: str = "simplified") -> pd.DataFrame:
        """Cartesian states and physical time for every accepted step"""
        rows: List[List[float]] = []
        recover = ScenarioService._recovery(scenario, mode)
        for value, y in zip(traj.params, traj.states):
            t, cart = recover(value, y)
            rows.append([t, *cart.r, *cart.v])
        return pd.DataFrame(rows, columns=CARTESIAN_COLUMNS)

    @staticmethod
    def _recovery(scenario: Scenario, mode: str) -> Callable[[float, np.ndarray], Tuple[float, CartesianState]]:
        coords, parameter = scenario.coordinates, scenario.parameter
        params = scenario.transform

        if coords == "cartesian":
            return lambda value, y: (value, CartesianState.from_array(y))

        if coords == "projective_quasi":

            def quasi(value, y):
                t = value if parameter == "t" else y[8]
                return t, ClosedFormService.recover_cartesian(QuasiState.from_array(y[0:8]), mode)

            return quasi

        def standard(value, y):
            t = value if parameter == "t" else y[8]
            state = ProjectiveState.from_array(y[0:8])
            if mode == "simplified" and params.is_default:
                return t, ClosedFormService.recover_cartesian(state.to_quasi(), mode)
            return t, ProjectiveTransformService.forward(state, params)

        return standard

    @staticmethod
    def _cartesian_radial_rate(y: np.ndarray) -> float:
        # w = -dr/dt
        return -float(np.dot(y[0:3], y[3:6]) / np.linalg.norm(y[0:3]))

    @staticmethod
    def summary(result: PropagationResult) -> Dict:
        final = result.trajectory.final_state
        return {
            "scenario": result.scenario.name,
            "parameter": result.scenario.parameter,
            "end": result.trajectory.end,
            "final_state": final.tolist(),
            "drift": result.drift.to_dict(),
        }

    @staticmethod
    def reference_j2_scenario(
        periods: float = Config.VERIFY_PERIODS,
        coordinates: str = "extended",
        parameter: str = "tau",
        raw_extended: bool = False,
    ) -> Scenario:
        """Earth J2 test orbit: a = 8597.67038 km, e = 0.2, i = 20, w = 70, RAAN = 135 deg"""
        return Scenario(
            name="j2_reference",
            units="si",
            elements=OrbitElements.from_degrees(
                {"a": 8597.67038, "e": 0.2, "i": 20.0, "omega": 70.0, "raan": 135.0, "f": 0.0}
            ),
            coordinates=coordinates,
            parameter=parameter,
            periods=periods,
            model="j2",
            gravitational_parameter=Config.EARTH_MU,
            j2_coefficient=Config.EARTH_J2,
            equatorial_radius=Config.EARTH_RADIUS,
            raw_extended=raw_extended,
            output={"cartesian": True, "recovery": "full"},
        )
