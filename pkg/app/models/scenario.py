from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from app.models.state import CartesianState, TransformParams
from app.models.trajectory import IntegratorConfig
from app.utils.errors import ConfigError

MODEL_KINDS = ("kepler", "manev", "j2")
COORDINATES = ("cartesian", "projective", "projective_quasi", "extended")
PARAMETERS = ("t", "s", "tau")
UNITS = ("scaled", "si")


@dataclass(frozen=True)
class OrbitElements:
    """
    Classical elements, angles in radians. For e > 1 the semi-major axis
    is negative; for a parabola a holds the periapsis radius.
    """

    a: float
    e: float
    i: float = 0.0
    omega_arg: float = 0.0
    raan: float = 0.0
    true_anomaly: float = 0.0

    def __post_init__(self):
        if self.e < 0:
            raise ValueError(f"Eccentricity must be non-negative, got {self.e}")
        if self.e < 1 and self.a <= 0:
            raise ValueError(f"Elliptic orbits need a > 0, got {self.a}")

    @classmethod
    def from_degrees(cls, values: Dict[str, float]) -> "OrbitElements":
        return cls(
            a=float(values["a"]),
            e=float(values["e"]),
            i=np.radians(float(values.get("i", 0.0))),
            omega_arg=np.radians(float(values.get("omega", 0.0))),
            raan=np.radians(float(values.get("raan", 0.0))),
            true_anomaly=np.radians(float(values.get("f", 0.0))),
        )

    def to_degrees(self) -> Dict[str, float]:
        return {
            "a": float(self.a),
            "e": float(self.e),
            "i": float(np.degrees(self.i)),
            "omega": float(np.degrees(self.omega_arg)),
            "raan": float(np.degrees(self.raan)),
            "f": float(np.degrees(self.true_anomaly)),
        }

    def semilatus_rectum(self) -> float:
        if abs(self.e - 1.0) < 1e-12:
            return 2.0 * abs(self.a)
        return abs(self.a) * abs(1.0 - self.e**2)

    def scaled(self, length: float) -> "OrbitElements":
        return OrbitElements(
            self.a / length, self.e, self.i, self.omega_arg, self.raan, self.true_anomaly
        )


@dataclass
class Scenario:
    """One propagation run: initial state, model, coordinates and outputs"""

    name: str = "scenario"
    units: str = "scaled"
    elements: Optional[OrbitElements] = None
    cartesian: Optional[CartesianState] = None
    coordinates: str = "projective"
    parameter: str = "tau"
    span: Optional[Tuple[float, float]] = None
    periods: Optional[float] = None
    model: str = "kepler"
    gravitational_parameter: float = 1.0
    manev_coefficient: float = 0.0
    j2_coefficient: float = 0.0
    equatorial_radius: float = 1.0
    transform: TransformParams = field(default_factory=TransformParams)
    raw_extended: bool = False
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    output: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.units not in UNITS:
            raise ConfigError(f"Unknown units {self.units}")
        if self.model not in MODEL_KINDS:
            raise ConfigError(f"Unknown model kind {self.model}")
        if self.coordinates not in COORDINATES:
            raise ConfigError(f"Unknown coordinate set {self.coordinates}")
        if self.parameter not in PARAMETERS:
            raise ConfigError(f"Unknown evolution parameter {self.parameter}")
        if (self.elements is None) == (self.cartesian is None):
            raise ConfigError("Give exactly one of elements or cartesian initial conditions")
        if (self.span is None) == (self.periods is None):
            raise ConfigError("Give exactly one of span or periods")
        if self.coordinates == "cartesian" and self.parameter != "t":
            raise ConfigError("Cartesian propagation runs in t only")
        if self.gravitational_parameter <= 0 or self.equatorial_radius <= 0:
            raise ConfigError("gravitational_parameter and equatorial_radius must be positive")

    def to_dict(self) -> Dict[str, Any]:
        scenario: Dict[str, Any] = {
            "name": self.name,
            "units": self.units,
            "coordinates": self.coordinates,
            "parameter": self.parameter,
        }
        if self.elements is not None:
            scenario["elements"] = self.elements.to_degrees()
        else:
            scenario["cartesian"] = {
                "r": self.cartesian.r.tolist(),
                "v": self.cartesian.v.tolist(),
            }
        if self.span is not None:
            scenario["span"] = [float(self.span[0]), float(self.span[1])]
        else:
            scenario["periods"] = float(self.periods)
        return {
            "scenario": scenario,
            "model": {
                "kind": self.model,
                "gravitational_parameter": self.gravitational_parameter,
                "manev_coefficient": self.manev_coefficient,
                "j2_coefficient": self.j2_coefficient,
                "equatorial_radius": self.equatorial_radius,
                "n": self.transform.n,
                "m": self.transform.m,
                "raw_extended": self.raw_extended,
            },
            "integrator": self.integrator.to_dict(),
            "output": dict(self.output),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Scenario":
        try:
            section = data.get("scenario") or {}
            model = data.get("model") or {}
            integrator = data.get("integrator") or {}
            elements = cartesian = None
            if "elements" in section:
                elements = OrbitElements.from_degrees(section["elements"])
            if "cartesian" in section:
                cartesian = CartesianState(section["cartesian"]["r"], section["cartesian"]["v"])
            span = section.get("span")
            max_step = integrator.get("max_step")
            return cls(
                name=section.get("name", "scenario"),
                units=section.get("units", "scaled"),
                elements=elements,
                cartesian=cartesian,
                coordinates=section.get("coordinates", "projective"),
                parameter=section.get("parameter", "tau"),
                span=None if span is None else (float(span[0]), float(span[1])),
                periods=None if section.get("periods") is None else float(section["periods"]),
                model=model.get("kind", "kepler"),
                gravitational_parameter=float(model.get("gravitational_parameter", 1.0)),
                manev_coefficient=float(model.get("manev_coefficient", 0.0)),
                j2_coefficient=float(model.get("j2_coefficient", 0.0)),
                equatorial_radius=float(model.get("equatorial_radius", 1.0)),
                transform=TransformParams(float(model.get("n", -1)), float(model.get("m", -1))),
                raw_extended=bool(model.get("raw_extended", False)),
                integrator=IntegratorConfig(
                    rel_tol=float(integrator.get("rel_tol", IntegratorConfig.rel_tol)),
                    abs_tol=float(integrator.get("abs_tol", IntegratorConfig.abs_tol)),
                    initial_step=integrator.get("initial_step"),
                    max_step=np.inf if max_step is None else float(max_step),
                    max_steps=int(integrator.get("max_steps", IntegratorConfig.max_steps)),
                ),
                output=dict(data.get("output") or {}),
            )
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"Invalid scenario document: {str(e)}") from e


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    # checks that must exceed the tolerance (non-symplectic STM, Theta vs Phi)
    expect_above: bool = False

    @classmethod
    def below(cls, name: str, residual: float, tolerance: float) -> "CheckResult":
        residual = float(residual)
        return cls(name, residual, tolerance, bool(np.isfinite(residual) and residual < tolerance))

    @classmethod
    def above(cls, name: str, residual: float, tolerance: float) -> "CheckResult":
        residual = float(residual)
        return cls(name, residual, tolerance, bool(residual > tolerance), expect_above=True)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }
