from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from app.models.scenario import OrbitElements, Scenario
from app.models.state import CartesianState, TransformParams
from app.repositories.output_repository import OutputRepository, to_jsonable
from app.repositories.scenario_repository import ScenarioRepository
from app.services.elements import ElementsService
from app.services.scenario_service import ScenarioService
from app.utils.errors import ConfigError
from config.settings import Config

SCENARIO_DIR = Path(__file__).resolve().parents[1] / "config" / "scenarios"


def same_document(a, b):
    elements_a = a["scenario"].pop("elements")
    elements_b = b["scenario"].pop("elements")
    assert elements_a == pytest.approx(elements_b, rel=1e-14)
    assert a == b


def test_scenario_dict_round_trip(kepler_scenario):
    """Test from_dict(to_dict(s)) keeps every field"""
    back = Scenario.from_dict(kepler_scenario.to_dict())
    same_document(back.to_dict(), kepler_scenario.to_dict())
    assert back.elements.e == pytest.approx(0.2)
    assert back.integrator.rel_tol == 1e-12


def test_scenario_yaml_round_trip(kepler_scenario, out_dir):
    """Test save then load through the repository"""
    path = ScenarioRepository.save(kepler_scenario, out_dir / "kepler.yaml")
    loaded = ScenarioRepository.load(path)
    same_document(loaded.to_dict(), kepler_scenario.to_dict())


def test_scenario_repository_errors(out_dir):
    """Test missing files, bad YAML, non-mappings and unknown sections"""
    with pytest.raises(ConfigError):
        ScenarioRepository.load(out_dir / "missing.yaml")
    bad = out_dir / "bad.yaml"
    bad.write_text("scenario: [unclosed\n")
    with pytest.raises(ConfigError):
        ScenarioRepository.load(bad)
    listing = out_dir / "list.yaml"
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        ScenarioRepository.load(listing)
    extra = out_dir / "extra.yaml"
    extra.write_text("scenario:\n  periods: 1\nplots: {}\n")
    with pytest.raises(ConfigError):
        ScenarioRepository.load(extra)


def test_bundled_scenarios_load():
    """Test the shipped scenario documents parse"""
    j2 = ScenarioRepository.load(SCENARIO_DIR / "j2_reference.yaml")
    assert j2.model == "j2"
    kepler = ScenarioRepository.load(SCENARIO_DIR / "kepler_tau.yaml")
    assert kepler.parameter == "tau"


@pytest.mark.parametrize(
    "overrides",
    [
        {"model": "j3"},
        {"coordinates": "polar"},
        {"parameter": "x"},
        {"units": "imperial"},
        {"periods": None},
        {"span": (0.0, 1.0)},
        {"coordinates": "cartesian", "parameter": "tau"},
        {"cartesian": CartesianState([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])},
        {"gravitational_parameter": 0.0},
    ],
)
def test_scenario_validation(kepler_scenario, overrides):
    """Test inconsistent scenarios raise ConfigError"""
    with pytest.raises(ConfigError):
        replace(kepler_scenario, **overrides)


def test_from_dict_bad_values():
    """Test wrong types surface as ConfigError"""
    with pytest.raises(ConfigError):
        Scenario.from_dict({"scenario": {"elements": {"a": "far", "e": 0.1}, "periods": 1}})
    with pytest.raises(ConfigError):
        Scenario.from_dict({"scenario": {"elements": {"e": 0.1}, "periods": 1}})


def test_normalize_si(j2_scenario):
    """Test SI scenarios are rescaled to R_e = 1 and k1 = 1"""
    assert j2_scenario.units == "scaled"
    assert j2_scenario.gravitational_parameter == 1.0
    assert j2_scenario.equatorial_radius == 1.0
    assert j2_scenario.elements.a == pytest.approx(8597.67038 / Config.EARTH_RADIUS)
    assert ScenarioService.normalize(j2_scenario) is j2_scenario


def test_normalize_rescales_time_span():
    """Test an explicit t span is divided by the time unit"""
    scenario = Scenario(
        units="si",
        cartesian=CartesianState([7000.0, 0.0, 0.0], [0.0, 7.5, 0.0]),
        coordinates="cartesian",
        parameter="t",
        span=(0.0, 3600.0),
        gravitational_parameter=Config.EARTH_MU,
        equatorial_radius=Config.EARTH_RADIUS,
    )
    scaled = ScenarioService.normalize(scenario)
    time = np.sqrt(Config.EARTH_RADIUS**3 / Config.EARTH_MU)
    assert scaled.span[1] == pytest.approx(3600.0 / time)
    assert_allclose(scaled.cartesian.r, [7000.0 / Config.EARTH_RADIUS, 0.0, 0.0])


def test_resolve_span(kepler_scenario):
    """Test periods map to 2 pi in tau, the Kepler period in t and 2 pi / l in s"""
    cart = ScenarioService.initial_cartesian(kepler_scenario)
    assert ScenarioService.resolve_span(kepler_scenario, cart) == (0.0, pytest.approx(4 * np.pi))
    in_t = replace(kepler_scenario, parameter="t")
    assert ScenarioService.resolve_span(in_t, cart)[1] == pytest.approx(2 * ElementsService.orbital_period(1.3))
    in_s = replace(kepler_scenario, parameter="s")
    l_mag = np.linalg.norm(np.cross(cart.r, cart.v))
    assert ScenarioService.resolve_span(in_s, cart)[1] == pytest.approx(4 * np.pi / l_mag)
    explicit = replace(kepler_scenario, periods=None, span=(0.0, 3.0))
    assert ScenarioService.resolve_span(explicit, cart) == (0.0, 3.0)


def test_resolve_span_needs_bound_orbit():
    """Test periods on a hyperbola raise"""
    scenario = Scenario(
        elements=OrbitElements(a=-2.0, e=1.5), coordinates="projective", parameter="t", periods=1.0
    )
    with pytest.raises(ConfigError):
        ScenarioService.resolve_span(scenario, ScenarioService.initial_cartesian(scenario))


@pytest.mark.parametrize(
    "coordinates, parameter, columns",
    [
        ("cartesian", "t", ["t", "x", "y", "z", "vx", "vy", "vz"]),
        ("projective", "t", ["t", "q1", "q2", "q3", "u", "p1", "p2", "p3", "pu"]),
        ("extended", "s", ["s", "q1", "q2", "q3", "u", "p1", "p2", "p3", "pu", "t", "pt"]),
        ("projective_quasi", "tau", ["tau", "q1", "q2", "q3", "p1", "p2", "p3", "u", "w", "t"]),
    ],
)
def test_setup_columns(kepler_scenario, coordinates, parameter, columns):
    """Test the column layout of each coordinate set"""
    scenario = replace(kepler_scenario, coordinates=coordinates, parameter=parameter)
    field, y0, monitor, rate, names = ScenarioService.setup(scenario)
    assert names == columns
    assert y0.size == len(columns) - 1
    assert field(0.0, y0).shape == y0.shape
    assert (monitor is None) == (coordinates == "cartesian")


def test_setup_rejects_bad_combinations(kepler_scenario):
    """Test extended in t and quasi with a non-default transform"""
    with pytest.raises(ConfigError):
        ScenarioService.setup(replace(kepler_scenario, coordinates="extended", parameter="t"))
    with pytest.raises(ConfigError):
        ScenarioService.setup(replace(kepler_scenario, coordinates="projective_quasi", transform=TransformParams(1, 0)))


def test_run_projective_tau(kepler_scenario):
    """Test a Kepler run drops p_t, stays on the manifold and finds periapses"""
    result = ScenarioService.run(replace(kepler_scenario, output={"cartesian": True}))
    assert list(result.frame.columns) == ["tau", "q1", "q2", "q3", "u", "p1", "p2", "p3", "pu", "t"]
    assert result.frame["tau"].iloc[-1] == pytest.approx(4 * np.pi)
    assert result.drift.max_q_drift < 1e-9
    assert len(result.drift.extras["periapsis_passages"]) == 2
    # two Kepler periods in t
    assert result.frame["t"].iloc[-1] == pytest.approx(2 * ElementsService.orbital_period(1.3), rel=1e-8)
    start = ScenarioService.initial_cartesian(kepler_scenario)
    last = result.cartesian.iloc[-1]
    assert_allclose([last.x, last.y, last.z], start.r, atol=1e-8)


def test_summary(kepler_scenario):
    """Test the summary payload"""
    result = ScenarioService.run(replace(kepler_scenario, periods=0.5))
    summary = ScenarioService.summary(result)
    assert summary["scenario"] == "kepler_test"
    assert summary["end"] == pytest.approx(np.pi)
    assert summary["drift"]["samples"] == len(result.trajectory)


def test_reference_j2_scenario():
    """Test the stock Earth J2 orbit"""
    scenario = ScenarioService.reference_j2_scenario(periods=3.0, coordinates="projective", parameter="t")
    assert scenario.units == "si"
    assert scenario.periods == 3.0
    assert scenario.elements.i == pytest.approx(np.radians(20.0))
    assert scenario.output["recovery"] == "full"


def test_output_repository_csv(out_dir):
    """Test CSV layout and round-trip precision"""
    frame = pd.DataFrame({"tau": [0.0, 0.1], "u": [1.0 / 3.0, np.pi]})
    path = OutputRepository.write_frame(frame, out_dir / "nested" / "traj.csv")
    text = path.read_text()
    assert text.splitlines()[0] == "tau,u"
    assert "\r" not in text
    back = OutputRepository.read_frame(path)
    assert back["u"].tolist() == frame["u"].tolist()


def test_output_repository_json(out_dir):
    """Test numpy values serialize to plain JSON"""
    data = {"drift": np.float64(1e-12), "steps": np.int64(4), "state": np.array([1.0, 2.0])}
    path = OutputRepository.write_json(data, out_dir / "report.json")
    assert OutputRepository.read_json(path) == {"drift": 1e-12, "steps": 4, "state": [1.0, 2.0]}
    assert to_jsonable((np.float32(0.5),)) == [0.5]
