import json
import os
from dataclasses import replace

os.environ.setdefault("REGPROP_PROGRESS", "0")

import numpy as np
import pytest
from unittest.mock import patch

from app import create_app
from app.models.scenario import OrbitElements, Scenario
from app.models.state import CartesianState, ProjectiveState
from app.models.trajectory import IntegratorConfig
from app.repositories.scenario_repository import ScenarioRepository
from app.services.elements import ElementsService
from app.services.projective_transform import ProjectiveTransformService
from app.services.scenario_service import ScenarioService


@pytest.fixture(scope="function")
def rng():
    """Seeded generator so random-state tests are reproducible"""
    return np.random.default_rng(20240611)


@pytest.fixture(scope="module")
def circular_state():
    """Unit circular orbit, k1 = 1"""
    return CartesianState([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])


@pytest.fixture(scope="module")
def elliptic_cartesian():
    """e = 0.3 orbit with l = 1, away from periapsis and out of plane"""
    el = OrbitElements(a=1.0 / (1.0 - 0.09), e=0.3, i=0.4, omega_arg=0.5, raan=0.6, true_anomaly=0.7)
    return ElementsService.elements_to_cartesian(el)


@pytest.fixture(scope="module")
def elliptic_state(elliptic_cartesian):
    """The e = 0.3 orbit as a (q, p, u, w) state"""
    return ProjectiveTransformService.inverse(elliptic_cartesian).to_quasi()


@pytest.fixture(scope="module")
def projective_state(elliptic_cartesian):
    return ProjectiveTransformService.inverse(elliptic_cartesian)


@pytest.fixture(scope="module")
def off_manifold_state(elliptic_state):
    """|q| != 1 and q.p != 0"""
    x = elliptic_state
    return ProjectiveState(1.3 * x.q, x.u, x.p + 0.2 * x.q, x.w / x.u**2)


@pytest.fixture(scope="module")
def kepler_scenario():
    """Scaled Kepler orbit propagated in tau over two periods"""
    return Scenario(
        name="kepler_test",
        elements=OrbitElements(a=1.3, e=0.2, i=0.5, omega_arg=1.1, raan=0.4, true_anomaly=0.3),
        coordinates="projective",
        parameter="tau",
        periods=2.0,
        integrator=IntegratorConfig(rel_tol=1e-12, abs_tol=1e-12),
    )


@pytest.fixture(scope="module")
def j2_scenario():
    """Earth J2 orbit over two periods, normalized to R_e = 1, k1 = 1"""
    return ScenarioService.normalize(ScenarioService.reference_j2_scenario(periods=2.0))


@pytest.fixture(scope="function")
def out_dir(tmp_path):
    path = tmp_path / "output"
    path.mkdir()
    return path


@pytest.fixture(scope="function")
def mock_scenario_service():
    """Mock the ScenarioService seen by the propagate controller"""
    with patch("app.controllers.propagate_controller.ScenarioService") as mock:
        yield mock


@pytest.fixture(scope="function")
def mock_verification_service():
    """Mock the VerificationService seen by the verify controller"""
    with patch("app.controllers.verify_controller.VerificationService") as mock:
        mock.suites.return_value = {"roundtrip": None, "stm": None}
        yield mock


@pytest.fixture(scope="function")
def kepler_config(kepler_scenario, out_dir):
    """Half-period Kepler scenario saved as YAML"""
    return ScenarioRepository.save(replace(kepler_scenario, periods=0.5), out_dir / "kepler.yaml")


@pytest.fixture(scope="function")
def cli(capsys):
    """Run the command tree and decode the JSON it prints"""
    app = create_app()

    def invoke(*argv):
        code = app.run([str(arg) for arg in argv])
        return code, json.loads(capsys.readouterr().out)

    return invoke
