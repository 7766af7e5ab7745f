import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.models.potential import J2Model
from app.models.state import ProjectiveState
from app.services.dynamics import DynamicsService
from app.services.perturbations import PerturbationService
from app.services.projective_transform import ProjectiveTransformService
from app.services.stm import StmService
from app.utils.errors import DegenerateState, OriginSingularity

J2 = J2Model.from_constants(1.08262668e-3, 1.0, 1.0)


def test_j2_model_from_constants():
    """Test j2 = 1.5 J2 k1 R^2 and the radius check"""
    model = J2Model.from_constants(1e-3, 2.0, 3.0)
    assert model.j2 == pytest.approx(2.7e-2)
    with pytest.raises(ValueError):
        J2Model.from_constants(1e-3, 1.0, 0.0)


def test_j2_potential_examples():
    """Test equatorial and polar values and r^-3 scaling"""
    j2 = J2.j2
    assert PerturbationService.j2_potential_cartesian([1.0, 0.0, 0.0], J2) == pytest.approx(-j2 / 3)
    assert PerturbationService.j2_potential_cartesian([0.0, 0.0, 1.0], J2) == pytest.approx(2 * j2 / 3)
    r = np.array([0.3, -0.7, 0.4])
    assert PerturbationService.j2_potential_cartesian(2 * r, J2) == pytest.approx(
        PerturbationService.j2_potential_cartesian(r, J2) / 8
    )
    with pytest.raises(OriginSingularity):
        PerturbationService.j2_potential_cartesian(np.zeros(3), J2)


def test_j2_force_examples():
    """Test equatorial and polar forces"""
    j2 = J2.j2
    assert_allclose(PerturbationService.j2_force_cartesian([1.0, 0.0, 0.0], J2), [-j2, 0.0, 0.0])
    assert_allclose(PerturbationService.j2_force_cartesian([0.0, 0.0, 1.0], J2), [0.0, 0.0, 2 * j2])


def test_j2_force_is_negative_gradient(rng):
    """Test F = -dV/dr by central differences"""
    r = rng.normal(size=3) + np.array([0.0, 0.0, 1.5])
    grad = StmService.finite_difference_jacobian(
        lambda x: np.array([PerturbationService.j2_potential_cartesian(x, J2)]), r
    )[0]
    force = PerturbationService.j2_force_cartesian(r, J2)
    assert_allclose(force, -grad, rtol=1e-7, atol=1e-12)


def test_j2_generalized_examples():
    """Test equatorial and polar generalized forces"""
    j2, u = J2.j2, 1.5
    equatorial = PerturbationService.j2_generalized(ProjectiveState([1.0, 0.0, 0.0], u, [0.0, 1.0, 0.0], 0.0), J2)
    assert_allclose(equatorial.f, np.zeros(3), atol=1e-18)
    assert equatorial.fu == pytest.approx(j2 * u**2)
    polar = PerturbationService.j2_generalized(ProjectiveState([0.0, 0.0, 1.0], u, [0.0, 1.0, 0.0], 0.0), J2)
    assert_allclose(polar.f, np.zeros(3), atol=1e-18)
    assert polar.fu == pytest.approx(-2 * j2 * u**2)


def test_j2_route_equivalence(rng, off_manifold_state):
    """Test the differentiated projective term equals the pulled-back Cartesian force"""
    states = [off_manifold_state]
    for _ in range(20):
        q = rng.normal(size=3)
        states.append(ProjectiveState(q, rng.uniform(0.3, 2.0), rng.normal(size=3), rng.normal()))
    for x in states:
        analytic = PerturbationService.j2_generalized(x, J2)
        force = PerturbationService.j2_force_cartesian(ProjectiveTransformService.forward(x).r, J2)
        mapped = DynamicsService.generalized_forces(force, x)
        scale = max(np.linalg.norm(mapped.f), abs(mapped.fu))
        assert np.max(np.abs(analytic.f - mapped.f)) < 1e-13 * scale
        assert abs(analytic.fu - mapped.fu) < 1e-13 * scale


def test_j2_presimplified_gradient_is_wrong(off_manifold_state):
    """Test substituting |q| = 1 before differentiating loses the radial part"""
    x = off_manifold_state
    z = x.q[2] / np.linalg.norm(x.q)
    wrong = -2.0 * J2.j2 * x.u**3 * z * np.array([0.0, 0.0, 1.0])
    assert np.max(np.abs(wrong - PerturbationService.j2_generalized(x, J2).f)) > 1e-6


def test_j2_hamiltonian_term(off_manifold_state):
    """Test the projective term equals V1 under the forward map, with the stock values"""
    x = off_manifold_state
    r = ProjectiveTransformService.forward(x).r
    assert PerturbationService.j2_hamiltonian_term(x, J2) == pytest.approx(
        PerturbationService.j2_potential_cartesian(r, J2), rel=1e-13
    )
    u = 1.7
    equatorial = ProjectiveState([1.0, 0.0, 0.0], u, [0.0, 1.0, 0.0], 0.0)
    polar = ProjectiveState([0.0, 0.0, 1.0], u, [0.0, 1.0, 0.0], 0.0)
    assert PerturbationService.j2_hamiltonian_term(equatorial, J2) == pytest.approx(-J2.j2 * u**3 / 3)
    assert PerturbationService.j2_hamiltonian_term(polar, J2) == pytest.approx(2 * J2.j2 * u**3 / 3)


def test_j2_term_needs_positive_u():
    """Test u <= 0 raises"""
    with pytest.raises(DegenerateState):
        PerturbationService.j2_generalized(ProjectiveState([1.0, 0.0, 0.0], -1.0, [0.0, 1.0, 0.0], 0.0), J2)


def test_build_model():
    """Test each model kind and the unknown-kind error"""
    assert PerturbationService.build_model("kepler").is_central
    manev = PerturbationService.build_model("manev", 1.0, 0.2)
    assert manev.k2 == 0.2 and manev.is_central
    j2 = PerturbationService.build_model("j2", 1.0, 0.0, J2)
    assert not j2.is_central
    value, grad = j2.perturbing_potential(np.array([1.0, 0.0, 0.0]), 0.0)
    assert value == pytest.approx(-J2.j2 / 3)
    with pytest.raises(ValueError):
        PerturbationService.build_model("j3")
    with pytest.raises(ValueError):
        PerturbationService.build_model("j2")
