import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.models.state import CartesianState, ProjectiveState, TransformParams
from app.services.closed_form import ClosedFormService
from app.models.flow import KeplerFlowInput
from app.services.projective_transform import ProjectiveTransformService
from app.utils.errors import AsymptoteReached, DegenerateState, OriginSingularity

FAMILY = [TransformParams(-1, -1), TransformParams(-1, 0), TransformParams(1, 0), TransformParams(2, 0.5)]


def test_forward_unit_circle():
    """Test the unit circular configuration maps to r = e1, v = e2"""
    x = ProjectiveState([1.0, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], 0.0)
    cart = ProjectiveTransformService.forward(x)
    assert_allclose(cart.r, [1.0, 0.0, 0.0])
    assert_allclose(cart.v, [0.0, 1.0, 0.0])


def test_forward_scales_with_u():
    """Test u = 2 halves the radius and doubles the speed"""
    x = ProjectiveState([1.0, 0.0, 0.0], 2.0, [0.0, 1.0, 0.0], 0.0)
    cart = ProjectiveTransformService.forward(x)
    assert_allclose(cart.r, [0.5, 0.0, 0.0])
    assert_allclose(cart.v, [0.0, 2.0, 0.0])


def test_forward_preserves_angular_momentum(off_manifold_state):
    """Test q x p equals r x v, also off the constraint manifold"""
    cart = ProjectiveTransformService.forward(off_manifold_state)
    assert_allclose(np.cross(cart.r, cart.v), np.cross(off_manifold_state.q, off_manifold_state.p), atol=1e-14)


def test_inverse_examples():
    """Test the circular and purely radial inverse examples"""
    x = ProjectiveTransformService.inverse(CartesianState([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]))
    assert_allclose(x.q, [1.0, 0.0, 0.0])
    assert x.u == 1.0
    assert_allclose(x.p, [0.0, 1.0, 0.0])
    assert x.pu == 0.0

    radial = ProjectiveTransformService.inverse(CartesianState([2.0, 0.0, 0.0], [1.0, 0.0, 0.0]))
    assert radial.u == pytest.approx(0.5)
    assert_allclose(radial.p, np.zeros(3), atol=1e-15)
    assert radial.pu == pytest.approx(-4.0)


@pytest.mark.parametrize("params", FAMILY)
def test_round_trip(params):
    """Test forward(inverse(c)) = c for every transformation in the family"""
    cart = CartesianState([1.0, 2.0, 3.0], [0.1, -0.2, 0.05])
    back = ProjectiveTransformService.forward(ProjectiveTransformService.inverse(cart, params), params)
    assert_allclose(back.r, cart.r, rtol=1e-12)
    assert_allclose(back.v, cart.v, rtol=1e-12)


@pytest.mark.parametrize("params", FAMILY)
def test_inverse_satisfies_constraints(params):
    """Test inverse() lands on |q| = 1, lambda = 0"""
    cart = CartesianState([0.3, -1.2, 0.8], [0.4, 0.5, -0.1])
    report = ProjectiveTransformService.constraint_report(ProjectiveTransformService.inverse(cart, params), params)
    assert report.q_norm == pytest.approx(1.0, abs=1e-14)
    assert report.lam == pytest.approx(0.0, abs=1e-14)


def test_forward_rejects_degenerate_states():
    """Test u <= 0 and q = 0 raise"""
    with pytest.raises(DegenerateState):
        ProjectiveTransformService.forward(ProjectiveState([1.0, 0.0, 0.0], 0.0, [0.0, 1.0, 0.0], 0.0))
    with pytest.raises(DegenerateState):
        ProjectiveTransformService.forward(ProjectiveState(np.zeros(3), 1.0, [0.0, 1.0, 0.0], 0.0))
    with pytest.raises(OriginSingularity):
        ProjectiveTransformService.inverse(CartesianState(np.zeros(3), [0.0, 1.0, 0.0]))


def test_lagrange_multiplier_examples():
    """Test the multiplier for m = -1 and m = 0"""
    lm = ProjectiveTransformService.lagrange_multiplier
    assert lm(ProjectiveState([1.0, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], 0.0)) == 0.0
    assert lm(ProjectiveState([1.0, 0.0, 0.0], 1.0, [3.0, 1.0, 0.0], 0.0)) == pytest.approx(3.0)
    x = ProjectiveState([1.0, 0.0, 0.0], 2.0, [3.0, 0.0, 0.0], 1.0)
    assert lm(x, TransformParams(-1, 0)) == pytest.approx(5.0)


def test_constraint_report_off_manifold():
    """Test the report reads |q| directly"""
    report = ProjectiveTransformService.constraint_report(
        ProjectiveState([0.5, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], 0.0)
    )
    assert report.q_norm == 0.5


def test_lvlh_basis():
    """Test the basis on two cyclic configurations and its handedness"""
    basis = ProjectiveTransformService.lvlh_basis(ProjectiveState([1.0, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], 0.0))
    assert_allclose(np.array(basis), np.eye(3), atol=1e-15)
    t_r, t_tau, t_l = ProjectiveTransformService.lvlh_basis(
        ProjectiveState([0.0, 1.0, 0.0], 1.0, [0.0, 0.0, 1.0], 0.0)
    )
    assert_allclose(t_r, [0.0, 1.0, 0.0])
    assert_allclose(t_tau, [0.0, 0.0, 1.0], atol=1e-15)
    assert_allclose(t_l, [1.0, 0.0, 0.0])
    assert_allclose(np.cross(t_r, t_tau), t_l, atol=1e-15)


def test_perifocal_frame_circular():
    """Test a circular state has zero eccentricity vector"""
    frame = ProjectiveTransformService.perifocal_frame(
        ProjectiveState([1.0, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], 0.0), 1.0
    )
    assert frame.eccentricity == 0.0
    assert frame.semilatus_rectum == 1.0


def test_perifocal_frame_at_periapsis():
    """Test |e_vec| = e at periapsis and h is orthogonal to e with l|h| = |e|"""
    ecc = 0.4
    x = ProjectiveState([1.0, 0.0, 0.0], 1.0 + ecc, [0.0, 1.0, 0.0], 0.0)
    frame = ProjectiveTransformService.perifocal_frame(x, 1.0)
    assert frame.eccentricity == pytest.approx(ecc)
    assert np.dot(frame.e_vec, frame.h_vec) == pytest.approx(0.0, abs=1e-15)
    assert np.linalg.norm(frame.h_vec) == pytest.approx(ecc)


def test_perifocal_frame_unnormalized_l():
    """Test |h| carries the 1/l scale of the unnormalized l* when l = 2"""
    ecc, l_mag = 0.4, 2.0
    x = ProjectiveState([1.0, 0.0, 0.0], (1.0 + ecc) / l_mag**2, [0.0, l_mag, 0.0], 0.0)
    frame = ProjectiveTransformService.perifocal_frame(x, 1.0)
    assert frame.eccentricity == pytest.approx(ecc)
    assert l_mag * np.linalg.norm(frame.h_vec) == pytest.approx(ecc)
    assert np.linalg.norm(frame.h_vec) == pytest.approx(ecc / l_mag)
    assert np.dot(frame.e_vec, frame.h_vec) == pytest.approx(0.0, abs=1e-15)


def test_perifocal_frame_matches_cartesian(elliptic_cartesian, projective_state):
    """Test e_vec equals the Cartesian Laplace-Runge-Lenz vector"""
    r, v = elliptic_cartesian.r, elliptic_cartesian.v
    lrl = np.cross(v, np.cross(r, v)) - r / np.linalg.norm(r)
    frame = ProjectiveTransformService.perifocal_frame(projective_state, 1.0)
    assert_allclose(frame.e_vec, lrl, atol=1e-14)


def test_perifocal_frame_constant_along_flow(elliptic_state):
    """Test the frame at tau equals the frame at 0"""
    frame0 = ProjectiveTransformService.perifocal_frame(elliptic_state.to_projective(), 1.0)
    x = ClosedFormService.kepler_flow(KeplerFlowInput(elliptic_state), 2.6)
    frame = ProjectiveTransformService.perifocal_frame(x.to_projective(), 1.0)
    assert_allclose(frame.e_vec, frame0.e_vec, atol=1e-10)
    assert_allclose(frame.h_vec, frame0.h_vec, atol=1e-10)


def test_conic_radius():
    """Test circle, periapsis and apoapsis radii"""
    assert ProjectiveTransformService.conic_radius(1.0, 0.0, 2.3) == 1.0
    assert ProjectiveTransformService.conic_radius(1.2, 0.2, 0.0) == pytest.approx(1.0)
    assert ProjectiveTransformService.conic_radius(1.2, 0.2, np.pi) == pytest.approx(1.5)
    with pytest.raises(AsymptoteReached):
        ProjectiveTransformService.conic_radius(1.0, 2.0, np.pi)


def test_classify_eccentricity():
    """Test the branch thresholds"""
    classify = ProjectiveTransformService.classify_eccentricity
    assert classify(0.0) == "circular"
    assert classify(0.5) == "elliptic"
    assert classify(1.0) == "parabolic"
    assert classify(1.000001) == "hyperbolic"
    with pytest.raises(ValueError):
        classify(-0.1)
