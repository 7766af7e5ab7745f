import numpy as np
import pytest
from numpy.testing import assert_allclose

from app.models.flow import KeplerFlowInput, ManevFlowInput
from app.models.potential import GeneralizedForce, J2Model, PotentialModel
from app.models.state import CartesianState, ExtendedState, ProjectiveState, QuasiState, TransformParams
from app.services.closed_form import ClosedFormService
from app.services.dynamics import DynamicsService
from app.services.perturbations import PerturbationService
from app.services.projective_transform import ProjectiveTransformService
from app.utils.errors import ImaginaryFrequency

UNIT_CIRCLE = ProjectiveState([1.0, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], 0.0)


def j2_model():
    return PerturbationService.j2_potential_model(J2Model.from_constants(1.08262668e-3, 1.0, 1.0))


def test_hamiltonian_cartesian_examples():
    """Test vis-viva, the empty potential and the Manev term"""
    circle = CartesianState([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    assert DynamicsService.hamiltonian_cartesian(circle, PotentialModel()) == pytest.approx(-0.5)
    rest = CartesianState([1.0, 0.0, 0.0], np.zeros(3))
    assert DynamicsService.hamiltonian_cartesian(rest, PotentialModel(k1=0.0)) == 0.0
    assert DynamicsService.hamiltonian_cartesian(rest, PotentialModel(k1=1.0, k2=0.1)) == pytest.approx(-1.05)


def test_hamiltonian_projective_unit_circle():
    """Test H = l^2/2 - 1 on the unit circle"""
    assert DynamicsService.hamiltonian_projective(UNIT_CIRCLE) == pytest.approx(-0.5)


@pytest.mark.parametrize("params", [TransformParams(-1, -1), TransformParams(-1, 0), TransformParams(1, 0)])
def test_hamiltonian_substitution_identity(off_manifold_state, params):
    """Test H(x) = K(forward(x)) off the manifold and under J2"""
    x = off_manifold_state
    model = j2_model()
    cart = ProjectiveTransformService.forward(x, params)
    assert DynamicsService.hamiltonian_projective(x, params, model) == pytest.approx(
        DynamicsService.hamiltonian_cartesian(cart, model), rel=1e-13
    )


def test_generalized_forces_examples():
    """Test radial annihilation, zero force and the tangential example"""
    x = ProjectiveState([1.0, 0.0, 0.0], 2.0, [0.0, 1.0, 0.0], 0.0)
    radial = DynamicsService.generalized_forces(5.0 * x.q, x)
    assert_allclose(radial.f, np.zeros(3), atol=1e-15)
    assert radial.fu == pytest.approx(-5.0 / 4.0)

    zero = DynamicsService.generalized_forces(np.zeros(3), x)
    assert not zero.f.any() and zero.fu == 0.0

    tangential = DynamicsService.generalized_forces([0.0, 1.0, 0.0], x)
    assert_allclose(tangential.f, [0.0, 0.5, 0.0])
    assert tangential.fu == 0.0


def test_rhs_time_circular_equilibrium():
    """Test the radial subsystem is at rest on the unit circle"""
    deriv = DynamicsService.rhs_time(UNIT_CIRCLE)
    assert deriv[3] == pytest.approx(0.0, abs=1e-15)
    assert deriv[7] == pytest.approx(0.0, abs=1e-15)


def test_rhs_time_pu_rate():
    """Test p_u' = -l^2 + k1 at u = 1 for k1 = 2"""
    deriv = DynamicsService.rhs_time(UNIT_CIRCLE, model=PotentialModel(k1=2.0))
    assert deriv[7] == pytest.approx(1.0)


def test_rhs_time_conserves_angular_momentum(off_manifold_state):
    """Test d(q x p)/dt = 0 for a central field"""
    x = off_manifold_state
    deriv = DynamicsService.rhs_time(x)
    rate = np.cross(deriv[0:3], x.p) + np.cross(x.q, deriv[4:7])
    assert_allclose(rate, np.zeros(3), atol=1e-14)


def test_rhs_time_matches_cartesian_field(projective_state):
    """Test the pushed-forward projective velocity equals the Cartesian one"""
    model = j2_model()
    x = projective_state
    deriv = DynamicsService.rhs_time(x, model=model)
    eps = 1e-7
    ahead = ProjectiveState.from_array(x.to_array() + eps * deriv)
    behind = ProjectiveState.from_array(x.to_array() - eps * deriv)
    r_dot = (ProjectiveTransformService.forward(ahead).r - ProjectiveTransformService.forward(behind).r) / (2 * eps)
    cart = ProjectiveTransformService.forward(x)
    assert_allclose(r_dot, cart.v, atol=1e-8)


def test_rhs_s_unperturbed():
    """Test q' = -l*q independent of u, t' = 1/u^2 and p_t' = 0"""
    x = ProjectiveState([1.0, 0.0, 0.0], 2.0, [0.0, 1.5, 0.0], 0.3)
    deriv = DynamicsService.rhs_s(ExtendedState(x, 0.0, 0.0))
    assert_allclose(deriv[0:3], [0.0, 1.5, 0.0])
    assert deriv[8] == pytest.approx(0.25)
    assert deriv[9] == 0.0


def test_rhs_tau_is_rhs_s_over_l():
    """Test an l = 2 state halves every component"""
    x = ProjectiveState([1.0, 0.0, 0.0], 1.0, [0.0, 2.0, 0.0], 0.1)
    xe = ExtendedState(x, 0.0, 0.0)
    assert_allclose(DynamicsService.rhs_tau(xe), 0.5 * DynamicsService.rhs_s(xe))
    assert DynamicsService.rhs_tau(ExtendedState(UNIT_CIRCLE, 0.0, 0.0))[8] == pytest.approx(1.0)


def test_raw_extended_conserves_extended_hamiltonian(projective_state):
    """Test the raw s-flow keeps r^2 (H + p_t) stationary at H + p_t = 0"""
    model = j2_model()
    x = projective_state
    pt = -DynamicsService.hamiltonian_projective(x, model=model)
    raw = DynamicsService.rhs_s(ExtendedState(x, 0.0, pt), model=model, raw_extended=True)
    default = DynamicsService.rhs_s(ExtendedState(x, 0.0, pt), model=model)
    assert_allclose(raw, default, atol=1e-13)


def test_rhs_quasi_examples():
    """Test w' vanishes on a circle and equals -1 at u = 2, l = 1"""
    circle = QuasiState([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0, 0.0)
    assert DynamicsService.rhs_quasi(circle)[7] == pytest.approx(0.0)
    x = QuasiState([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], 2.0, 0.0)
    assert DynamicsService.rhs_quasi(x)[7] == pytest.approx(-1.0)


def test_rhs_quasi_matches_chain_rule(projective_state):
    """Test w' agrees with 2 u u' p_u + u^2 p_u' from the canonical field"""
    model = j2_model()
    x = projective_state
    xe = ExtendedState(x, 0.0, -DynamicsService.hamiltonian_projective(x, model=model))
    canonical = DynamicsService.rhs_s(xe, model=model)
    quasi = DynamicsService.rhs_quasi(x.to_quasi(), model, "s")
    w_prime = 2.0 * x.u * canonical[3] * x.pu + x.u**2 * canonical[7]
    assert quasi[7] == pytest.approx(w_prime, rel=1e-12)
    assert quasi[6] == pytest.approx(canonical[3], rel=1e-12)
    assert_allclose(quasi[0:3], canonical[0:3], atol=1e-14)


def test_rhs_quasi_parameters(elliptic_state):
    """Test tau divides by l and t multiplies by u^2"""
    s = DynamicsService.rhs_quasi(elliptic_state, parameter="s")
    l_mag = np.linalg.norm(np.cross(elliptic_state.q, elliptic_state.p))
    assert_allclose(DynamicsService.rhs_quasi(elliptic_state, parameter="tau"), s / l_mag)
    assert_allclose(DynamicsService.rhs_quasi(elliptic_state, parameter="t"), s * elliptic_state.u**2)
    with pytest.raises(ValueError):
        DynamicsService.rhs_quasi(elliptic_state, parameter="x")


def test_angular_momentum_rates():
    """Test zero force and a force along q give no rate"""
    x = ProjectiveState([1.0, 0.0, 0.0], 1.0, [0.0, 1.0, 0.0], 0.0)
    ldot, ldot_mag, pdot_mag = DynamicsService.angular_momentum_rates(x, GeneralizedForce(np.zeros(3), 0.0))
    assert not ldot.any() and ldot_mag == 0.0 and pdot_mag == 0.0
    ldot, _, _ = DynamicsService.angular_momentum_rates(x, GeneralizedForce(np.array([2.0, 0.0, 0.0]), 0.0))
    assert not ldot.any()


def test_frequency_pair():
    """Test omega and varpi, and l^2 <= k2 raising"""
    pair = DynamicsService.frequency_pair(2.0, 3.0)
    assert pair.omega == pytest.approx(1.0)
    assert pair.varpi == pytest.approx(0.5)
    assert pair.precession_per_radial_period == pytest.approx(2 * np.pi)
    with pytest.raises(ImaginaryFrequency):
        DynamicsService.frequency_pair(1.0, 1.0)


def test_second_order_residual_kepler_flow(elliptic_state):
    """Test the oscillator residuals vanish along the closed-form flow"""
    tau, h = 1.3, 1e-4
    flow = lambda t: ClosedFormService.kepler_flow(KeplerFlowInput(elliptic_state), t)
    x, ahead, behind = flow(tau), flow(tau + h), flow(tau - h)
    q_dd = (ahead.q - 2 * x.q + behind.q) / h**2
    u_dd = (ahead.u - 2 * x.u + behind.u) / h**2
    res_q, res_u = DynamicsService.second_order_residual(x.to_projective(), q_dd, u_dd, parameter="tau")
    assert_allclose(res_q, np.zeros(3), atol=1e-6)
    assert res_u == pytest.approx(0.0, abs=1e-6)


def test_second_order_residual_circular_equilibrium():
    """Test exact zero for the resting circle in s"""
    res_q, res_u = DynamicsService.second_order_residual(UNIT_CIRCLE, -UNIT_CIRCLE.q, 0.0)
    assert not res_q.any()
    assert res_u == 0.0


def test_second_order_residual_manev(elliptic_state):
    """Test the u residual along the Manev closed form"""
    k2 = 0.2
    model = PotentialModel(k1=1.0, k2=k2)
    tau, h = 0.8, 1e-4
    flow = lambda t: ClosedFormService.manev_flow(ManevFlowInput(elliptic_state, 1.0, k2), t)
    x, ahead, behind = flow(tau), flow(tau + h), flow(tau - h)
    u_dd = (ahead.u - 2 * x.u + behind.u) / h**2
    _, res_u = DynamicsService.second_order_residual(x.to_projective(), np.zeros(3), u_dd, model, "tau")
    assert res_u == pytest.approx(0.0, abs=1e-6)
