import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vbett import (
    ConfigError,
    ExtentBelief,
    GaussianKinematics,
    ModelConfig,
    OrientationBelief,
    TargetBelief,
    constant_velocity_model,
    time_update,
)
from vbett.time_update import ALPHA_FLOOR

from conftest import H2, random_belief, random_spd


def cfg_with(F, Q, gamma=1.0):
    return ModelConfig(H=H2, R=np.eye(2), s=1.0, F=F, Q=Q, gamma=gamma)


def test_identity_dynamics_is_identity(rng):
    b = random_belief(rng)
    out = time_update(b, cfg_with(np.eye(5), np.zeros((5, 5))))
    np.testing.assert_array_equal(out.kinematics.mean, b.kinematics.mean)
    np.testing.assert_allclose(out.kinematics.cov, b.kinematics.cov, rtol=1e-15)
    assert out.orientation == b.orientation
    np.testing.assert_array_equal(out.extent.alpha, b.extent.alpha)
    np.testing.assert_array_equal(out.extent.beta, b.extent.beta)


def test_forgetting_example():
    b = TargetBelief(GaussianKinematics(np.zeros(4), np.eye(4)), OrientationBelief(0.0, 0.1), ExtentBelief([7.0, 7.0], [10.0, 20.0]))
    out = time_update(b, cfg_with(np.eye(5), np.zeros((5, 5)), gamma=0.99))
    np.testing.assert_allclose(out.extent.alpha, [6.93, 6.93], rtol=1e-15)
    np.testing.assert_allclose(out.extent.beta, [9.9, 19.8], rtol=1e-15)


def test_alpha_floor():
    b = TargetBelief(GaussianKinematics(np.zeros(4), np.eye(4)), OrientationBelief(0.0, 0.1), ExtentBelief([1.01, 3.0], [1.0, 1.0]))
    out = time_update(b, cfg_with(np.eye(5), np.zeros((5, 5)), gamma=0.5))
    np.testing.assert_array_equal(out.extent.alpha, [ALPHA_FLOOR, 1.5])


def test_cv_model_advances_position():
    F, Q = constant_velocity_model(0.1)
    b = TargetBelief(GaussianKinematics([1.0, 2.0, 50.0, -3.0], np.eye(4)), OrientationBelief(0.2, 0.1), ExtentBelief([2.0, 2.0], [1.0, 1.0]))
    out = time_update(b, cfg_with(F, Q))
    np.testing.assert_allclose(out.kinematics.mean, [6.0, 1.7, 50.0, -3.0])
    assert out.orientation.mean == 0.2
    assert out.orientation.var == pytest.approx(0.11)


def test_cv_model_structure():
    F, Q = constant_velocity_model(2.0, sigma=3.0, theta_var=0.5)
    assert F.shape == Q.shape == (5, 5)
    np.testing.assert_array_equal(F[:2, 2:4], 2.0 * np.eye(2))
    np.testing.assert_allclose(Q[0, 0], 9.0 * 8.0 / 3.0)
    np.testing.assert_allclose(Q[0, 2], 9.0 * 2.0)
    assert Q[4, 4] == 0.5
    assert np.all(np.linalg.eigvalsh(Q) > 0)


def test_dimension_mismatch(rng):
    b = TargetBelief(GaussianKinematics(np.zeros(6), np.eye(6)), OrientationBelief(0.0, 0.1), ExtentBelief([2.0, 2.0], [1.0, 1.0]))
    F, Q = constant_velocity_model(1.0)
    with pytest.raises(ConfigError):
        time_update(b, cfg_with(F, Q))


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), gamma=st.floats(0.5, 1.0))
def test_prediction_properties(seed, gamma):
    rng = np.random.default_rng(seed)
    b = random_belief(rng)
    F = np.eye(5) + 0.3 * rng.normal(size=(5, 5))
    F[:4, 4] = F[4, :4] = 0.0
    Q = random_spd(rng, 5, 0.1)
    Q[:4, 4] = Q[4, :4] = 0.0
    out = time_update(b, cfg_with(F, Q, gamma))
    P = out.kinematics.cov
    FPF = F[:4, :4] @ b.kinematics.cov @ F[:4, :4].T
    assert np.linalg.eigvalsh(P - FPF)[0] > -1e-9 * np.max(np.abs(P))
    # forgetting scales the mode beta/(alpha+1) as gamma*beta/(gamma*alpha+1)
    a0, b0 = b.extent.alpha, b.extent.beta
    np.testing.assert_allclose(out.extent.beta / (out.extent.alpha + 1), gamma * b0 / (np.maximum(gamma * a0, ALPHA_FLOOR) + 1), rtol=1e-14)


def test_gamma_one_keeps_extent(rng):
    b = random_belief(rng)
    F, Q = constant_velocity_model(1.0)
    out = time_update(b, cfg_with(F, Q, 1.0))
    np.testing.assert_array_equal(out.extent.alpha, b.extent.alpha)
    np.testing.assert_array_equal(out.extent.beta, b.extent.beta)
