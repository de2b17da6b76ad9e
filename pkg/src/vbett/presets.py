"""Shipped scenario presets.

``cv-*``: nearly-constant-velocity target, T = 0.1 s, sigma = 1,
heading random-walk variance 0.01, R = 5 I, X_true = diag(50, 600), ten
measurements per scan on average, alpha0 = (2, 2), beta0 = (100, 100),
forgetting factor 0.99.

``turns-*``: 50 km/h target on a path of straight legs and 45/90/90 degree
turns, twenty measurements per scan on average, R = 400 I, semi-axes 170 m and
40 m, prior semi-axes 200 m and 90 m (alpha0 = 5, beta0 = (400^2, 180^2)).
The leg lengths, sample time, process noise and prior covariance of this
scenario are our own choices.

``single-update-oracle``: one update of a target whose prior is 20 m off in
both coordinates and rotated by 90 degrees, against ten Gaussian measurements.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.linalg import block_diag

from .core import ExtentBelief, GaussianKinematics, ModelConfig, OrientationBelief, TargetBelief
from .errors import ConfigError
from .simulator import KMH, ScenarioSpec
from .time_update import constant_velocity_model

__all__ = ["PRESETS", "get_preset", "CV_STEPS", "TURN_STEPS"]

H2 = np.hstack([np.eye(2), np.zeros((2, 2))])
CV_STEPS = 100
TURN_STEPS = 151


def _cv(law: str) -> ScenarioSpec:
    T = 0.1
    F, Q = constant_velocity_model(T, sigma=1.0, theta_var=0.01)
    s = 1.0 if law == "gaussian" else 0.25
    cfg = ModelConfig(H=H2, R=5.0 * np.eye(2), s=s, F=F, Q=Q, gamma=0.99, max_iterations=10)
    prior = TargetBelief(
        GaussianKinematics([0.0, 0.0, 50.0, 0.0], np.eye(4)),
        OrientationBelief(0.0, 1.0),
        ExtentBelief([2.0, 2.0], [100.0, 100.0]),
    )
    return ScenarioSpec(
        name=f"cv-{law.split('-')[0]}",
        trajectory="constant-velocity",
        steps=CV_STEPS,
        sample_time=T,
        measurement_law=law,
        mean_measurements=10,
        model=cfg,
        prior=prior,
        extent_true=[50.0, 600.0],
        initial_state=[0.0, 0.0, 50.0, 0.0, 0.0],
        runs=100,
        seed=2021,
    )


def _turns(law: str) -> ScenarioSpec:
    T = 1.0
    F, _ = constant_velocity_model(T)
    Q = block_diag(np.diag([100.0, 100.0, 1.0, 1.0]), 0.1)
    s = 1.0 if law == "gaussian" else 0.25
    cfg = ModelConfig(H=H2, R=400.0 * np.eye(2), s=s, F=F, Q=Q, gamma=0.99, max_iterations=10)
    prior = TargetBelief(
        GaussianKinematics([100.0, 100.0, 5.0, -8.0], np.diag([100.0**2, 100.0**2, 10.0**2, 10.0**2])),
        OrientationBelief(math.pi, 1.0),
        ExtentBelief([5.0, 5.0], [400.0**2, 180.0**2]),
    )
    v = 50.0 * KMH
    return ScenarioSpec(
        name=f"turns-{law.split('-')[0]}",
        trajectory="waypoint-turn",
        steps=TURN_STEPS,
        sample_time=T,
        measurement_law=law,
        mean_measurements=20,
        model=cfg,
        prior=prior,
        extent_true=[170.0**2, 40.0**2],
        initial_state=[0.0, 0.0, v, 0.0, 0.0],
        runs=20,
        seed=2021,
        truth_process_noise=False,
        plot_frames=(0, 20, 35, 55, 75, 95, 115, 150),
    )


def _single_update() -> ScenarioSpec:
    F, Q = constant_velocity_model(1.0)
    cfg = ModelConfig(H=H2, R=np.eye(2), s=1.0, F=F, Q=Q, gamma=1.0, max_iterations=10)
    prior = TargetBelief(
        GaussianKinematics([-20.0, -20.0, 0.0, 0.0], np.diag([300.0, 300.0, 1.0, 1.0])),
        OrientationBelief(math.pi / 2, math.pi / 2),
        ExtentBelief([101.0, 101.0], [600.0, 50.0]),
    )
    return ScenarioSpec(
        name="single-update-oracle",
        trajectory="parked-replay",
        steps=1,
        sample_time=1.0,
        measurement_law="gaussian",
        mean_measurements=10,
        poisson_count=False,
        model=cfg,
        prior=prior,
        extent_true=[6.0, 0.5],
        initial_state=[0.0, 0.0, 0.0, 0.0, 0.0],
        runs=1,
        seed=7,
        truth_process_noise=False,
    )


PRESETS = {
    "cv-gaussian": lambda: _cv("gaussian"),
    "cv-uniform": lambda: _cv("uniform-ellipse"),
    "turns-uniform": lambda: _turns("uniform-ellipse"),
    "turns-gaussian": lambda: _turns("gaussian"),
    "single-update-oracle": _single_update,
}


def get_preset(name: str) -> ScenarioSpec:
    try:
        return PRESETS[name]()
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None
