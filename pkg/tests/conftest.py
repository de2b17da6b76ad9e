import math

import numpy as np
import pytest

from vbett import (
    ExtentBelief,
    GaussianKinematics,
    MeasurementBatch,
    ModelConfig,
    OrientationBelief,
    TargetBelief,
    constant_velocity_model,
)

H2 = np.hstack([np.eye(2), np.zeros((2, 2))])


def random_spd(rng, n=2, scale=1.0):
    A = rng.normal(size=(n, n))
    return scale * (A @ A.T + 0.5 * np.eye(n))


def random_belief(rng, iso_pos=False):
    if iso_pos:
        P = np.diag([rng.uniform(1, 20)] * 2 + [rng.uniform(0.5, 4)] * 2)
    else:
        P = random_spd(rng, 4, rng.uniform(0.5, 10))
    return TargetBelief(
        GaussianKinematics(rng.normal(0, 5, 4), P),
        OrientationBelief(rng.uniform(-math.pi, math.pi), rng.uniform(0.01, 1.5)),
        ExtentBelief(rng.uniform(1.5, 20, 2), rng.uniform(1, 50, 2)),
    )


def random_config(rng, iterations=10, s=None):
    F, Q = constant_velocity_model(1.0)
    return ModelConfig(
        H=H2,
        R=random_spd(rng, 2, rng.uniform(0.1, 3)),
        s=float(rng.choice([0.25, 1.0])) if s is None else s,
        F=F,
        Q=Q,
        max_iterations=iterations,
    )


def random_batch(rng, center=(0.0, 0.0), m=None):
    m = int(rng.integers(1, 15)) if m is None else m
    return MeasurementBatch(np.asarray(center) + rng.normal(0, 4, (m, 2)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_LINES: dict[int, str] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
