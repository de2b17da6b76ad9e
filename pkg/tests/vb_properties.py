"""Property checks of the measurement update, shared by the unit and acceptance suites.

Each check draws random (prior, config, batch) instances and returns the
worst violation it saw, so callers choose how many instances to run.
"""

import math

import numpy as np

from vbett import (
    ExtentBelief,
    GaussianKinematics,
    MeasurementBatch,
    ModelConfig,
    OrientationBelief,
    TargetBelief,
    measurement_update,
)
from vbett.rotation import rotation

from conftest import random_batch, random_belief, random_config


def order_invariance(rng, n):
    """Number of instances whose output changed under a batch permutation."""
    bad = 0
    for _ in range(n):
        prior, cfg = random_belief(rng), random_config(rng)
        batch = random_batch(rng, prior.kinematics.mean[:2])
        perm = MeasurementBatch(batch.points[rng.permutation(len(batch))])
        a, b = measurement_update(prior, batch, cfg), measurement_update(prior, perm, cfg)
        same = (
            np.array_equal(a.kinematics.mean, b.kinematics.mean)
            and np.array_equal(a.kinematics.cov, b.kinematics.cov)
            and a.orientation == b.orientation
            and np.array_equal(a.extent.alpha, b.extent.alpha)
            and np.array_equal(a.extent.beta, b.extent.beta)
        )
        bad += not same
    return bad


def _shift(prior, t):
    k = prior.kinematics
    mean = k.mean.copy()
    mean[:2] += t
    return TargetBelief(GaussianKinematics(mean, k.cov), prior.orientation, prior.extent)


def translation_error(rng, n):
    """Largest deviation from exact translation equivariance, relative to value scale."""
    worst = 0.0
    for _ in range(n):
        prior, cfg = random_belief(rng), random_config(rng)
        batch = random_batch(rng, prior.kinematics.mean[:2])
        t = rng.uniform(-1e3, 1e3, 2)
        a = measurement_update(prior, batch, cfg)
        b = measurement_update(_shift(prior, t), MeasurementBatch(batch.points + t), cfg)
        worst = max(
            worst,
            np.max(np.abs(b.kinematics.mean[:2] - a.kinematics.mean[:2] - t)),
            np.max(np.abs(b.kinematics.mean[2:] - a.kinematics.mean[2:])),
            abs(b.orientation.mean - a.orientation.mean),
            abs(b.orientation.var - a.orientation.var),
            np.max(np.abs(b.extent.beta - a.extent.beta) / a.extent.beta),
        )
    return worst


def rotation_error(rng, n):
    """(heading error, relative extent error) under a rigid rotation of the scene.

    Uses isotropic position/velocity prior blocks and isotropic noise.
    """
    worst_th, worst_ext = 0.0, 0.0
    for _ in range(n):
        prior = random_belief(rng, iso_pos=True)
        base = random_config(rng)
        cfg = ModelConfig(H=base.H, R=rng.uniform(0.1, 3) * np.eye(2), s=base.s, F=base.F, Q=base.Q)
        batch = random_batch(rng, prior.kinematics.mean[:2])
        phi = rng.uniform(-math.pi, math.pi)
        U = rotation(phi)
        k = prior.kinematics
        rot_prior = TargetBelief(
            GaussianKinematics(np.concatenate([U @ k.mean[:2], U @ k.mean[2:]]), k.cov),
            OrientationBelief(prior.orientation.mean + phi, prior.orientation.var),
            prior.extent,
        )
        a = measurement_update(prior, batch, cfg)
        b = measurement_update(rot_prior, MeasurementBatch(batch.points @ U.T), cfg)
        worst_th = max(worst_th, abs(b.orientation.mean - a.orientation.mean - phi))
        worst_ext = max(worst_ext, np.max(np.abs(b.extent.beta - a.extent.beta) / a.extent.beta))
    return worst_th, worst_ext


def concentration_and_psd(rng, n):
    """Counts of violations of: alpha += m/2 exactly, Theta non-increasing,
    every covariance PSD, position covariance shrinking."""
    fails = {"alpha": 0, "theta_var": 0, "psd": 0, "position_cov": 0}
    for _ in range(n):
        prior, cfg = random_belief(rng), random_config(rng)
        batch = random_batch(rng, prior.kinematics.mean[:2] + rng.normal(0, 10, 2))
        post = measurement_update(prior, batch, cfg)
        if not np.array_equal(post.extent.alpha, prior.extent.alpha + 0.5 * len(batch)):
            fails["alpha"] += 1
        if not post.orientation.var <= prior.orientation.var:
            fails["theta_var"] += 1
        P = post.kinematics.cov
        if not (np.all(np.linalg.eigvalsh(P) > 0) and post.orientation.var > 0 and np.all(post.extent.beta > 0)):
            fails["psd"] += 1
        D = prior.kinematics.cov[:2, :2] - P[:2, :2]
        if np.linalg.eigvalsh(D)[0] < -1e-10 * np.max(np.abs(prior.kinematics.cov)):
            fails["position_cov"] += 1
    return fails
