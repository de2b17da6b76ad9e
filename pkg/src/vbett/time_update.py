"""Prediction step: Kalman prediction of ``[x, theta]`` and forgetting of the extent."""

from __future__ import annotations

import numpy as np
from scipy.linalg import block_diag

from .core import ExtentBelief, GaussianKinematics, ModelConfig, OrientationBelief, TargetBelief
from .errors import ConfigError

__all__ = ["time_update", "constant_velocity_model", "ALPHA_FLOOR"]

# keeps E[X] defined after repeated forgetting without updates
ALPHA_FLOOR = 1.0 + 1e-6


def time_update(posterior: TargetBelief, cfg: ModelConfig) -> TargetBelief:
    """Propagate a belief one step through ``cfg.F``, ``cfg.Q`` and ``cfg.gamma``.

    Any kinematics/heading cross-covariance produced by a non-block-diagonal
    ``F`` or ``Q`` is dropped; only the marginals are kept.
    """
    n = posterior.kinematics.dim
    if cfg.F.shape != (n + 1, n + 1):
        raise ConfigError(f"F is {cfg.F.shape}, belief needs {(n + 1, n + 1)}")
    mean = np.append(posterior.kinematics.mean, posterior.orientation.mean)
    cov = block_diag(posterior.kinematics.cov, posterior.orientation.var)
    mean = cfg.F @ mean
    cov = cfg.F @ cov @ cfg.F.T + cfg.Q
    alpha = np.maximum(cfg.gamma * posterior.extent.alpha, ALPHA_FLOOR)
    beta = cfg.gamma * posterior.extent.beta
    return TargetBelief(
        GaussianKinematics(mean[:n], cov[:n, :n]),
        OrientationBelief(mean[n], cov[n, n]),
        ExtentBelief(alpha, beta),
    )


def constant_velocity_model(T: float, sigma: float = 1.0, theta_var: float = 0.01):
    """Nearly-constant-velocity ``(F, Q)`` for the state ``[px, py, vx, vy, theta]``.

    ``sigma`` is the white-acceleration intensity (standard deviation units),
    ``theta_var`` the per-step variance of the heading random walk.
    """
    Fb = np.kron(np.array([[1.0, T], [0.0, 1.0]]), np.eye(2))
    Qb = sigma**2 * np.kron(np.array([[T**3 / 3, T**2 / 2], [T**2 / 2, T]]), np.eye(2))
    return block_diag(Fb, 1.0), block_diag(Qb, theta_var)
