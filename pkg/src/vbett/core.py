"""Belief and model types shared across the tracker.

All containers are frozen dataclasses holding read-only numpy arrays. Matrix
fields are symmetrized on construction before validation so that small
floating-point drift from upstream arithmetic is absorbed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import ConfigError, DomainError
from .rotation import rotation

__all__ = [
    "GaussianKinematics",
    "OrientationBelief",
    "ExtentBelief",
    "TargetBelief",
    "ModelConfig",
    "MeasurementBatch",
    "extent_mean",
    "estimated_extent_matrix",
    "belief_to_dict",
    "belief_from_dict",
    "config_to_dict",
    "config_from_dict",
]

_SYM_RTOL = 1e-9


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _symmetrize(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} has non-finite entries")
    scale = max(np.max(np.abs(a)), 1.0)
    if np.max(np.abs(a - a.T)) > 1e3 * _SYM_RTOL * scale:
        raise DomainError(f"{name} is not symmetric")
    return 0.5 * (a + a.T)


def _check_pd(a: np.ndarray, name: str) -> None:
    try:
        np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        raise DomainError(f"{name} is not positive definite") from None


def _check_psd(a: np.ndarray, name: str) -> None:
    if a.size == 0:
        return
    w = np.linalg.eigvalsh(a)
    if w[0] < -1e-10 * max(1.0, abs(w[-1])):
        raise DomainError(f"{name} is not positive semi-definite (min eigenvalue {w[0]:.3g})")


@dataclass(frozen=True)
class GaussianKinematics:
    """Gaussian belief over the kinematic state (positions first, then velocities)."""

    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = _symmetrize(self.cov, "kinematics.cov")
        if cov.shape != (mean.size, mean.size):
            raise DomainError(
                f"kinematics.cov shape {cov.shape} does not match mean length {mean.size}"
            )
        if not np.all(np.isfinite(mean)):
            raise DomainError("kinematics.mean has non-finite entries")
        _check_pd(cov, "kinematics.cov")
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(cov))

    @property
    def dim(self) -> int:
        return self.mean.size


@dataclass(frozen=True)
class OrientationBelief:
    """Gaussian belief over the heading angle. The mean is kept unwrapped."""

    mean: float
    var: float

    def __post_init__(self):
        mean, var = float(self.mean), float(self.var)
        if not np.isfinite(mean) or not np.isfinite(var):
            raise DomainError("orientation mean/var must be finite")
        if var < 0:
            raise DomainError(f"orientation variance must be >= 0, got {var}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "var", var)


@dataclass(frozen=True)
class ExtentBelief:
    """Independent inverse-Gamma beliefs on the diagonal entries of the extent matrix.

    ``alpha`` is the dimensionless shape, ``beta`` the scale in squared length
    units; each diagonal entry is a squared semi-axis scale.
    """

    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float).reshape(-1)
        beta = np.asarray(self.beta, dtype=float).reshape(-1)
        if alpha.shape != beta.shape:
            raise DomainError("extent.alpha and extent.beta differ in length")
        if not (np.all(np.isfinite(alpha)) and np.all(np.isfinite(beta))):
            raise DomainError("extent parameters must be finite")
        if np.any(alpha <= 1.0):
            raise DomainError(f"extent.alpha must exceed 1, got {alpha}")
        if np.any(beta <= 0.0):
            raise DomainError(f"extent.beta must be positive, got {beta}")
        object.__setattr__(self, "alpha", _frozen(alpha))
        object.__setattr__(self, "beta", _frozen(beta))


@dataclass(frozen=True)
class TargetBelief:
    kinematics: GaussianKinematics
    orientation: OrientationBelief
    extent: ExtentBelief

    @property
    def position(self) -> np.ndarray:
        return self.kinematics.mean[: self.extent.alpha.size]


@dataclass(frozen=True)
class ModelConfig:
    """Fixed model specification for one tracker.

    ``F`` and ``Q`` act on the augmented state ``[x, theta]`` and are
    therefore ``(n_x + 1)`` square.
    """

    H: np.ndarray
    R: np.ndarray
    s: float
    F: np.ndarray
    Q: np.ndarray
    gamma: float = 1.0
    max_iterations: int = 10
    early_stop_tol: float | None = None

    def __post_init__(self):
        H = np.atleast_2d(np.asarray(self.H, dtype=float))
        n_y, n_x = H.shape
        if n_y != 2:
            raise ConfigError(f"only 2-D measurements are supported, H has {n_y} rows")
        if n_x < n_y:
            raise ConfigError("H must have at least as many columns as rows")
        try:
            R = _symmetrize(self.R, "R")
            _check_pd(R, "R")
            Q = _symmetrize(self.Q, "Q")
            _check_psd(Q, "Q")
        except DomainError as exc:
            raise ConfigError(str(exc)) from None
        if R.shape != (n_y, n_y):
            raise ConfigError(f"R must be {n_y}x{n_y}, got {R.shape}")
        F = np.atleast_2d(np.asarray(self.F, dtype=float))
        if F.shape != (n_x + 1, n_x + 1) or Q.shape != F.shape:
            raise ConfigError(
                f"F and Q must be {n_x + 1}x{n_x + 1} (augmented state), got {F.shape}, {Q.shape}"
            )
        s = float(self.s)
        gamma = float(self.gamma)
        if not s > 0:
            raise ConfigError(f"scaling parameter s must be positive, got {s}")
        if not 0 < gamma <= 1:
            raise ConfigError(f"forgetting factor must lie in (0, 1], got {gamma}")
        if int(self.max_iterations) < 1:
            raise ConfigError("max_iterations must be a positive integer")
        object.__setattr__(self, "H", _frozen(H))
        object.__setattr__(self, "R", _frozen(R))
        object.__setattr__(self, "F", _frozen(F))
        object.__setattr__(self, "Q", _frozen(Q))
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "max_iterations", int(self.max_iterations))

    @property
    def n_x(self) -> int:
        return self.H.shape[1]

    @property
    def n_y(self) -> int:
        return self.H.shape[0]


@dataclass(frozen=True)
class MeasurementBatch:
    """Point measurements of one scan, shape ``(m, 2)``; ``m`` may be zero."""

    points: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size == 0:
            pts = pts.reshape(0, 2)
        pts = np.atleast_2d(pts)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise DomainError(f"measurement points must have shape (m, 2), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DomainError("measurement points must be finite")
        object.__setattr__(self, "points", _frozen(pts))

    def __len__(self) -> int:
        return self.points.shape[0]


def extent_mean(extent: ExtentBelief) -> np.ndarray:
    """Mean of the extent matrix, ``diag(beta / (alpha - 1))``."""
    alpha = np.asarray(extent.alpha, dtype=float)
    if np.any(alpha <= 1.0):
        raise DomainError("extent mean undefined for alpha <= 1")
    return np.diag(np.asarray(extent.beta, dtype=float) / (alpha - 1.0))


def estimated_extent_matrix(belief: TargetBelief) -> np.ndarray:
    """Point estimate of the rotated extent, ``T(theta) E[X] T(theta)^T``."""
    T = rotation(belief.orientation.mean)
    M = T @ extent_mean(belief.extent) @ T.T
    return 0.5 * (M + M.T)


# -- serialization -----------------------------------------------------------


def belief_to_dict(belief: TargetBelief) -> dict[str, Any]:
    return {
        "kinematics.mean": belief.kinematics.mean.tolist(),
        "kinematics.cov": belief.kinematics.cov.tolist(),
        "orientation.mean": belief.orientation.mean,
        "orientation.var": belief.orientation.var,
        "extent.alpha": belief.extent.alpha.tolist(),
        "extent.beta": belief.extent.beta.tolist(),
    }


def belief_from_dict(d: Mapping[str, Any]) -> TargetBelief:
    try:
        return TargetBelief(
            GaussianKinematics(d["kinematics.mean"], d["kinematics.cov"]),
            OrientationBelief(d["orientation.mean"], d["orientation.var"]),
            ExtentBelief(d["extent.alpha"], d["extent.beta"]),
        )
    except KeyError as exc:
        raise ConfigError(f"belief is missing field {exc.args[0]!r}") from None
    except DomainError as exc:
        raise ConfigError(f"invalid belief: {exc}") from None


def config_to_dict(cfg: ModelConfig) -> dict[str, Any]:
    out = {
        "H": cfg.H.tolist(),
        "R": cfg.R.tolist(),
        "s": cfg.s,
        "F": cfg.F.tolist(),
        "Q": cfg.Q.tolist(),
        "gamma": cfg.gamma,
        "max_iterations": cfg.max_iterations,
    }
    if cfg.early_stop_tol is not None:
        out["early_stop_tol"] = cfg.early_stop_tol
    return out


def config_from_dict(d: Mapping[str, Any]) -> ModelConfig:
    try:
        return ModelConfig(
            H=d["H"],
            R=d["R"],
            s=d["s"],
            F=d["F"],
            Q=d["Q"],
            gamma=d.get("gamma", 1.0),
            max_iterations=d.get("max_iterations", 10),
            early_stop_tol=d.get("early_stop_tol"),
        )
    except KeyError as exc:
        raise ConfigError(f"model config is missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid model config: {exc}") from None
