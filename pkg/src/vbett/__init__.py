"""Variational-Bayes random-matrix extended target tracking with an explicit heading state."""

from .core import (
    ExtentBelief,
    GaussianKinematics,
    MeasurementBatch,
    ModelConfig,
    OrientationBelief,
    TargetBelief,
    estimated_extent_matrix,
    extent_mean,
)
from .errors import ConfigError, DegenerateOracleError, DomainError, NumericError, VbettError
from .measurement_update import measurement_update
from .metrics import gw_distance, heading_rmse, psd_sqrt_2x2
from .rotation import (
    expected_rotated_inverse,
    expected_rotated_inverse_diag,
    rotation,
    rotation_derivative,
    trig_moments,
)
from .time_update import constant_velocity_model, time_update

__version__ = "0.1.0"

__all__ = [
    "ExtentBelief",
    "GaussianKinematics",
    "MeasurementBatch",
    "ModelConfig",
    "OrientationBelief",
    "TargetBelief",
    "estimated_extent_matrix",
    "extent_mean",
    "ConfigError",
    "DegenerateOracleError",
    "DomainError",
    "NumericError",
    "VbettError",
    "measurement_update",
    "time_update",
    "constant_velocity_model",
    "gw_distance",
    "heading_rmse",
    "psd_sqrt_2x2",
    "rotation",
    "rotation_derivative",
    "trig_moments",
    "expected_rotated_inverse",
    "expected_rotated_inverse_diag",
]
