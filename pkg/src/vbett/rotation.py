"""2-D rotations and closed-form expectations of rotated matrices.

The angle is Gaussian, ``theta ~ N(mean, var)``, and every expectation
reduces to the characteristic-function identities

    E[cos 2 theta] = cos(2 mean) exp(-2 var)
    E[sin 2 theta] = sin(2 mean) exp(-2 var)
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError

__all__ = [
    "rotation",
    "rotation_derivative",
    "trig_moments",
    "expected_rotated_inverse",
    "expected_rotated_inverse_diag",
]


def _check_angle(theta: float) -> float:
    theta = float(theta)
    if not math.isfinite(theta):
        raise DomainError(f"angle must be finite, got {theta}")
    return theta


def _check_var(var: float) -> float:
    var = float(var)
    if not var >= 0:  # also rejects NaN
        raise DomainError(f"angle variance must be >= 0, got {var}")
    return var


def rotation(theta: float) -> np.ndarray:
    """Counter-clockwise rotation matrix ``[[c, -s], [s, c]]``."""
    theta = _check_angle(theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotation_derivative(theta: float) -> np.ndarray:
    """Entrywise derivative of :func:`rotation` with respect to the angle."""
    theta = _check_angle(theta)
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[-s, -c], [c, -s]])


def trig_moments(mean: float, var: float) -> tuple[float, float]:
    """Return ``(E[cos 2 theta], E[sin 2 theta])`` for a Gaussian angle."""
    mean = _check_angle(mean)
    var = _check_var(var)
    atten = math.exp(-2.0 * var)
    return math.cos(2.0 * mean) * atten, math.sin(2.0 * mean) * atten


def expected_rotated_inverse(M_inv, mean: float, var: float) -> np.ndarray:
    """``E[T(theta) M_inv T(theta)^T]`` for ``theta ~ N(mean, var)``.

    Equivalently ``E[(T M T^T)^{-1}]`` given ``M^{-1}``. ``M_inv`` may be any
    real 2x2 matrix (not necessarily symmetric) or a stack ``(..., 2, 2)``.

    Each entry is half the inner product of a coefficient row with the kernel
    ``[1 + c, 1 - c, s]`` where ``(c, s)`` are the trigonometric moments of
    ``2 theta``; the half comes from the double-angle substitutions, so that a
    zero variance reproduces the exact rotation.
    """
    M = np.asarray(M_inv, dtype=float)
    if M.shape[-2:] != (2, 2):
        raise DomainError(f"expected a 2x2 matrix, got shape {M.shape}")
    c, s = trig_moments(mean, var)
    kp, km = 0.5 * (1.0 + c), 0.5 * (1.0 - c)
    hs = 0.5 * s
    m11, m12 = M[..., 0, 0], M[..., 0, 1]
    m21, m22 = M[..., 1, 0], M[..., 1, 1]
    out = np.empty(M.shape)
    out[..., 0, 0] = m11 * kp + m22 * km - (m12 + m21) * hs
    out[..., 0, 1] = m12 * kp - m21 * km + (m11 - m22) * hs
    out[..., 1, 0] = m21 * kp - m12 * km + (m11 - m22) * hs
    out[..., 1, 1] = m22 * kp + m11 * km + (m12 + m21) * hs
    return out


def expected_rotated_inverse_diag(diag_inv, mean: float, var: float) -> np.ndarray:
    """Diagonal special case of :func:`expected_rotated_inverse`.

    Blends the isotropic average ``tr/2 * I`` with the rotation at the mean
    angle, weighted by ``exp(-2 var)``.
    """
    d = np.asarray(diag_inv, dtype=float).reshape(-1)
    if d.size != 2:
        raise DomainError(f"expected 2 diagonal entries, got {d.size}")
    var = _check_var(var)
    w = math.exp(-2.0 * var)
    T = rotation(mean)
    rotated = (T * d) @ T.T
    return (1.0 - w) * 0.5 * (d[0] + d[1]) * np.eye(2) + w * rotated
