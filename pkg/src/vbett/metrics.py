"""Evaluation metrics: Gaussian Wasserstein distance between ellipses and heading RMSE."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["GwBreakdown", "psd_sqrt_2x2", "gw_distance", "wrap_axial", "heading_errors", "heading_rmse"]

_NEG_TOL = 1e-10


@dataclass(frozen=True)
class GwBreakdown:
    center_term: float  # squared center error
    extent_term: float  # squared extent mismatch
    distance: float


def _eig_min_max(A: np.ndarray) -> tuple[float, float]:
    a, b, d = A[0, 0], 0.5 * (A[0, 1] + A[1, 0]), A[1, 1]
    half_tr = 0.5 * (a + d)
    rad = math.hypot(0.5 * (a - d), b)
    return half_tr - rad, half_tr + rad


def psd_sqrt_2x2(A) -> np.ndarray:
    """Principal square root of a symmetric PSD 2x2 matrix.

    Uses ``sqrt(A) = (A + sqrt(det A) I) / sqrt(tr A + 2 sqrt(det A))``.
    Eigenvalues down to ``-1e-10`` (relative to the largest) are treated as 0.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (2, 2) or not np.all(np.isfinite(A)):
        raise DomainError("expected a finite 2x2 matrix")
    scale = max(1.0, float(np.max(np.abs(A))))
    if abs(A[0, 1] - A[1, 0]) > 1e-9 * scale:
        raise DomainError("matrix is not symmetric")
    A = 0.5 * (A + A.T)
    lo, hi = _eig_min_max(A)
    if lo < -_NEG_TOL * max(1.0, abs(hi)):
        raise DomainError(f"matrix is not PSD (eigenvalue {lo:.3g})")
    if hi <= 0.0:
        return np.zeros((2, 2))
    rdet = math.sqrt(max(lo, 0.0) * hi)
    t = math.sqrt(max(lo, 0.0) + hi + 2.0 * rdet)
    return (A + rdet * np.eye(2)) / t


def gw_distance(m_a, X_a, m_b, X_b) -> GwBreakdown:
    """Gaussian Wasserstein distance between ``(m_a, X_a)`` and ``(m_b, X_b)``."""
    m_a = np.asarray(m_a, dtype=float)
    m_b = np.asarray(m_b, dtype=float)
    X_a = np.asarray(X_a, dtype=float)
    X_b = np.asarray(X_b, dtype=float)
    center = float(np.sum((m_a - m_b) ** 2))
    Sa = psd_sqrt_2x2(X_a)
    psd_sqrt_2x2(X_b)  # validates X_b
    M = Sa @ X_b @ Sa
    cross = psd_sqrt_2x2(0.5 * (M + M.T))
    extent = float(np.trace(X_a) + np.trace(X_b) - 2.0 * np.trace(cross))
    extent = max(extent, 0.0)
    return GwBreakdown(center, extent, math.sqrt(center + extent))


def wrap_axial(err):
    """Wrap angle differences into ``(-pi/2, pi/2]`` (ellipses repeat every pi)."""
    err = np.asarray(err, dtype=float)
    w = np.mod(err + 0.5 * np.pi, np.pi) - 0.5 * np.pi
    return np.where(w == -0.5 * np.pi, 0.5 * np.pi, w)


def heading_errors(truth, est, wrap: bool = True) -> np.ndarray:
    truth = np.asarray(truth, dtype=float).reshape(-1)
    est = np.asarray(est, dtype=float).reshape(-1)
    if truth.shape != est.shape:
        raise ValueError(f"length mismatch: {truth.size} truth vs {est.size} estimates")
    if truth.size == 0:
        raise ValueError("need at least one heading")
    err = truth - est
    return wrap_axial(err) if wrap else err


def heading_rmse(truth, est, wrap: bool = True) -> float:
    """Heading RMSE in degrees. ``wrap=False`` uses raw differences."""
    err = heading_errors(truth, est, wrap)
    return math.degrees(math.sqrt(float(np.mean(err**2))))
