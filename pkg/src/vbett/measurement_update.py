"""Fixed-point variational measurement update.

The posterior over kinematics ``x``, heading ``theta`` and diagonal extent
``X`` is approximated by ``q(x) q(theta) q(X) q(Z)`` where ``Z`` are the
noise-free measurements. One sweep recomputes the cross-expectations from
the current iterate and then refreshes every factor from them, in the order
q(x), q(theta), q(X), q(Z). All updates of a sweep read the expectations and
factors of the previous iterate.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np
from scipy.special import digamma, gammaln

from .core import (
    ExtentBelief,
    GaussianKinematics,
    MeasurementBatch,
    ModelConfig,
    OrientationBelief,
    TargetBelief,
    extent_mean,
)
from .errors import ConfigError, DomainError, NumericError
from .rotation import (
    expected_rotated_inverse,
    expected_rotated_inverse_diag,
    rotation,
    rotation_derivative,
)

__all__ = [
    "IterationState",
    "CrossExpectations",
    "init_iteration",
    "compute_expectations",
    "update_qx",
    "update_qX",
    "update_qz",
    "update_qtheta",
    "measurement_update",
    "elbo",
    "canonical_order",
]

log = logging.getLogger(__name__)

DET_FLOOR = 1e-300
_LOG2PI = math.log(2.0 * math.pi)


def inv2(A: np.ndarray, what: str = "matrix") -> np.ndarray:
    """Adjugate inverse of a 2x2 matrix; raises instead of regularizing."""
    a, b, c, d = A[0, 0], A[0, 1], A[1, 0], A[1, 1]
    det = a * d - b * c
    if not abs(det) > DET_FLOOR:
        raise NumericError(f"{what} is singular (det={det:.3g})")
    return np.array([[d, -b], [-c, a]]) / det


@dataclass(frozen=True)
class IterationState:
    qx: GaussianKinematics
    qtheta: OrientationBelief
    qX: ExtentBelief
    z_means: np.ndarray
    z_cov: np.ndarray
    iteration: int = 0

    def __post_init__(self):
        z = np.asarray(self.z_means, dtype=float).reshape(-1, 2)
        S = np.asarray(self.z_cov, dtype=float)
        S = 0.5 * (S + S.T)
        object.__setattr__(self, "z_means", z)
        object.__setattr__(self, "z_cov", S)


@dataclass(frozen=True)
class CrossExpectations:
    """Expectations shared by the factor updates of one sweep.

    inv_rotated_extent: ``E[(s T X T^T)^{-1}]``
    inv_extent: ``E[(s X)^{-1}]`` (diagonal)
    residual_outer: ``E[(z_j - H x)(z_j - H x)^T]``, shape ``(m, 2, 2)``
    rotated_residual_outer: ``E[T^T (z_j - H x)(...)^T T]``, shape ``(m, 2, 2)``
    """

    inv_rotated_extent: np.ndarray
    inv_extent: np.ndarray
    residual_outer: np.ndarray
    rotated_residual_outer: np.ndarray


def canonical_order(points: np.ndarray) -> np.ndarray:
    """Sort points lexicographically so sums do not depend on input order."""
    if len(points) < 2:
        return points
    idx = np.lexsort((points[:, 1], points[:, 0]))
    return points[idx]


def init_iteration(prior: TargetBelief, batch: MeasurementBatch, cfg: ModelConfig) -> IterationState:
    """Start a sweep sequence from the prior, with ``z_j = y_j``.

    The initial spread of the noise-free measurements is the prior mean of
    ``s T X T^T``, taken over the heading as well, so it lives in the same
    frame as the measurements.
    """
    if len(batch) == 0:
        raise DomainError("cannot initialise an update from an empty batch")
    th = prior.orientation
    return IterationState(
        qx=prior.kinematics,
        qtheta=th,
        qX=prior.extent,
        z_means=np.array(batch.points, dtype=float),
        z_cov=cfg.s * expected_rotated_inverse_diag(np.diag(extent_mean(prior.extent)), th.mean, th.var),
        iteration=0,
    )


def compute_expectations(state: IterationState, cfg: ModelConfig) -> CrossExpectations:
    alpha, beta = state.qX.alpha, state.qX.beta
    inv_diag = alpha / (cfg.s * beta)
    th, var = state.qtheta.mean, state.qtheta.var
    H = cfg.H
    d = state.z_means - H @ state.qx.mean
    base = H @ state.qx.cov @ H.T + state.z_cov
    outer = base + d[:, :, None] * d[:, None, :]
    return CrossExpectations(
        inv_rotated_extent=expected_rotated_inverse_diag(inv_diag, th, var),
        inv_extent=np.diag(inv_diag),
        residual_outer=outer,
        # T^T C T = T(-theta) C T(-theta)^T
        rotated_residual_outer=expected_rotated_inverse(outer, -th, var),
    )


def update_qx(
    state: IterationState,
    exps: CrossExpectations,
    batch: MeasurementBatch,
    prior: TargetBelief,
    cfg: ModelConfig,
) -> GaussianKinematics:
    """Gaussian update of the kinematics against the averaged noise-free measurement.

    The pseudo-measurement is ``zbar ~ N(H x, W^{-1} / m)`` with ``W`` the
    expected inverse rotated extent; the update is carried out in gain form
    with a Joseph covariance so the result stays positive definite.
    """
    m = state.z_means.shape[0]
    if m == 0:
        return prior.kinematics
    H = cfg.H
    x0, P0 = prior.kinematics.mean, prior.kinematics.cov
    zbar = state.z_means.mean(axis=0)
    V = inv2(exps.inv_rotated_extent, "E[(sTXT')^-1]") / m
    PHt = P0 @ H.T
    S = H @ PHt + V
    K = PHt @ inv2(S, "innovation covariance")
    x = x0 + K @ (zbar - H @ x0)
    IKH = np.eye(x0.size) - K @ H
    P = IKH @ P0 @ IKH.T + K @ V @ K.T
    return GaussianKinematics(x, P)


def update_qtheta(
    state: IterationState,
    exps: CrossExpectations,
    batch: MeasurementBatch,
    prior: TargetBelief,
    cfg: ModelConfig,
) -> OrientationBelief:
    """Gaussian heading update from a first-order expansion of ``T(theta)^T r``.

    The expansion point is the current heading iterate. ``Delta`` is the
    precision contributed by the batch and ``delta`` the matching linear term.
    """
    var0 = prior.orientation.var
    if not var0 > 0:
        raise DomainError("heading update needs a prior variance > 0")
    th = state.qtheta.mean
    T = rotation(th)
    dT = rotation_derivative(th)
    W = exps.inv_extent
    C = exps.residual_outer.sum(axis=0)
    Delta = float(np.trace(W @ dT.T @ C @ dT))
    delta = Delta * th - float(np.trace(W @ T.T @ C @ dT))
    var = 1.0 / (1.0 / var0 + Delta)
    mean = var * (prior.orientation.mean / var0 + delta)
    return OrientationBelief(mean, var)


def update_qX(
    state: IterationState,
    exps: CrossExpectations,
    batch: MeasurementBatch,
    prior: TargetBelief,
    cfg: ModelConfig,
) -> ExtentBelief:
    m = exps.rotated_residual_outer.shape[0]
    diag_sum = np.einsum("jii->i", exps.rotated_residual_outer)
    return ExtentBelief(
        prior.extent.alpha + 0.5 * m,
        prior.extent.beta + diag_sum / (2.0 * cfg.s),
    )


def update_qz(
    state: IterationState,
    exps: CrossExpectations,
    batch: MeasurementBatch,
    prior: TargetBelief,
    cfg: ModelConfig,
) -> tuple[np.ndarray, np.ndarray]:
    """Fuse each measurement ``y_j`` with the extent-spread prediction ``H xbar``."""
    try:
        R_inv = inv2(cfg.R, "R")
    except NumericError as exc:
        raise ConfigError(str(exc)) from None
    W = exps.inv_rotated_extent
    Sz = inv2(W + R_inv, "noise-free measurement precision")
    Sz = 0.5 * (Sz + Sz.T)
    pred = W @ (cfg.H @ state.qx.mean)
    points = np.asarray(batch.points, dtype=float)
    z = (pred[None, :] + points @ R_inv.T) @ Sz.T
    return z, Sz


def _max_change(a: IterationState, b: IterationState) -> float:
    return max(
        float(np.max(np.abs(a.qx.mean - b.qx.mean))),
        abs(a.qtheta.mean - b.qtheta.mean),
        float(np.max(np.abs(a.qX.alpha - b.qX.alpha))),
        float(np.max(np.abs(a.qX.beta - b.qX.beta))),
    )


_SUBUPDATES = (
    ("update_qx", update_qx),
    ("update_qtheta", update_qtheta),
    ("update_qX", update_qX),
    ("update_qz", update_qz),
)


def measurement_update(
    prior: TargetBelief,
    batch: MeasurementBatch,
    cfg: ModelConfig,
    trace: Callable[[dict], None] | None = None,
    iterations: int | None = None,
) -> TargetBelief:
    """Variational measurement update of a target belief with one scan.

    Runs ``cfg.max_iterations`` sweeps (or ``iterations`` if given). An empty
    batch returns the prior unchanged. When ``cfg.early_stop_tol`` is set, the
    loop stops once the largest change in (x, theta, alpha, beta) drops below
    it. ``trace`` receives one record per sweep.
    """
    if len(batch) == 0:
        return prior
    batch = MeasurementBatch(canonical_order(batch.points))
    n_iter = cfg.max_iterations if iterations is None else int(iterations)
    state = init_iteration(prior, batch, cfg)
    want_elbo = trace is not None or log.isEnabledFor(logging.DEBUG)

    for it in range(n_iter):
        stage = "compute_expectations"
        try:
            exps = compute_expectations(state, cfg)
            results = {}
            for stage, fn in _SUBUPDATES:
                results[stage] = fn(state, exps, batch, prior, cfg)
        except (NumericError, DomainError) as exc:
            raise NumericError(f"iteration {it}, {stage}: {exc}") from exc
        z, Sz = results["update_qz"]
        new = IterationState(
            qx=results["update_qx"],
            qtheta=results["update_qtheta"],
            qX=results["update_qX"],
            z_means=z,
            z_cov=Sz,
            iteration=it + 1,
        )
        if want_elbo:
            record = {
                "iteration": it + 1,
                "theta": new.qtheta.mean,
                "alpha": new.qX.alpha.tolist(),
                "beta": new.qX.beta.tolist(),
                "x": new.qx.mean.tolist(),
                "elbo": elbo(new, prior, batch, cfg),
            }
            log.debug("vb sweep", extra={"vb_trace": record})
            if trace is not None:
                trace(record)
        done = cfg.early_stop_tol is not None and _max_change(state, new) < cfg.early_stop_tol
        state = new
        if done:
            break

    return TargetBelief(state.qx, state.qtheta, state.qX)


def elbo(state: IterationState, prior: TargetBelief, batch: MeasurementBatch, cfg: ModelConfig) -> float:
    """Evidence lower bound of the augmented model under the factorized posterior.

    Diagnostic only; the heading linearization means it need not increase
    from sweep to sweep.
    """
    H, R, s = cfg.H, cfg.R, cfg.s
    y = np.asarray(batch.points, dtype=float)
    m = y.shape[0]
    x, P = state.qx.mean, state.qx.cov
    th, Th = state.qtheta.mean, state.qtheta.var
    a, b = state.qX.alpha, state.qX.beta
    z, Sz = state.z_means, state.z_cov

    E_log_sig = np.log(b) - digamma(a)
    E_inv_sig = a / b

    R_inv = inv2(R)
    ry = y - z
    ll_y = m * (-_LOG2PI - 0.5 * math.log(np.linalg.det(R))) - 0.5 * (
        np.einsum("ji,ik,jk->", ry, R_inv, ry) + m * np.trace(R_inv @ Sz)
    )
    W = expected_rotated_inverse_diag(E_inv_sig / s, th, Th)
    d = z - H @ x
    C = m * (H @ P @ H.T + Sz) + d.T @ d
    ll_z = m * (-_LOG2PI - 0.5 * float(np.sum(np.log(s) + E_log_sig))) - 0.5 * np.trace(W @ C)

    x0, P0 = prior.kinematics.mean, prior.kinematics.cov
    n = x0.size
    P0_inv = np.linalg.inv(P0)
    dx = x - x0
    lp_x = -0.5 * (n * _LOG2PI + np.linalg.slogdet(P0)[1] + np.trace(P0_inv @ P) + dx @ P0_inv @ dx)
    a0, b0 = prior.extent.alpha, prior.extent.beta
    lp_X = float(np.sum(a0 * np.log(b0) - gammaln(a0) - (a0 + 1) * E_log_sig - b0 * E_inv_sig))
    th0, Th0 = prior.orientation.mean, prior.orientation.var
    lp_th = -0.5 * (math.log(2 * math.pi * Th0) + (Th + (th - th0) ** 2) / Th0)

    h_x = 0.5 * (n * (1 + _LOG2PI) + np.linalg.slogdet(P)[1])
    h_th = 0.5 * (1 + math.log(2 * math.pi * max(Th, 1e-300)))
    h_X = float(np.sum(a + np.log(b) + gammaln(a) - (1 + a) * digamma(a)))
    h_z = m * 0.5 * (2 * (1 + _LOG2PI) + math.log(np.linalg.det(Sz)))
    return float(ll_y + ll_z + lp_x + lp_X + lp_th + h_x + h_th + h_X + h_z)


def with_iterations(cfg: ModelConfig, n: int) -> ModelConfig:
    """Copy of ``cfg`` running ``n`` sweeps per update."""
    return replace(cfg, max_iterations=n)
