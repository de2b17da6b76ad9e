"""Importance-sampled reference posterior for a single measurement update.

Samples come from the exact prior (Gaussian kinematics, Gaussian heading,
inverse-Gamma extent) and are weighted by the exact batch likelihood
``prod_j N(y_j; H x, s T X T^T + R)``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import MeasurementBatch, ModelConfig, TargetBelief
from .errors import DegenerateOracleError, DomainError
from .measurement_update import canonical_order
from .metrics import wrap_axial

__all__ = [
    "WeightedParticleCloud",
    "OracleSummary",
    "oracle_posterior",
    "oracle_posterior_min_ess",
    "oracle_summary",
    "weighted_median",
    "effective_sample_size",
    "write_cloud_csv",
]

_CHUNK = 100_000


@dataclass(frozen=True)
class WeightedParticleCloud:
    """Samples with unnormalized log weights.

    kinematics: ``(n, n_x)``, theta: ``(n,)``, sigma: ``(n, 2)``.
    """

    kinematics: np.ndarray
    theta: np.ndarray
    sigma: np.ndarray
    log_weights: np.ndarray

    def __len__(self) -> int:
        return self.theta.size

    def weights(self) -> np.ndarray:
        lw = self.log_weights
        top = np.max(lw)
        if not np.isfinite(top):
            raise DegenerateOracleError("every importance weight is zero")
        w = np.exp(lw - top)
        return w / w.sum()

    def ess(self) -> float:
        return effective_sample_size(self.log_weights)


@dataclass(frozen=True)
class OracleSummary:
    kinematics: np.ndarray
    theta: float
    sigma: np.ndarray


def effective_sample_size(log_weights) -> float:
    lw = np.asarray(log_weights, dtype=float)
    top = np.max(lw)
    if not np.isfinite(top):
        return 0.0
    w = np.exp(lw - top)
    return float(w.sum() ** 2 / np.sum(w**2))


def _sample_prior(prior: TargetBelief, n: int, rng: np.random.Generator):
    kin = prior.kinematics
    w, V = np.linalg.eigh(kin.cov)
    L = V * np.sqrt(np.clip(w, 0, None))
    x = kin.mean + rng.standard_normal((n, kin.dim)) @ L.T
    theta = prior.orientation.mean + math.sqrt(prior.orientation.var) * rng.standard_normal(n)
    # inverse-Gamma(alpha, beta) = beta / Gamma(alpha, 1)
    a, b = prior.extent.alpha, prior.extent.beta
    sigma = b / rng.gamma(a, 1.0, size=(n, a.size))
    return x, theta, sigma


def _log_likelihood(x, theta, sigma, y, cfg: ModelConfig) -> np.ndarray:
    c, s_ = np.cos(theta), np.sin(theta)
    sc = cfg.s
    s1, s2 = sc * sigma[:, 0], sc * sigma[:, 1]
    R = cfg.R
    # S = s T diag(s1, s2) T^T + R, entries vectorized over samples
    a = s1 * c * c + s2 * s_ * s_ + R[0, 0]
    b = (s1 - s2) * c * s_ + R[0, 1]
    d = s1 * s_ * s_ + s2 * c * c + R[1, 1]
    det = a * d - b * b
    hx = x @ cfg.H.T
    r = y[None, :, :] - hx[:, None, :]
    r0, r1 = r[..., 0], r[..., 1]
    with np.errstate(over="ignore", invalid="ignore"):
        quad = (d[:, None] * r0 * r0 - 2 * b[:, None] * r0 * r1 + a[:, None] * r1 * r1) / det[:, None]
    m = y.shape[0]
    return -0.5 * quad.sum(axis=1) - 0.5 * m * np.log(det) - m * math.log(2 * math.pi)


def _rb_block(prior: TargetBelief, n: int, rng: np.random.Generator, y: np.ndarray, cfg: ModelConfig):
    """Heading and extent from the prior, kinematics from their exact conditional posterior.

    Given ``(theta, X)`` the scan is linear-Gaussian in ``x``: the weight is the
    marginal likelihood ``p(y | theta, X)`` and ``x`` is drawn from the Kalman
    posterior with pseudo-measurement ``ybar ~ N(H x, S / m)``.
    """
    kin = prior.kinematics
    theta = prior.orientation.mean + math.sqrt(prior.orientation.var) * rng.standard_normal(n)
    a, b = prior.extent.alpha, prior.extent.beta
    sigma = b / rng.gamma(a, 1.0, size=(n, a.size))
    m = y.shape[0]
    c, s_ = np.cos(theta), np.sin(theta)
    s1, s2 = cfg.s * sigma[:, 0], cfg.s * sigma[:, 1]
    S = np.empty((n, 2, 2))
    S[:, 0, 0] = s1 * c * c + s2 * s_ * s_
    S[:, 0, 1] = S[:, 1, 0] = (s1 - s2) * c * s_
    S[:, 1, 1] = s1 * s_ * s_ + s2 * c * c
    S += cfg.R
    ybar = y.mean(axis=0)
    A = (y - ybar).T @ (y - ybar)
    det_S = S[:, 0, 0] * S[:, 1, 1] - S[:, 0, 1] ** 2
    S_inv = np.stack([np.stack([S[:, 1, 1], -S[:, 0, 1]], -1), np.stack([-S[:, 1, 0], S[:, 0, 0]], -1)], -2)
    S_inv /= det_S[:, None, None]
    scatter = -0.5 * np.einsum("nij,ji->n", S_inv, A)
    H, P, x0 = cfg.H, kin.cov, kin.mean
    G = H @ P @ H.T + S / m
    G_inv = np.linalg.inv(G)
    r = ybar - H @ x0
    quad = np.einsum("i,nij,j->n", r, G_inv, r)
    lw = (
        -0.5 * quad - 0.5 * np.log(np.linalg.det(G)) - math.log(2 * math.pi)
        + scatter - 0.5 * (m - 1) * np.log(det_S) - (m - 1) * math.log(2 * math.pi) - math.log(m)
    )
    K = (P @ H.T)[None] @ G_inv
    mean = x0 + np.einsum("nij,j->ni", K, r)
    cov = P[None] - K @ (H @ P)[None]
    cov = 0.5 * (cov + np.swapaxes(cov, 1, 2))
    L = np.linalg.cholesky(cov)
    x = mean + np.einsum("nij,nj->ni", L, rng.standard_normal((n, x0.size)))
    return x, theta, sigma, lw


def oracle_posterior(
    prior: TargetBelief,
    batch: MeasurementBatch,
    cfg: ModelConfig,
    n_samples: int,
    rng: np.random.Generator | int | None = None,
    marginalize_kinematics: bool = False,
) -> WeightedParticleCloud:
    """Prior importance sampling of the exact single-update posterior.

    Sampling is done in blocks, each drawing from its own child stream of
    ``rng``'s seed sequence, so the result does not depend on block layout
    beyond the fixed block size.

    With ``marginalize_kinematics`` only heading and extent are importance
    sampled; the kinematics are integrated out of the weights and drawn from
    their exact Gaussian conditional. The target distribution is the same,
    with far less weight degeneracy when the prior position is off.
    """
    n_samples = int(n_samples)
    if n_samples < 1:
        raise DomainError("n_samples must be >= 1")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    y = canonical_order(np.asarray(batch.points, dtype=float))
    n_blocks = -(-n_samples // _CHUNK)
    streams = [np.random.default_rng(s) for s in rng.bit_generator.seed_seq.spawn(n_blocks)]
    xs, ths, sgs, lws = [], [], [], []
    for i, g in enumerate(streams):
        n = min(_CHUNK, n_samples - i * _CHUNK)
        if marginalize_kinematics and y.shape[0]:
            x, th, sg, lw = _rb_block(prior, n, g, y, cfg)
        else:
            x, th, sg = _sample_prior(prior, n, g)
            lw = _log_likelihood(x, th, sg, y, cfg) if y.shape[0] else np.zeros(n)
        xs.append(x), ths.append(th), sgs.append(sg), lws.append(lw)
    lw = np.concatenate(lws)
    lw = np.where(np.isnan(lw), -np.inf, lw)
    if not np.any(np.isfinite(lw)):
        raise DegenerateOracleError("every importance weight underflowed")
    return WeightedParticleCloud(np.concatenate(xs), np.concatenate(ths), np.concatenate(sgs), lw)


def oracle_posterior_min_ess(
    prior: TargetBelief,
    batch: MeasurementBatch,
    cfg: ModelConfig,
    n_samples: int,
    seed: int,
    min_ess: float = 100.0,
    max_samples: int = 16_000_000,
    marginalize_kinematics: bool = False,
) -> WeightedParticleCloud:
    """Draw ``n_samples`` and keep doubling the budget until the ESS exceeds ``min_ess``.

    Attempt ``k`` uses the stream ``[seed, k]``. Raises
    :class:`DegenerateOracleError` once ``max_samples`` is exceeded.
    """
    n, k = int(n_samples), 0
    while n <= max_samples:
        cloud = oracle_posterior(prior, batch, cfg, n, np.random.default_rng([seed, k]), marginalize_kinematics)
        if cloud.ess() > min_ess:
            return cloud
        n, k = 2 * n, k + 1
    raise DegenerateOracleError(f"ESS stayed below {min_ess} up to {max_samples} samples")


def weighted_median(values, weights) -> float:
    """Smallest value whose cumulative normalized weight reaches 1/2."""
    v = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    order = np.argsort(v, kind="stable")
    cw = np.cumsum(w[order])
    if not cw[-1] > 0:
        raise DegenerateOracleError("weights carry no mass")
    idx = int(np.searchsorted(cw, 0.5 * cw[-1]))
    return float(v[order][min(idx, v.size - 1)])


def oracle_summary(cloud: WeightedParticleCloud) -> OracleSummary:
    """Componentwise weighted medians of the cloud.

    Headings are first folded modulo pi around the weighted axial mean
    direction, since ``theta`` and ``theta + pi`` describe the same ellipse and
    a wide heading prior otherwise yields a multimodal marginal. The fold is
    placed on the branch of the heaviest sample.
    """
    w = cloud.weights()
    c = float(np.sum(w * np.cos(2 * cloud.theta)))
    s = float(np.sum(w * np.sin(2 * cloud.theta)))
    anchor = float(cloud.theta[np.argmax(w)])
    centre = anchor + float(wrap_axial(0.5 * math.atan2(s, c) - anchor)) if (c or s) else anchor
    theta = centre + wrap_axial(cloud.theta - centre)
    kin = np.array([weighted_median(cloud.kinematics[:, i], w) for i in range(cloud.kinematics.shape[1])])
    sig = np.array([weighted_median(cloud.sigma[:, i], w) for i in range(cloud.sigma.shape[1])])
    return OracleSummary(kin, weighted_median(theta, w), sig)


def write_cloud_csv(cloud: WeightedParticleCloud, path: str | Path) -> None:
    """One row per sample: kinematics, theta, sigma1, sigma2, normalized weight."""
    w = cloud.weights()
    n_x = cloud.kinematics.shape[1]
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow([*(f"x{i}" for i in range(n_x)), "theta", "sigma1", "sigma2", "weight"])
        for i in range(len(cloud)):
            out.writerow(
                [f"{v:.9g}" for v in (*cloud.kinematics[i], cloud.theta[i], *cloud.sigma[i], w[i])]
            )
