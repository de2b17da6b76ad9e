"""Ground-truth trajectories and measurement batches for simulated scenarios."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np

from .core import (
    MeasurementBatch,
    ModelConfig,
    TargetBelief,
    belief_from_dict,
    belief_to_dict,
    config_from_dict,
    config_to_dict,
)
from .errors import ConfigError, DomainError
from .rotation import rotation
from .time_update import constant_velocity_model

__all__ = [
    "GroundTruthState",
    "ScenarioSpec",
    "TRAJECTORIES",
    "MEASUREMENT_LAWS",
    "simulate_cv_trajectory",
    "simulate_turn_trajectory",
    "simulate_parked_trajectory",
    "simulate_trajectory",
    "generate_measurements",
    "run_streams",
    "scenario_to_dict",
    "scenario_from_dict",
    "load_scenario",
    "save_scenario",
    "write_truth_csv",
]

TRAJECTORIES = ("constant-velocity", "waypoint-turn", "parked-replay")
MEASUREMENT_LAWS = ("gaussian", "uniform-ellipse")
KMH = 1.0 / 3.6


@dataclass(frozen=True)
class GroundTruthState:
    position: np.ndarray
    velocity: np.ndarray
    orientation: float
    extent_diag: np.ndarray  # squared semi-axes

    def __post_init__(self):
        ext = np.asarray(self.extent_diag, dtype=float)
        if ext.shape != (2,) or np.any(ext <= 0):
            raise DomainError(f"extent_diag must be two positive values, got {ext}")
        object.__setattr__(self, "position", np.asarray(self.position, dtype=float))
        object.__setattr__(self, "velocity", np.asarray(self.velocity, dtype=float))
        object.__setattr__(self, "orientation", float(self.orientation))
        object.__setattr__(self, "extent_diag", ext)

    def extent_matrix(self) -> np.ndarray:
        T = rotation(self.orientation)
        return (T * self.extent_diag) @ T.T


@dataclass(frozen=True)
class ScenarioSpec:
    """Declarative description of a simulation campaign.

    The truth of a ``constant-velocity`` trajectory evolves with the tracker's
    own ``F`` and ``Q`` when ``truth_process_noise`` is set. ``waypoint-turn``
    is a fixed path: straight legs of ``straight_duration`` seconds joined by
    ``arc_duration`` second constant-rate turns through ``turn_angles_deg``
    at constant ``speed``.
    """

    name: str
    trajectory: str
    steps: int
    sample_time: float
    measurement_law: str
    mean_measurements: float
    model: ModelConfig
    prior: TargetBelief
    extent_true: np.ndarray
    initial_state: np.ndarray
    runs: int = 100
    seed: int = 0
    poisson_count: bool = True
    truth_process_noise: bool = True
    speed: float = 50.0 * KMH
    straight_duration: float = 30.0
    arc_duration: float = 10.0
    turn_angles_deg: tuple[float, ...] = (45.0, 90.0, 90.0)
    plot_frames: tuple[int, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.trajectory not in TRAJECTORIES:
            raise ConfigError(f"unknown trajectory kind {self.trajectory!r}; expected one of {TRAJECTORIES}")
        if self.measurement_law not in MEASUREMENT_LAWS:
            raise ConfigError(f"unknown measurement law {self.measurement_law!r}; expected one of {MEASUREMENT_LAWS}")
        if int(self.steps) < 1:
            raise ConfigError("steps must be >= 1")
        if not float(self.mean_measurements) > 0:
            raise ConfigError("mean measurement count must be positive")
        if not float(self.sample_time) > 0:
            raise ConfigError("sample_time must be positive")
        if int(self.runs) < 0:
            raise ConfigError("runs must be >= 0")
        ext = np.asarray(self.extent_true, dtype=float).reshape(-1)
        if ext.shape != (2,) or np.any(ext <= 0):
            raise ConfigError("extent_true must hold two positive values")
        x0 = np.asarray(self.initial_state, dtype=float).reshape(-1)
        if x0.size != self.model.n_x + 1:
            raise ConfigError(f"initial_state must have {self.model.n_x + 1} entries (kinematics + heading)")
        if self.prior.kinematics.dim != self.model.n_x:
            raise ConfigError("prior kinematic dimension does not match H")
        object.__setattr__(self, "extent_true", ext)
        object.__setattr__(self, "initial_state", x0)
        object.__setattr__(self, "steps", int(self.steps))
        object.__setattr__(self, "runs", int(self.runs))
        object.__setattr__(self, "seed", int(self.seed))
        object.__setattr__(self, "turn_angles_deg", tuple(float(a) for a in self.turn_angles_deg))
        object.__setattr__(self, "plot_frames", tuple(int(f) for f in self.plot_frames))

    def with_(self, **changes) -> "ScenarioSpec":
        return replace(self, **changes)


def _psd_factor(A: np.ndarray) -> np.ndarray:
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    return V * np.sqrt(np.clip(w, 0.0, None))


def _truth(x: np.ndarray, extent: np.ndarray) -> GroundTruthState:
    return GroundTruthState(x[0:2].copy(), x[2:4].copy(), x[4], extent)


def simulate_cv_trajectory(spec: ScenarioSpec, rng: np.random.Generator | None = None) -> list[GroundTruthState]:
    """Nearly-constant-velocity truth driven by the scenario model's ``F`` and ``Q``."""
    F, Q = spec.model.F, spec.model.Q
    noisy = spec.truth_process_noise and np.any(Q != 0)
    if noisy and rng is None:
        raise ValueError("an rng is required when process noise is enabled")
    L = _psd_factor(Q) if noisy else None
    x = spec.initial_state.copy()
    out = [_truth(x, spec.extent_true)]
    for _ in range(spec.steps - 1):
        x = F @ x
        if noisy:
            x = x + L @ rng.standard_normal(x.size)
        out.append(_truth(x, spec.extent_true))
    return out


def _turn_segments(spec: ScenarioSpec) -> list[tuple[float, float]]:
    """``(duration, turn_rate)`` pairs of the piecewise path."""
    segs = [(spec.straight_duration, 0.0)]
    for ang in spec.turn_angles_deg:
        segs.append((spec.arc_duration, math.radians(ang) / spec.arc_duration))
        segs.append((spec.straight_duration, 0.0))
    return segs


def _advance(p: np.ndarray, h: float, v: float, rate: float, dt: float) -> tuple[np.ndarray, float]:
    if rate == 0.0:
        return p + v * dt * np.array([math.cos(h), math.sin(h)]), h
    h2 = h + rate * dt
    r = v / rate
    return p + r * np.array([math.sin(h2) - math.sin(h), math.cos(h) - math.cos(h2)]), h2


def simulate_turn_trajectory(spec: ScenarioSpec) -> list[GroundTruthState]:
    """Constant-speed path of straight legs and constant-rate turns.

    The heading starts at ``initial_state[4]`` and the body axis follows the
    velocity. Once the last leg ends the target keeps going straight.
    """
    v = float(spec.speed)
    segs = _turn_segments(spec)
    # knots at segment starts
    knots = []
    p, h, t0 = spec.initial_state[0:2].astype(float), float(spec.initial_state[4]), 0.0
    for dur, rate in segs:
        knots.append((t0, p, h, rate))
        p, h = _advance(p, h, v, rate, dur)
        t0 += dur
    knots.append((t0, p, h, 0.0))

    out = []
    for k in range(spec.steps):
        t = k * spec.sample_time
        i = len(knots) - 1
        while knots[i][0] > t:
            i -= 1
        ts, ps, hs, rate = knots[i]
        pos, head = _advance(ps, hs, v, rate, t - ts)
        vel = v * np.array([math.cos(head), math.sin(head)])
        out.append(GroundTruthState(pos, vel, head, spec.extent_true))
    return out


def simulate_parked_trajectory(spec: ScenarioSpec) -> list[GroundTruthState]:
    """Stationary target at the initial position and heading."""
    x = spec.initial_state
    return [GroundTruthState(x[0:2], np.zeros(2), x[4], spec.extent_true) for _ in range(spec.steps)]


def simulate_trajectory(spec: ScenarioSpec, rng: np.random.Generator | None = None) -> list[GroundTruthState]:
    if spec.trajectory == "constant-velocity":
        return simulate_cv_trajectory(spec, rng)
    if spec.trajectory == "waypoint-turn":
        return simulate_turn_trajectory(spec)
    return simulate_parked_trajectory(spec)


def sample_uniform_ellipse(n: int, extent: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """``n`` points uniform in ``{u : u^T E^{-1} u <= 1}`` for ``E`` symmetric PD.

    Polar inverse transform: radius ``sqrt(U)`` on the unit disc, then mapped
    through the symmetric square-root factor of ``E``.
    """
    r = np.sqrt(rng.random(n))
    phi = 2.0 * np.pi * rng.random(n)
    disc = np.stack([r * np.cos(phi), r * np.sin(phi)], axis=1)
    return disc @ _psd_factor(extent).T


def generate_measurements(
    truth: GroundTruthState,
    spec: ScenarioSpec,
    rng: np.random.Generator,
    *,
    R: np.ndarray | None = None,
    s: float | None = None,
) -> MeasurementBatch:
    """Draw one scan. ``R`` and ``s`` default to the scenario's model values.

    Gaussian law: ``y ~ N(p, s T X T^T + R)``. Uniform law: uniform inside the
    ellipse ``T X T^T`` around ``p`` plus ``N(0, R)`` noise.
    """
    R = spec.model.R if R is None else np.asarray(R, dtype=float)
    s = spec.model.s if s is None else float(s)
    lam = float(spec.mean_measurements)
    m = int(rng.poisson(lam)) if spec.poisson_count else int(round(lam))
    if m == 0:
        return MeasurementBatch(np.zeros((0, 2)))
    E = truth.extent_matrix()
    if spec.measurement_law == "gaussian":
        L = _psd_factor(s * E + R)
        pts = rng.standard_normal((m, 2)) @ L.T
    else:
        pts = sample_uniform_ellipse(m, E, rng)
        if np.any(R != 0):
            pts = pts + rng.standard_normal((m, 2)) @ _psd_factor(R).T
    return MeasurementBatch(truth.position[None, :] + pts)


def run_streams(seed: int, run_index: int) -> tuple[np.random.Generator, np.random.Generator]:
    """Independent (trajectory, measurement) generators of one Monte-Carlo run."""
    ss = np.random.SeedSequence([int(seed), int(run_index)])
    a, b = ss.spawn(2)
    return np.random.default_rng(a), np.random.default_rng(b)


# -- config files --------------------------------------------------------------

_SCALAR_FIELDS = (
    "name", "trajectory", "steps", "sample_time", "measurement_law", "mean_measurements",
    "runs", "seed", "poisson_count", "truth_process_noise", "speed", "straight_duration",
    "arc_duration",
)


def scenario_to_dict(spec: ScenarioSpec) -> dict[str, Any]:
    d = {k: getattr(spec, k) for k in _SCALAR_FIELDS}
    d["turn_angles_deg"] = list(spec.turn_angles_deg)
    d["plot_frames"] = list(spec.plot_frames)
    d["extent_true"] = spec.extent_true.tolist()
    d["initial_state"] = spec.initial_state.tolist()
    d["model"] = config_to_dict(spec.model)
    d["prior"] = belief_to_dict(spec.prior)
    return d


def _model_from_dict(d: Mapping[str, Any], sample_time: float) -> ModelConfig:
    d = dict(d)
    motion = d.pop("motion", None)
    if motion is not None and ("F" not in d or "Q" not in d):
        if motion.get("kind", "constant-velocity") != "constant-velocity":
            raise ConfigError(f"unknown motion kind {motion.get('kind')!r}")
        F, Q = constant_velocity_model(
            motion.get("sample_time", sample_time), motion.get("sigma", 1.0), motion.get("theta_var", 0.01)
        )
        d.setdefault("F", F.tolist())
        d.setdefault("Q", Q.tolist())
    return config_from_dict(d)


def scenario_from_dict(d: Mapping[str, Any]) -> ScenarioSpec:
    if not isinstance(d, Mapping):
        raise ConfigError("scenario must be a mapping")
    unknown = set(d) - set(_SCALAR_FIELDS) - {
        "turn_angles_deg", "plot_frames", "extent_true", "initial_state", "model", "prior",
    }
    if unknown:
        raise ConfigError(f"unknown scenario fields: {sorted(unknown)}")
    try:
        kwargs = {k: d[k] for k in _SCALAR_FIELDS if k in d}
        for k in ("turn_angles_deg", "plot_frames"):
            if k in d:
                kwargs[k] = tuple(d[k])
        model = _model_from_dict(d["model"], float(d["sample_time"]))
        return ScenarioSpec(
            model=model,
            prior=belief_from_dict(d["prior"]),
            extent_true=d["extent_true"],
            initial_state=d["initial_state"],
            **kwargs,
        )
    except KeyError as exc:
        raise ConfigError(f"scenario is missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"invalid scenario: {exc}") from None


def load_scenario(path: str | Path) -> ScenarioSpec:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: not valid JSON ({exc})") from None
    return scenario_from_dict(data)


def save_scenario(spec: ScenarioSpec, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(spec), indent=2) + "\n")


def write_truth_csv(truth: Sequence[GroundTruthState], path: str | Path) -> None:
    """Columns: step, x, y, vx, vy, theta, ax1, ax2 (semi-axis lengths)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "x", "y", "vx", "vy", "theta", "ax1", "ax2"])
        for k, g in enumerate(truth):
            ax = np.sqrt(g.extent_diag)
            w.writerow([k, *(f"{v:.9g}" for v in (*g.position, *g.velocity, g.orientation, *ax))])
