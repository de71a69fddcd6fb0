"""Discrete-time diffusion ``x <- (I - kappa L_w) x`` on a reweighted graph."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ValidationError
from .graph import EdgeVector, Graph

#: Keep the full n x steps trajectory only below this many stored values.
MAX_TRAJECTORY_VALUES = 10_000_000


def _weights(g: Graph, w) -> np.ndarray:
    w = np.asarray(g.weights if w is None else w, dtype=float)
    if w.shape != (g.m,):
        raise ValidationError(f"expected {g.m} edge weights, got shape {w.shape}", "dynamics")
    if np.any(w < 0):
        raise ValidationError("diffusion weights must be non-negative", "dynamics")
    return w


def weighted_degrees(g: Graph, w) -> np.ndarray:
    w = _weights(g, w)
    return np.bincount(g.tails, w, g.n) + np.bincount(g.heads, w, g.n)


def kappa_max(g: Graph, w=None) -> float:
    """Largest accepted step size, ``1 / d_max`` under the weights ``w``.

    Every eigenvalue of the weighted Laplacian is at most ``2 d_max``, so this
    keeps ``I - kappa L`` non-negative and contracting.
    """
    d = weighted_degrees(g, w).max() if g.n else 0.0
    return float("inf") if d == 0 else 1.0 / float(d)


def default_kappa(g: Graph, w=None) -> float:
    return 0.1 * kappa_max(g, w)


def default_gamma(n: int) -> float:
    return 0.5 / n


@dataclass
class DiffusionRun:
    weights: np.ndarray
    start: int
    kappa: float
    steps: int
    trajectory: Optional[np.ndarray]  # (steps+1, n), or None when too large
    target: Optional[int] = None
    target_series: Optional[np.ndarray] = None
    mass: Optional[np.ndarray] = None  # total mass after each step

    def series(self, target: int) -> np.ndarray:
        if self.trajectory is not None:
            return self.trajectory[:, target]
        if self.target == target and self.target_series is not None:
            return self.target_series
        raise ValidationError(
            f"vertex {target} was not recorded; rerun with target={target}", "dynamics"
        )


def _step_operator(g: Graph, w: np.ndarray, kappa: float):
    d = np.bincount(g.tails, w, g.n) + np.bincount(g.heads, w, g.n)
    i, j = g.tails, g.heads

    def step(x):
        out = x - kappa * d * x
        out += kappa * (np.bincount(i, w * x[j], g.n) + np.bincount(j, w * x[i], g.n))
        return out

    return step


def simulate_diffusion(
    g: Graph,
    w=None,
    start: int = 0,
    kappa: Optional[float] = None,
    steps: int = 1000,
    target: Optional[int] = None,
    keep_trajectory: Optional[bool] = None,
) -> DiffusionRun:
    """Run ``steps`` updates from a unit point mass at ``start``.

    ``w`` defaults to the graph's own weights.  ``kappa`` above
    :func:`kappa_max` is refused.  The full trajectory is kept when
    ``n * (steps + 1)`` is at most ``MAX_TRAJECTORY_VALUES`` (or when forced
    with ``keep_trajectory``); otherwise only ``target`` and the total mass
    are recorded.
    """
    if isinstance(w, EdgeVector):
        w.check_graph(g)
    w = _weights(g, w)
    if not 0 <= start < g.n:
        raise ValidationError(f"start vertex {start} out of range", "dynamics")
    if target is not None and not 0 <= target < g.n:
        raise ValidationError(f"target vertex {target} out of range", "dynamics")
    if steps < 0:
        raise ValidationError("steps must be non-negative", "dynamics")
    kmax = kappa_max(g, w)
    kappa = default_kappa(g, w) if kappa is None else float(kappa)
    if not kappa > 0:
        raise ValidationError("kappa must be positive", "dynamics")
    if kappa > kmax * (1 + 1e-12):
        raise ValidationError(
            f"kappa={kappa} exceeds the stability bound {kmax}", "dynamics"
        )
    if keep_trajectory is None:
        keep_trajectory = g.n * (steps + 1) <= MAX_TRAJECTORY_VALUES
    if not keep_trajectory and target is None:
        raise ValidationError("a target vertex is needed when the trajectory is not kept", "dynamics")

    step = _step_operator(g, w, kappa)
    x = np.zeros(g.n)
    x[start] = 1.0
    traj = np.empty((steps + 1, g.n)) if keep_trajectory else None
    series = np.empty(steps + 1) if target is not None else None
    mass = np.empty(steps + 1)
    for t in range(steps + 1):
        if t:
            x = step(x)
        if traj is not None:
            traj[t] = x
        if series is not None:
            series[t] = x[target]
        mass[t] = x.sum()
    return DiffusionRun(w, start, kappa, steps, traj, target, series, mass)


def threshold_crossing_time(run: DiffusionRun, target: int, gamma: float) -> Optional[int]:
    """First step at which the target value reaches ``gamma``; None if never."""
    x = run.series(target)
    hit = np.flatnonzero(x >= gamma)
    return int(hit[0]) if hit.size else None


def crossing_time(
    g: Graph,
    w,
    start: int,
    target: int,
    gamma: Optional[float] = None,
    kappa: Optional[float] = None,
    max_steps: int = 1_000_000,
) -> Optional[int]:
    """Step the dynamics only until ``target`` reaches ``gamma``.

    Same update as :func:`simulate_diffusion` without storing anything, for
    sweeps where only the crossing time matters.
    """
    w = _weights(g, w)
    gamma = default_gamma(g.n) if gamma is None else gamma
    kappa = default_kappa(g, w) if kappa is None else float(kappa)
    if kappa > kappa_max(g, w) * (1 + 1e-12) or not kappa > 0:
        raise ValidationError(f"kappa={kappa} outside (0, {kappa_max(g, w)}]", "dynamics")
    step = _step_operator(g, w, kappa)
    x = np.zeros(g.n)
    x[start] = 1.0
    for t in range(max_steps + 1):
        if x[target] >= gamma:
            return t
        x = step(x)
    return None


def compare_kappa(g: Graph, *weightings) -> float:
    """Common step size for comparing several weightings: the default for the
    heaviest one, so every run uses the same clock and stays stable."""
    return min(default_kappa(g, w) for w in weightings)
