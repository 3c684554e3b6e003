"""Importance-weighted estimators of the target objective.

Every estimator here has the form

    f_hat = sum_j lam_j * sum_i w_j(x_ij) * L_ij,   lam_j >= 0,  sum_j lam_j * n_j = 1

which is unbiased for the target loss whenever the ratios are exact. The
choice of lam only changes the variance, sum_j lam_j^2 * n_j * Div_j, and the
weights proportional to 1 / Div_j minimise it.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AssumptionError, InputError, WeightingError

CONSTRAINT_TOL = 1e-9
FLOOR_REL = 1e-6


class WeightingKind(str, enum.Enum):
    UNIFORM = "uniform"
    VARIANCE_REDUCED = "variance_reduced"
    CUSTOM = "custom"


@dataclass(frozen=True)
class TaskLosses:
    losses: np.ndarray
    ratios: np.ndarray

    def __post_init__(self):
        losses = np.asarray(self.losses, dtype=np.float64).reshape(-1)
        ratios = np.asarray(self.ratios, dtype=np.float64).reshape(-1)
        if losses.shape != ratios.shape:
            raise InputError(f"losses {losses.shape} and ratios {ratios.shape} differ in length")
        if not (np.all(np.isfinite(losses)) and np.all(np.isfinite(ratios))):
            raise InputError("losses and ratios must be finite")
        object.__setattr__(self, "losses", losses)
        object.__setattr__(self, "ratios", ratios)

    @property
    def n(self) -> int:
        return self.losses.shape[0]

    @property
    def weighted(self) -> np.ndarray:
        return self.ratios * self.losses


@dataclass(frozen=True)
class WeightedLossTable:
    tasks: tuple[TaskLosses, ...]

    def __post_init__(self):
        object.__setattr__(self, "tasks", tuple(self.tasks))
        if not self.tasks:
            raise InputError("need at least one source task")

    @classmethod
    def from_arrays(cls, losses: Sequence, ratios: Sequence) -> "WeightedLossTable":
        return cls(tuple(TaskLosses(l, r) for l, r in zip(losses, ratios, strict=True)))

    @property
    def n_per_task(self) -> np.ndarray:
        return np.array([t.n for t in self.tasks], dtype=np.int64)


@dataclass(frozen=True)
class SourceWeighting:
    lam: np.ndarray
    n_per_task: np.ndarray
    kind: WeightingKind = WeightingKind.CUSTOM

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=np.float64).reshape(-1)
        n = np.asarray(self.n_per_task, dtype=np.int64).reshape(-1)
        if lam.shape != n.shape:
            raise WeightingError(f"{lam.shape[0]} weights for {n.shape[0]} tasks")
        if np.any(lam < 0) or not np.all(np.isfinite(lam)):
            raise WeightingError(f"weights must be finite and nonnegative, got {lam}")
        total = math.fsum(lam * n)
        if abs(total - 1.0) > CONSTRAINT_TOL:
            raise WeightingError(f"sum_j lam_j * n_j = {total!r}, expected 1")
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "n_per_task", n)
        object.__setattr__(self, "kind", WeightingKind(self.kind))


@dataclass(frozen=True)
class DivergenceEstimate:
    raw: np.ndarray
    div_hat: np.ndarray
    floor: float

    @property
    def all_floored(self) -> bool:
        return bool(np.all(self.raw <= self.floor))


def empirical_target_objective(losses) -> float:
    """Plain mean loss on labeled target rows."""
    losses = np.asarray(losses, dtype=np.float64).reshape(-1)
    if losses.size == 0:
        raise InputError("cannot average an empty loss vector")
    return math.fsum(losses) / losses.size


def lambda_unbiased_estimate(table: WeightedLossTable, weights: SourceWeighting) -> float:
    if len(table.tasks) != weights.lam.shape[0]:
        raise WeightingError(f"{weights.lam.shape[0]} weights for {len(table.tasks)} tasks")
    if not np.array_equal(table.n_per_task, weights.n_per_task):
        raise WeightingError("weighting was built for different task sizes")
    return math.fsum(lam * math.fsum(t.weighted) for lam, t in zip(weights.lam, table.tasks))


def uniform_weights(n_per_task) -> SourceWeighting:
    n = np.asarray(n_per_task, dtype=np.int64).reshape(-1)
    if n.size == 0 or np.any(n < 1):
        raise InputError(f"every task needs at least one row, got {n}")
    total = int(n.sum())
    return SourceWeighting(np.full(n.shape, 1.0 / total), n, WeightingKind.UNIFORM)


def estimate_divergence(losses, ratios) -> float:
    """Second moment of w*L minus its squared mean, on one task's rows."""
    t = TaskLosses(losses, ratios)
    if t.n == 0:
        raise InputError("cannot estimate a divergence from zero rows")
    wl = t.weighted
    first = math.fsum(wl) / t.n
    second = math.fsum(wl * wl) / t.n
    return second - first * first


def floor_divergences(raw) -> DivergenceEstimate:
    raw = np.asarray(raw, dtype=np.float64).reshape(-1)
    floor = FLOOR_REL * max(1.0, float(np.max(raw)))
    return DivergenceEstimate(raw, np.maximum(raw, floor), floor)


def estimate_divergences(table: WeightedLossTable) -> DivergenceEstimate:
    return floor_divergences([estimate_divergence(t.losses, t.ratios) for t in table.tasks])


def population_divergence(loss_by_outcome, source_probs, target_probs) -> float:
    """Exact divergence on a finite outcome space."""
    loss = np.asarray(loss_by_outcome, dtype=np.float64)
    p_s = np.asarray(source_probs, dtype=np.float64)
    p_t = np.asarray(target_probs, dtype=np.float64)
    if not (loss.shape == p_s.shape == p_t.shape):
        raise InputError("loss and probability vectors must share one shape")
    for name, p in (("source", p_s), ("target", p_t)):
        if np.any(p < 0) or abs(math.fsum(p) - 1.0) > 1e-9:
            raise InputError(f"{name} probabilities must be nonnegative and sum to 1")
    if np.any((p_t > 0) & (p_s <= 0)):
        raise AssumptionError("source has zero probability where the target does not")
    support = p_s > 0
    w = np.zeros_like(p_t)
    w[support] = p_t[support] / p_s[support]
    second = math.fsum(p_s * w * w * loss * loss)
    f_t = math.fsum(p_t * loss)
    return second - f_t * f_t


def vr_weights(divs, n_per_task) -> SourceWeighting:
    """lam_j = 1 / (Div_j * sum_m n_m / Div_m)."""
    div = divs.div_hat if isinstance(divs, DivergenceEstimate) else np.asarray(divs, dtype=np.float64)
    n = np.asarray(n_per_task, dtype=np.int64).reshape(-1)
    if div.shape != n.shape:
        raise InputError(f"{div.shape[0]} divergences for {n.shape[0]} tasks")
    if np.any(div <= 0):
        raise InputError("divergences must be floored to positive values first")
    inv = n / div
    scale = math.fsum(inv)
    lam = 1.0 / (div * scale)
    # renormalise so the constraint holds to rounding error
    lam = lam / math.fsum(lam * n)
    return SourceWeighting(lam, n, WeightingKind.VARIANCE_REDUCED)


def analytic_variance(weights, divs, n_per_task=None) -> float:
    """sum_j lam_j^2 * n_j * Div_j."""
    lam = weights.lam if isinstance(weights, SourceWeighting) else np.asarray(weights, dtype=np.float64)
    if n_per_task is None:
        n_per_task = weights.n_per_task
    n = np.asarray(n_per_task, dtype=np.float64)
    div = divs.div_hat if isinstance(divs, DivergenceEstimate) else np.asarray(divs, dtype=np.float64)
    if not (lam.shape == n.shape == div.shape):
        raise InputError("weights, sizes and divergences must have matching lengths")
    return math.fsum(lam * lam * n * div)


def optimal_variance(divs, n_per_task) -> float:
    """Closed form (sum_j n_j / Div_j)^-1 reached by the variance-reduced weights."""
    div = np.asarray(divs, dtype=np.float64)
    return 1.0 / math.fsum(np.asarray(n_per_task, dtype=np.float64) / div)


def regret_bound(
    variance_at_incumbent: float,
    variance_at_opt: float,
    variance_at_est_opt: float,
    simple_regret: float,
    delta: float,
) -> float:
    """High-probability regret bound from Chebyshev on the two estimation gaps.

    Holds with probability at least 1 - delta.
    """
    if not 0 < delta < 1:
        raise InputError(f"delta must lie in (0, 1), got {delta}")
    variances = (variance_at_incumbent, variance_at_opt, variance_at_est_opt)
    if min(variances) < 0:
        raise InputError("variances must be nonnegative")
    return (
        simple_regret
        + math.sqrt(2.0 * variance_at_incumbent / delta)
        + math.sqrt(2.0 * (variance_at_opt + variance_at_est_opt) / delta)
    )
