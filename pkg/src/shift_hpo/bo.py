"""Gaussian-process Bayesian optimisation with a lower-confidence-bound acquisition.

The surrogate lives in the unit cube (log-scaled dimensions are transformed
first) and models standardised scores with an isotropic Matern-5/2 kernel.
Kernel lengthscale and signal variance are picked from a small grid by
log marginal likelihood; noise is fixed and only raised when the Cholesky
factorisation fails.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist
from scipy.stats import qmc

from .errors import ConfigError, NumericError

log = logging.getLogger(__name__)

SQRT5 = math.sqrt(5.0)
LENGTHSCALE_GRID = (0.1, 0.3, 1.0)
SIGNAL_GRID = (0.5, 1.0, 2.0)
NOISE_VAR = 1e-4
MAX_NOISE_VAR = 1e-1
N_CANDIDATES = 2048
N_REFINE_STARTS = 4
N_REFINE_PASSES = 16
DUPLICATE_TOL = 1e-9
DUPLICATE_NUDGE = 1e-6


class Scale(str, enum.Enum):
    LINEAR = "linear"
    LOG = "log"


@dataclass(frozen=True)
class Dim:
    name: str
    low: float
    high: float
    scale: Scale = Scale.LINEAR

    def __post_init__(self):
        object.__setattr__(self, "scale", Scale(self.scale))
        if not self.low < self.high:
            raise ConfigError(f"dimension {self.name!r}: low must be < high")
        if self.scale is Scale.LOG and not self.low > 0:
            raise ConfigError(f"dimension {self.name!r}: log scale needs low > 0")


@dataclass(frozen=True)
class HyperParams:
    names: tuple[str, ...]
    values: tuple[float, ...]

    def as_dict(self) -> dict[str, float]:
        return dict(zip(self.names, self.values))

    def __getitem__(self, name: str) -> float:
        return self.as_dict()[name]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype or np.float64)


@dataclass(frozen=True)
class SearchSpace:
    dims: tuple[Dim, ...]

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(self.dims))
        if not self.dims:
            raise ConfigError("search space needs at least one dimension")
        names = [d.name for d in self.dims]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate dimension names in {names}")

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(d.name for d in self.dims)

    def _bounds(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        is_log = np.array([d.scale is Scale.LOG for d in self.dims])
        lo = np.array([math.log(d.low) if d.scale is Scale.LOG else d.low for d in self.dims])
        hi = np.array([math.log(d.high) if d.scale is Scale.LOG else d.high for d in self.dims])
        return lo, hi, is_log

    def to_unit(self, values) -> np.ndarray:
        v = np.asarray(values, dtype=np.float64)
        lo, hi, is_log = self._bounds()
        v = np.where(is_log, np.log(np.where(is_log, v, 1.0)), v)
        return (v - lo) / (hi - lo)

    def from_unit(self, u) -> np.ndarray:
        u = np.clip(np.asarray(u, dtype=np.float64), 0.0, 1.0)
        lo, hi, is_log = self._bounds()
        v = lo + u * (hi - lo)
        v = np.where(is_log, np.exp(v), v)
        low = np.array([d.low for d in self.dims])
        high = np.array([d.high for d in self.dims])
        return np.clip(v, low, high)

    def point(self, values) -> HyperParams:
        v = np.atleast_1d(np.asarray(values, dtype=np.float64))
        if v.shape != (self.ndim,):
            raise ConfigError(f"expected {self.ndim} values, got {v.shape}")
        for d, x in zip(self.dims, v):
            if not d.low <= x <= d.high:
                raise ConfigError(f"{d.name}={x} outside [{d.low}, {d.high}]")
        return HyperParams(self.names, tuple(float(x) for x in v))

    def point_from_unit(self, u) -> HyperParams:
        return HyperParams(self.names, tuple(float(x) for x in self.from_unit(u)))


def matern52(a, b, lengthscales, signal_var: float) -> float:
    a = np.atleast_1d(np.asarray(a, dtype=np.float64))
    b = np.atleast_1d(np.asarray(b, dtype=np.float64))
    r = float(np.sqrt(np.sum(((a - b) / np.asarray(lengthscales, dtype=np.float64)) ** 2)))
    return signal_var * (1.0 + SQRT5 * r + 5.0 * r * r / 3.0) * math.exp(-SQRT5 * r)


def matern52_matrix(A: np.ndarray, B: np.ndarray, lengthscale: float, signal_var: float) -> np.ndarray:
    r = cdist(A / lengthscale, B / lengthscale)
    return signal_var * (1.0 + SQRT5 * r + (5.0 / 3.0) * r * r) * np.exp(-SQRT5 * r)


@dataclass(frozen=True)
class GpSurrogate:
    train_points: np.ndarray = field(repr=False)
    train_targets: np.ndarray = field(repr=False)
    lengthscale: float
    signal_var: float
    noise_var: float
    cholesky_factor: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    target_mean: float
    target_sd: float
    log_marginal_likelihood: float

    @property
    def lengthscales(self) -> np.ndarray:
        return np.full(self.train_points.shape[1], self.lengthscale)

    def predict_unit(self, U) -> tuple[np.ndarray, np.ndarray]:
        """Posterior mean and variance, in score units, at rows of ``U``."""
        U = np.atleast_2d(np.asarray(U, dtype=np.float64))
        Ks = matern52_matrix(U, self.train_points, self.lengthscale, self.signal_var)
        mean_std = Ks @ self.weights
        v = scipy.linalg.solve_triangular(self.cholesky_factor, Ks.T, lower=True)
        var_std = np.maximum(self.signal_var - np.sum(v * v, axis=0), 0.0)
        return (
            self.target_mean + self.target_sd * mean_std,
            self.target_sd**2 * var_std,
        )


def _factor(K: np.ndarray, noise: float) -> tuple[np.ndarray, float]:
    n = K.shape[0]
    while True:
        try:
            L = scipy.linalg.cholesky(K + noise * np.eye(n), lower=True)
            return L, noise
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
            if noise * 10 > MAX_NOISE_VAR * (1 + 1e-12):
                raise NumericError("GP kernel matrix not positive definite at max jitter") from None
            noise *= 10


def gp_fit(
    points,
    scores,
    lengthscale_grid: Sequence[float] = LENGTHSCALE_GRID,
    signal_grid: Sequence[float] = SIGNAL_GRID,
    noise_var: float = NOISE_VAR,
) -> GpSurrogate:
    """Fit a GP to unit-cube ``points`` and their ``scores``."""
    X = np.atleast_2d(np.asarray(points, dtype=np.float64))
    y = np.asarray(scores, dtype=np.float64).reshape(-1)
    if X.shape[0] < 1 or X.shape[0] != y.shape[0]:
        raise ConfigError("gp_fit needs one score per point and at least one point")
    mean = float(np.mean(y))
    sd = float(np.std(y))
    if not sd > 0:
        sd = 1.0
    z = (y - mean) / sd
    n = X.shape[0]
    dist = cdist(X, X)

    best = None
    for ls in lengthscale_grid:
        r = dist / ls
        base = (1.0 + SQRT5 * r + (5.0 / 3.0) * r * r) * np.exp(-SQRT5 * r)
        for sv in signal_grid:
            L, noise = _factor(sv * base, noise_var)
            w = scipy.linalg.cho_solve((L, True), z)
            lml = -0.5 * float(z @ w) - float(np.sum(np.log(np.diag(L)))) - 0.5 * n * math.log(2 * math.pi)
            if best is None or lml > best[0]:
                best = (lml, ls, sv, noise, L, w)
    lml, ls, sv, noise, L, w = best
    return GpSurrogate(X, z, ls, sv, noise, L, w, mean, sd, lml)


def gp_predict(surrogate: GpSurrogate, u) -> tuple[float, float]:
    mean, var = surrogate.predict_unit(np.atleast_2d(u))
    return float(mean[0]), float(var[0])


def acquisition_lcb(mean, variance, beta: float = 2.0):
    """mean - beta * sd; beta multiplies the standard deviation."""
    return mean - beta * np.sqrt(np.maximum(variance, 0.0))


def _lcb_unit(surrogate: GpSurrogate, U: np.ndarray, beta: float) -> np.ndarray:
    mean, var = surrogate.predict_unit(U)
    return acquisition_lcb(mean, var, beta)


def candidate_points(ndim: int, seed: int, n: int = N_CANDIDATES) -> np.ndarray:
    return qmc.Sobol(d=ndim, scramble=True, seed=seed).random(n)


def propose_next(surrogate: GpSurrogate, ndim: int, seed: int, beta: float = 2.0) -> np.ndarray:
    """Minimise the LCB over the unit cube and return the point.

    Scrambled Sobol candidates give the starting set; the best few are then
    polished by a compass search that halves its step whenever no
    coordinate move improves.
    """
    cands = candidate_points(ndim, seed)
    acq = _lcb_unit(surrogate, cands, beta)
    order = np.argsort(acq, kind="stable")[:N_REFINE_STARTS]
    pts = cands[order].copy()
    vals = acq[order].copy()
    steps = np.full(len(pts), 0.05)
    moves = np.vstack([np.eye(ndim), -np.eye(ndim)])
    for _ in range(N_REFINE_PASSES):
        trial = np.clip(pts[:, None, :] + steps[:, None, None] * moves[None, :, :], 0.0, 1.0)
        tv = _lcb_unit(surrogate, trial.reshape(-1, ndim), beta).reshape(len(pts), -1)
        j = np.argmin(tv, axis=1)
        best = tv[np.arange(len(pts)), j]
        improved = best < vals
        pts[improved] = trial[np.arange(len(pts)), j][improved]
        vals[improved] = best[improved]
        steps[~improved] *= 0.5
    return pts[int(np.argmin(vals))]


@dataclass
class Trial:
    theta: HyperParams
    score: float
    diagnostics: dict[str, Any] | None = None
    wall_time: float = 0.0
    error: str | None = None


@dataclass
class BoHistory:
    trials: list[Trial]
    seed: int

    @property
    def scores(self) -> np.ndarray:
        return np.array([t.score for t in self.trials], dtype=np.float64)

    @property
    def incumbent_index(self) -> int:
        return int(np.argmin(self.scores))

    @property
    def incumbent(self) -> Trial:
        return self.trials[self.incumbent_index]

    def incumbent_trace(self) -> np.ndarray:
        return np.minimum.accumulate(self.scores)

    def truncated(self, budget: int) -> "BoHistory":
        return BoHistory(self.trials[:budget], self.seed)


def _call(objective: Callable, theta: HyperParams) -> tuple[float, dict | None]:
    out = objective(theta)
    if isinstance(out, tuple):
        score, diag = out
    else:
        score, diag = out, None
    score = float(score)
    if math.isnan(score):
        raise NumericError("objective returned NaN")
    return score, diag


def _nudge(u: np.ndarray, existing: np.ndarray) -> np.ndarray:
    if existing.size == 0 or np.min(np.linalg.norm(existing - u, axis=1)) >= DUPLICATE_TOL:
        return u
    u = u.copy()
    u[0] = u[0] + DUPLICATE_NUDGE if u[0] + DUPLICATE_NUDGE <= 1.0 else u[0] - DUPLICATE_NUDGE
    return u


def run_bo(
    objective: Callable,
    space: SearchSpace,
    budget: int = 50,
    n_init: int = 5,
    seed: int = 0,
    beta: float = 2.0,
) -> BoHistory:
    """Minimise ``objective`` over ``space`` with ``budget`` evaluations.

    ``objective`` maps HyperParams to a score, or to ``(score, diagnostics)``.
    A failing evaluation is kept in the history with score +inf. The first
    ``m`` trials of a run do not depend on ``budget``, so shorter budgets are
    prefixes of longer ones.
    """
    if not budget >= n_init >= 1:
        raise ConfigError(f"need budget >= n_init >= 1, got budget={budget}, n_init={n_init}")
    rng = np.random.default_rng(seed)
    init_unit = rng.uniform(size=(n_init, space.ndim))
    units: list[np.ndarray] = []
    trials: list[Trial] = []

    for t in range(budget):
        if t < n_init:
            u = init_unit[t]
        else:
            scores = np.array([tr.score for tr in trials])
            ok = np.isfinite(scores)
            step_seed = int(np.random.SeedSequence([seed, t]).generate_state(1)[0])
            if ok.any():
                gp = gp_fit(np.array(units)[ok], scores[ok])
                u = propose_next(gp, space.ndim, step_seed, beta)
            else:
                u = np.random.default_rng(step_seed).uniform(size=space.ndim)
            u = _nudge(u, np.array(units))
        theta = space.point_from_unit(u)
        start = time.perf_counter()
        try:
            score, diag = _call(objective, theta)
            error = None
        except Exception as exc:  # noqa: BLE001 - any objective failure becomes a scored trial
            log.warning("trial %d failed at %s: %s", t, theta.as_dict(), exc)
            score, diag, error = math.inf, None, f"{type(exc).__name__}: {exc}"
        trials.append(Trial(theta, score, diag, time.perf_counter() - start, error))
        units.append(np.asarray(u, dtype=np.float64))
        log.debug("trial %d theta=%s score=%.6g", t, theta.as_dict(), score)
    return BoHistory(trials, seed)
