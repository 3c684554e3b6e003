"""Density ratio estimation by unconstrained least-squares importance fitting.

The ratio p_target(x) / p_source(x) is modelled as a nonnegative combination
of Gaussian bumps centred on target samples. For fixed bandwidth and ridge the
coefficients solve one linear system; the pair itself is picked by K-fold
cross-validation of the squared-error criterion

    J(s) = 1/2 E_source[s(x)^2] - E_target[s(x)]
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist, pdist

from .errors import ConfigError, FittingError, InputError

DEFAULT_BANDWIDTH_FACTORS = (0.25, 0.5, 1.0, 2.0, 4.0)
DEFAULT_RIDGE_GRID = (1e-3, 1e-2, 1e-1, 1.0)


def _as_matrix(data, name: str) -> np.ndarray:
    arr = getattr(data, "features", data)
    arr = np.asarray(arr, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise InputError(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    return arr


def gaussian_design(x: np.ndarray, centers: np.ndarray, bandwidth: float) -> np.ndarray:
    """Matrix of exp(-||x_i - c_l||^2 / (2 bandwidth^2))."""
    return np.exp(-cdist(x, centers, "sqeuclidean") / (2.0 * bandwidth * bandwidth))


@dataclass(frozen=True)
class UlsifConfig:
    num_centers: int = 100
    bandwidth_grid: tuple[float, ...] | None = None  # None: median heuristic x factors
    ridge_grid: tuple[float, ...] = DEFAULT_RIDGE_GRID
    cap: float = 50.0
    cv_folds: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.bandwidth_grid is not None:
            object.__setattr__(self, "bandwidth_grid", tuple(float(b) for b in self.bandwidth_grid))
            if not self.bandwidth_grid or min(self.bandwidth_grid) <= 0:
                raise ConfigError("bandwidth_grid must be non-empty and positive")
        object.__setattr__(self, "ridge_grid", tuple(float(r) for r in self.ridge_grid))
        if not self.ridge_grid or min(self.ridge_grid) < 0:
            raise ConfigError("ridge_grid must be non-empty and nonnegative")
        if self.num_centers < 1:
            raise ConfigError("num_centers must be >= 1")
        if self.cv_folds < 2:
            raise ConfigError("cv_folds must be >= 2")
        if not self.cap > 0:
            raise ConfigError("cap must be > 0")


@dataclass(frozen=True)
class DensityRatioModel:
    centers: np.ndarray = field(repr=False)
    bandwidth: float
    ridge: float
    alpha: np.ndarray = field(repr=False)
    cap: float = 50.0

    def __post_init__(self):
        centers = np.array(self.centers, dtype=np.float64)
        if centers.ndim == 1:
            centers = centers.reshape(-1, 1)
        alpha = np.array(self.alpha, dtype=np.float64).reshape(-1)
        if centers.shape[0] < 1 or alpha.shape[0] != centers.shape[0]:
            raise InputError("need one coefficient per center and at least one center")
        if not self.bandwidth > 0 or not self.cap > 0:
            raise InputError("bandwidth and cap must be positive")
        centers.setflags(write=False)
        alpha.setflags(write=False)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "alpha", alpha)

    @property
    def dim(self) -> int:
        return self.centers.shape[1]

    def raw(self, x) -> np.ndarray:
        """Unclipped model output for a batch of rows."""
        x = _as_matrix(x, "x")
        if x.shape[1] != self.dim:
            raise InputError(f"expected dimension {self.dim}, got {x.shape[1]}")
        return gaussian_design(x, self.centers, self.bandwidth) @ self.alpha

    def evaluate(self, x) -> np.ndarray:
        return np.clip(self.raw(x), 0.0, self.cap)

    def clipped_fraction(self, x) -> float:
        raw = self.raw(x)
        return float(np.mean((raw > self.cap) | (raw < 0.0)))

    def to_dict(self) -> dict:
        return {
            "centers": self.centers.tolist(),
            "bandwidth": self.bandwidth,
            "ridge": self.ridge,
            "alpha": self.alpha.tolist(),
            "cap": self.cap,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DensityRatioModel":
        return cls(
            centers=np.asarray(doc["centers"], dtype=np.float64),
            bandwidth=float(doc["bandwidth"]),
            ridge=float(doc["ridge"]),
            alpha=np.asarray(doc["alpha"], dtype=np.float64),
            cap=float(doc["cap"]),
        )

    def save(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "DensityRatioModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def evaluate_ratio(model: DensityRatioModel, x) -> float:
    """Clipped ratio at a single feature vector."""
    x = np.asarray(x, dtype=np.float64).reshape(1, -1)
    return float(model.evaluate(x)[0])


def ulsif_objective(alpha, design_source: np.ndarray, design_target: np.ndarray) -> float:
    """Empirical J = 1/2 mean_source(s^2) - mean_target(s)."""
    s_src = design_source @ alpha
    s_tgt = design_target @ alpha
    return 0.5 * float(np.mean(s_src * s_src)) - float(np.mean(s_tgt))


def _solve(H: np.ndarray, h: np.ndarray, ridge: float) -> np.ndarray:
    A = H + ridge * np.eye(H.shape[0])
    try:
        alpha = scipy.linalg.solve(A, h, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise FittingError(f"uLSIF system is singular at ridge={ridge}") from exc
    if not np.all(np.isfinite(alpha)):
        raise FittingError(f"uLSIF solve produced non-finite coefficients at ridge={ridge}")
    alpha = np.maximum(alpha, 0.0)
    # Rounding negatives to zero can raise J above the zero model; rescaling
    # along alpha restores J <= 0 since h >= 0 and H is PSD.
    quad = float(alpha @ H @ alpha)
    lin = float(h @ alpha)
    if quad > 0 and 0.5 * quad - lin > 0:
        alpha = alpha * (lin / quad)
    return alpha


def _pick_centers(target: np.ndarray, num_centers: int, seed: int) -> np.ndarray:
    b = min(num_centers, target.shape[0])
    idx = np.random.default_rng(seed).choice(target.shape[0], size=b, replace=False)
    return target[np.sort(idx)]


def median_heuristic(target: np.ndarray, source: np.ndarray, seed: int = 0, max_points: int = 500) -> float:
    pooled = np.vstack([target, source])
    if pooled.shape[0] > max_points:
        idx = np.random.default_rng(seed).choice(pooled.shape[0], size=max_points, replace=False)
        pooled = pooled[idx]
    if pooled.shape[0] < 2:
        return 1.0
    med = float(np.median(pdist(pooled)))
    return med if med > 0 else 1.0


def bandwidth_grid_for(target: np.ndarray, source: np.ndarray, cfg: UlsifConfig) -> tuple[float, ...]:
    if cfg.bandwidth_grid is not None:
        return cfg.bandwidth_grid
    med = median_heuristic(target, source, cfg.seed)
    return tuple(med * f for f in DEFAULT_BANDWIDTH_FACTORS)


def _fold_ids(n: int, folds: int, rng: np.random.Generator) -> np.ndarray:
    ids = np.empty(n, dtype=np.int64)
    ids[rng.permutation(n)] = np.arange(n) % folds
    return ids


def cv_scores(target, source, cfg: UlsifConfig) -> dict[tuple[float, float], float]:
    """Cross-validated J for every (bandwidth, ridge) grid pair.

    Pairs whose fit fails on some fold are left out of the result.
    """
    xt = _as_matrix(target, "target")
    xs = _as_matrix(source, "source")
    if xt.shape[1] != xs.shape[1]:
        raise InputError(f"dimension mismatch: target d={xt.shape[1]}, source d={xs.shape[1]}")
    centers = _pick_centers(xt, cfg.num_centers, cfg.seed)
    folds = min(cfg.cv_folds, xt.shape[0], xs.shape[0])
    rng = np.random.default_rng(cfg.seed)
    scores: dict[tuple[float, float], float] = {}
    if folds < 2:
        # too few rows to hold any out: score in-sample
        for bw in bandwidth_grid_for(xt, xs, cfg):
            phi_t = gaussian_design(xt, centers, bw)
            phi_s = gaussian_design(xs, centers, bw)
            for ridge in cfg.ridge_grid:
                try:
                    alpha = _solve(phi_s.T @ phi_s / xs.shape[0], phi_t.mean(axis=0), ridge)
                except FittingError:
                    continue
                scores[(bw, ridge)] = ulsif_objective(alpha, phi_s, phi_t)
        return scores
    t_ids = _fold_ids(xt.shape[0], folds, rng)
    s_ids = _fold_ids(xs.shape[0], folds, rng)

    for bw in bandwidth_grid_for(xt, xs, cfg):
        phi_t = gaussian_design(xt, centers, bw)
        phi_s = gaussian_design(xs, centers, bw)
        H_parts = [phi_s[s_ids == f].T @ phi_s[s_ids == f] for f in range(folds)]
        h_parts = [phi_t[t_ids == f].sum(axis=0) for f in range(folds)]
        H_all, h_all = sum(H_parts), sum(h_parts)
        for ridge in cfg.ridge_grid:
            total = 0.0
            try:
                for f in range(folds):
                    n_s = np.count_nonzero(s_ids != f)
                    n_t = np.count_nonzero(t_ids != f)
                    alpha = _solve((H_all - H_parts[f]) / n_s, (h_all - h_parts[f]) / n_t, ridge)
                    total += ulsif_objective(alpha, phi_s[s_ids == f], phi_t[t_ids == f])
            except FittingError:
                continue
            scores[(bw, ridge)] = total / folds
    return scores


def select_hyperparams(target, source, cfg: UlsifConfig) -> tuple[float, float]:
    """Grid pair with the lowest cross-validated J.

    Ties go to the larger bandwidth, then the larger ridge.
    """
    xt = _as_matrix(target, "target")
    xs = _as_matrix(source, "source")
    grid = bandwidth_grid_for(xt, xs, cfg)
    if len(grid) == 1 and len(cfg.ridge_grid) == 1:
        return grid[0], cfg.ridge_grid[0]
    scores = cv_scores(xt, xs, cfg)
    if not scores:
        raise FittingError("uLSIF fit failed for every grid pair")
    return min(scores, key=lambda p: (scores[p], -p[0], -p[1]))


def fit_ulsif_fixed(target, source, bandwidth: float, ridge: float, cfg: UlsifConfig) -> DensityRatioModel:
    xt = _as_matrix(target, "target")
    xs = _as_matrix(source, "source")
    if xt.shape[1] != xs.shape[1]:
        raise InputError(f"dimension mismatch: target d={xt.shape[1]}, source d={xs.shape[1]}")
    centers = _pick_centers(xt, cfg.num_centers, cfg.seed)
    phi_s = gaussian_design(xs, centers, bandwidth)
    phi_t = gaussian_design(xt, centers, bandwidth)
    alpha = _solve(phi_s.T @ phi_s / xs.shape[0], phi_t.mean(axis=0), ridge)
    return DensityRatioModel(centers, bandwidth, ridge, alpha, cfg.cap)


def fit_ulsif(target, source, cfg: UlsifConfig | None = None) -> DensityRatioModel:
    """Fit p_target / p_source from unlabeled target rows and source rows."""
    cfg = cfg or UlsifConfig()
    xt = _as_matrix(target, "target")
    xs = _as_matrix(source, "source")
    if xt.shape[1] != xs.shape[1]:
        raise InputError(f"dimension mismatch: target d={xt.shape[1]}, source d={xs.shape[1]}")
    bandwidth, ridge = select_hyperparams(xt, xs, cfg)
    return fit_ulsif_fixed(xt, xs, bandwidth, ridge, cfg)
