"""Models trained by weighted empirical risk minimisation, and their losses."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg

from .datasets import LabeledDataset
from .errors import InputError, NumericError, TrainingError

BCE_EPS = 1e-7


class LossKind(str, enum.Enum):
    SQUARED_HALF = "squared_half"
    SQUARED = "squared"
    ABSOLUTE = "absolute"
    BCE = "bce"
    ZERO_ONE = "zero_one"


def loss(kind: LossKind | str, prediction, label):
    """Elementwise loss; scalars in give a float out."""
    kind = LossKind(kind)
    p = np.asarray(prediction, dtype=np.float64)
    y = np.asarray(label, dtype=np.float64)
    if kind is LossKind.SQUARED_HALF:
        out = 0.5 * (p - y) ** 2
    elif kind is LossKind.SQUARED:
        out = (p - y) ** 2
    elif kind is LossKind.ABSOLUTE:
        out = np.abs(p - y)
    elif kind is LossKind.BCE:
        if np.any((y != 0) & (y != 1)):
            raise InputError("binary cross-entropy needs labels in {0, 1}")
        q = np.clip(p, BCE_EPS, 1.0 - BCE_EPS)
        out = -(y * np.log(q) + (1.0 - y) * np.log1p(-q))
    else:
        out = ((p >= 0.5).astype(np.float64) != y).astype(np.float64)
    return float(out) if out.ndim == 0 else out


class LearnerKind(str, enum.Enum):
    CONSTANT = "constant"
    RIDGE = "ridge"


@dataclass(frozen=True)
class LearnerSpec:
    """Which model to train and which hyperparameter drives it.

    ``param`` names the search-space dimension the learner reads; ``None``
    means the first one.
    """

    kind: LearnerKind = LearnerKind.CONSTANT
    param: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", LearnerKind(self.kind))

    def hyperparameter(self, theta: Mapping[str, float] | Sequence[float] | float) -> float:
        if hasattr(theta, "as_dict"):
            theta = theta.as_dict()
        if isinstance(theta, Mapping):
            if self.param is not None:
                return float(theta[self.param])
            return float(next(iter(theta.values())))
        return float(np.atleast_1d(np.asarray(theta, dtype=np.float64))[0])


@dataclass(frozen=True)
class TrainedModel:
    kind: LearnerKind
    coef: np.ndarray = field(default_factory=lambda: np.zeros(0))
    intercept: float = 0.0

    def predict(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim == 1:
            x = x.reshape(1, -1) if self.kind is LearnerKind.RIDGE else x.reshape(-1, 1)
        if self.kind is LearnerKind.CONSTANT:
            return np.full(x.shape[0], self.intercept)
        if x.shape[1] != self.coef.shape[0]:
            raise InputError(f"model expects {self.coef.shape[0]} features, got {x.shape[1]}")
        return x @ self.coef + self.intercept


def predict(model: TrainedModel, x) -> float:
    return float(model.predict(np.atleast_1d(np.asarray(x, dtype=np.float64)).reshape(1, -1))[0])


def weighted_ridge(x: np.ndarray, y: np.ndarray, w: np.ndarray, reg: float) -> tuple[np.ndarray, float]:
    """Solve (Xc' W Xc + reg I) beta = Xc' W yc with an unpenalised intercept.

    Centering on the weighted means is what leaves the intercept out of the
    penalty. The regulariser is not rescaled with the weights.
    """
    total = w.sum()
    x_bar = w @ x / total
    y_bar = w @ y / total
    xc = x - x_bar
    yc = y - y_bar
    A = (xc * w[:, None]).T @ xc + reg * np.eye(x.shape[1])
    b = (xc * w[:, None]).T @ yc
    try:
        beta = scipy.linalg.solve(A, b, assume_a="sym")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
        raise NumericError("weighted ridge normal equations are singular") from exc
    if not np.all(np.isfinite(beta)):
        raise NumericError("weighted ridge produced non-finite coefficients")
    return beta, float(y_bar - x_bar @ beta)


def train_weighted(
    spec: LearnerSpec,
    theta,
    train_folds: Sequence[tuple[LabeledDataset, np.ndarray]],
    loss_kind: LossKind | str = LossKind.SQUARED_HALF,
) -> TrainedModel:
    """Fit ``spec`` on the pooled folds, one nonnegative weight per row.

    The ridge learner always minimises weighted squared error; ``loss_kind``
    only matters for validation.
    """
    value = spec.hyperparameter(theta)
    if spec.kind is LearnerKind.CONSTANT:
        return TrainedModel(LearnerKind.CONSTANT, np.zeros(0), value)

    if not value > 0:
        raise TrainingError(f"ridge regulariser must be > 0, got {value}")
    xs, ys, ws = [], [], []
    for ds, weights in train_folds:
        weights = np.asarray(weights, dtype=np.float64).reshape(-1)
        if weights.shape[0] != ds.n_rows:
            raise TrainingError(f"{weights.shape[0]} weights for {ds.n_rows} rows")
        xs.append(ds.features)
        ys.append(ds.labels)
        ws.append(weights)
    w = np.concatenate(ws)
    if not np.all(np.isfinite(w)) or np.any(w < 0):
        raise TrainingError("training weights must be finite and nonnegative")
    if not np.any(w > 0):
        raise TrainingError("every training weight is zero")
    beta, intercept = weighted_ridge(np.vstack(xs), np.concatenate(ys), w, value)
    return TrainedModel(LearnerKind.RIDGE, beta, intercept)
