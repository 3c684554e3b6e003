"""Task datasets, the synthetic toy generator, CSV ingestion and source splitting."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError, IngestionError, InputError, SplitError


def _frozen_matrix(values, name: str) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise InputError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class UnlabeledDataset:
    features: np.ndarray

    def __post_init__(self):
        feats = _frozen_matrix(self.features, "features")
        if feats.shape[0] < 1:
            raise InputError("an unlabeled dataset needs at least one row")
        object.__setattr__(self, "features", feats)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]


@dataclass(frozen=True)
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    task_id: int = 0

    def __post_init__(self):
        feats = _frozen_matrix(self.features, "features")
        labels = np.array(self.labels, dtype=np.float64).reshape(-1)
        if labels.shape[0] != feats.shape[0]:
            raise InputError(
                f"label length {labels.shape[0]} does not match row count {feats.shape[0]}"
            )
        if not np.all(np.isfinite(labels)):
            raise InputError("labels contain non-finite entries")
        labels.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labels)

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    def take(self, rows: np.ndarray) -> "LabeledDataset":
        return LabeledDataset(self.features[rows], self.labels[rows], self.task_id)

    def unlabeled(self) -> UnlabeledDataset:
        return UnlabeledDataset(self.features)


@dataclass(frozen=True)
class SourceSplit:
    """Three disjoint folds of one source task: density, train and val."""

    density: LabeledDataset
    train: LabeledDataset
    val: LabeledDataset


@dataclass(frozen=True)
class TargetOracle:
    """Labels of the target task.

    Kept apart from the unlabeled target so that only the oracle baseline and
    the final evaluation can reach them.
    """

    features: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    mu: float | None = None

    def labeled_target(self) -> LabeledDataset:
        return LabeledDataset(self.features, self.labels, task_id=-1)


@dataclass(frozen=True)
class ToyConfig:
    k: int = 2
    n: int = 1000
    c_source: tuple[float, ...] = (1.0, 1.0)
    c_target: float = 1.0
    slope: float = 0.7
    intercept: float = 0.3
    noise_sd: float = 1.0
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "c_source", tuple(float(c) for c in self.c_source))
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if len(self.c_source) != self.k:
            raise ConfigError(f"c_source must have length k={self.k}, got {len(self.c_source)}")
        if any(not c > 0 for c in self.c_source):
            raise ConfigError("c_source entries must be > 0")
        if not self.c_target > 0:
            raise ConfigError("c_target must be > 0")
        # zero noise is allowed for degenerate checks
        if not self.noise_sd >= 0:
            raise ConfigError("noise_sd must be >= 0")


@dataclass(frozen=True)
class ToyTasks:
    target: UnlabeledDataset
    sources: list[LabeledDataset]
    oracle: TargetOracle

    @property
    def target_mu(self) -> float:
        return self.oracle.mu


def generate_toy(cfg: ToyConfig) -> ToyTasks:
    """Draw one target task and ``cfg.k`` source tasks from the 1-D toy model.

    Every task gets its own child generator, and the task means are drawn
    before any sample, so a given seed yields the same means for every ``n``.
    """
    seq = np.random.SeedSequence(cfg.seed)
    mu_seq, *task_seqs = seq.spawn(cfg.k + 2)
    u = np.random.default_rng(mu_seq).uniform(-1.0, 1.0, size=cfg.k + 1)
    halfwidths = np.array([cfg.c_target, *cfg.c_source])
    mus = halfwidths * u

    def draw(mu, task_seq):
        rng = np.random.default_rng(task_seq)
        x = rng.normal(mu, 1.0, size=cfg.n)
        eps = rng.normal(0.0, 1.0, size=cfg.n)
        y = cfg.slope * x + cfg.intercept + cfg.noise_sd * eps
        return x.reshape(-1, 1), y

    x_t, y_t = draw(mus[0], task_seqs[0])
    sources = []
    for j in range(cfg.k):
        x, y = draw(mus[j + 1], task_seqs[j + 1])
        sources.append(LabeledDataset(x, y, task_id=j))
    oracle = TargetOracle(x_t, y_t, mu=float(mus[0]))
    return ToyTasks(UnlabeledDataset(x_t), sources, oracle)


def _fold_sizes(n: int, density_frac: float, train_frac_of_rest: float) -> tuple[int, int, int]:
    n_density = int(math.floor(n * density_frac + 1e-9))
    rest = n - n_density
    n_train = int(math.floor(rest * train_frac_of_rest + 1e-9))
    return n_density, n_train, rest - n_train


def split_source(
    ds: LabeledDataset,
    density_frac: float = 0.3,
    train_frac_of_rest: float = 0.7,
    seed: int = 0,
) -> SourceSplit:
    if not 0 < density_frac < 1 or not 0 < train_frac_of_rest < 1:
        raise SplitError(
            f"fractions must lie in (0, 1), got {density_frac} and {train_frac_of_rest}"
        )
    sizes = _fold_sizes(ds.n_rows, density_frac, train_frac_of_rest)
    if min(sizes) < 1:
        raise SplitError(
            f"splitting {ds.n_rows} rows gives fold sizes {sizes}; every fold needs a row"
        )
    perm = np.random.default_rng(seed).permutation(ds.n_rows)
    cuts = np.cumsum(sizes)[:-1]
    folds = [ds.take(np.sort(idx)) for idx in np.split(perm, cuts)]
    return SourceSplit(*folds)


def split_target(
    ds: LabeledDataset, train_frac: float = 0.7, seed: int = 0
) -> tuple[LabeledDataset, LabeledDataset]:
    """Split a labeled target file into the HPO part and the held-out test part."""
    n_train = int(math.floor(ds.n_rows * train_frac + 1e-9))
    if n_train < 1 or n_train >= ds.n_rows:
        raise SplitError(f"cannot split {ds.n_rows} target rows with train_frac={train_frac}")
    perm = np.random.default_rng(seed).permutation(ds.n_rows)
    return ds.take(np.sort(perm[:n_train])), ds.take(np.sort(perm[n_train:]))


def load_csv(
    path: str | Path, label_column: str | None = None, task_id: int = 0
) -> LabeledDataset | UnlabeledDataset:
    """Read one task from a headed, all-numeric CSV file.

    With ``label_column`` the file becomes a labeled dataset whose features
    are the remaining columns in header order; without it every column is a
    feature.
    """
    path = Path(path)
    if not path.is_file():
        raise IngestionError(f"{path}: file not found")
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestionError(f"{path}: empty file") from None
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw or all(not cell.strip() for cell in raw):
                continue
            if len(raw) != len(header):
                raise IngestionError(
                    f"{path}:{lineno}: expected {len(header)} cells, found {len(raw)}"
                )
            row = []
            for col, cell in zip(header, raw):
                try:
                    value = float(cell)
                except ValueError:
                    raise IngestionError(
                        f"{path}:{lineno}: column {col!r} has non-numeric cell {cell!r}"
                    ) from None
                if not math.isfinite(value):
                    raise IngestionError(
                        f"{path}:{lineno}: column {col!r} has non-finite cell {cell!r}"
                    )
                row.append(value)
            rows.append(row)
    if not rows:
        raise IngestionError(f"{path}: no data rows")
    table = np.array(rows, dtype=np.float64)

    if label_column is None:
        return UnlabeledDataset(table)
    if label_column not in header:
        raise IngestionError(f"{path}: label column {label_column!r} not in header {header}")
    li = header.index(label_column)
    feature_idx = [i for i in range(len(header)) if i != li]
    if not feature_idx:
        raise IngestionError(f"{path}: no feature columns besides {label_column!r}")
    return LabeledDataset(table[:, feature_idx], table[:, li], task_id=task_id)


def stack_labeled(parts: Sequence[LabeledDataset]) -> LabeledDataset:
    return LabeledDataset(
        np.vstack([p.features for p in parts]),
        np.concatenate([p.labels for p in parts]),
        task_id=parts[0].task_id,
    )
