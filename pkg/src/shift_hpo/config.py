"""Run configuration and its strict JSON mapping."""

from __future__ import annotations

import enum
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

from .bo import Dim, SearchSpace
from .datasets import ToyConfig
from .density_ratio import UlsifConfig
from .errors import ConfigError
from .learners import LearnerSpec, LossKind


class EstimatorKind(str, enum.Enum):
    ORACLE = "oracle"
    NAIVE = "naive"
    UNBIASED = "unbiased"
    VARIANCE_REDUCED = "variance_reduced"


@dataclass(frozen=True)
class SplitConfig:
    density_frac: float = 0.3
    train_frac_of_rest: float = 0.7
    target_train_frac: float = 0.7


@dataclass(frozen=True)
class CsvSource:
    target_path: str
    source_paths: tuple[str, ...]
    label_column: str

    def __post_init__(self):
        object.__setattr__(self, "source_paths", tuple(self.source_paths))
        if not self.source_paths:
            raise ConfigError("csv data needs at least one source file")


TOY_SPACE = SearchSpace((Dim("theta", -8.0, 8.0),))


@dataclass(frozen=True)
class RunConfig:
    estimator: EstimatorKind = EstimatorKind.VARIANCE_REDUCED
    learner: LearnerSpec = field(default_factory=LearnerSpec)
    loss: LossKind = LossKind.SQUARED_HALF
    space: SearchSpace = TOY_SPACE
    budget: int = 50
    n_init: int = 5
    beta: float = 2.0
    split: SplitConfig = field(default_factory=SplitConfig)
    ulsif: UlsifConfig = field(default_factory=UlsifConfig)
    seeds: tuple[int, ...] = (0,)
    toy: ToyConfig | None = None
    csv: CsvSource | None = None

    def __post_init__(self):
        object.__setattr__(self, "estimator", EstimatorKind(self.estimator))
        object.__setattr__(self, "loss", LossKind(self.loss))
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
        if not self.budget >= self.n_init >= 1:
            raise ConfigError(f"need budget >= n_init >= 1, got {self.budget} and {self.n_init}")
        if not self.seeds:
            raise ConfigError("seeds must be non-empty")
        if (self.toy is None) == (self.csv is None):
            raise ConfigError("exactly one data source (toy or csv) is required")

    @classmethod
    def from_dict(cls, doc: dict) -> "RunConfig":
        doc = dict(doc)
        _reject_unknown(doc, {"estimator", "learner", "loss", "space", "budget", "n_init", "beta",
                              "split", "ulsif", "seeds", "data"}, "config")
        kwargs: dict[str, Any] = {}
        for key in ("estimator", "loss", "budget", "n_init", "beta", "seeds"):
            if key in doc:
                kwargs[key] = doc[key]
        if "learner" in doc:
            kwargs["learner"] = _build(LearnerSpec, doc["learner"], "learner")
        if "space" in doc:
            if not isinstance(doc["space"], list):
                raise ConfigError("space must be a list of dimensions")
            kwargs["space"] = SearchSpace(tuple(_build(Dim, d, "space[]") for d in doc["space"]))
        if "split" in doc:
            kwargs["split"] = _build(SplitConfig, doc["split"], "split")
        if "ulsif" in doc:
            kwargs["ulsif"] = _build(UlsifConfig, doc["ulsif"], "ulsif")
        data = doc.get("data")
        if not isinstance(data, dict) or len(data) != 1:
            raise ConfigError("data must be an object with exactly one of 'toy' or 'csv'")
        (kind, body), = data.items()
        if kind == "toy":
            kwargs["toy"] = _build(ToyConfig, body, "data.toy")
        elif kind == "csv":
            kwargs["csv"] = _build(CsvSource, body, "data.csv")
        else:
            raise ConfigError(f"unknown data source {kind!r}")
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(doc)

    def to_dict(self) -> dict:
        out = {
            "estimator": self.estimator.value,
            "learner": {"kind": self.learner.kind.value, "param": self.learner.param},
            "loss": self.loss.value,
            "space": [{"name": d.name, "low": d.low, "high": d.high, "scale": d.scale.value}
                      for d in self.space.dims],
            "budget": self.budget,
            "n_init": self.n_init,
            "beta": self.beta,
            "split": asdict(self.split),
            "ulsif": _plain(asdict(self.ulsif)),
            "seeds": list(self.seeds),
        }
        if self.toy is not None:
            out["data"] = {"toy": _plain(asdict(self.toy))}
        else:
            out["data"] = {"csv": _plain(asdict(self.csv))}
        return out


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    return obj


def _reject_unknown(doc: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")


def _build(cls, doc, where: str):
    if not isinstance(doc, dict):
        raise ConfigError(f"{where} must be an object")
    _reject_unknown(doc, {f.name for f in fields(cls)}, where)
    try:
        return cls(**doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc

