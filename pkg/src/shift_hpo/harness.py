"""End-to-end hyperparameter search under multi-source covariate shift.

Per seed: draw or load the tasks, split every source into density/train/val
folds, fit one density ratio per source on its density fold, then run BO on
the chosen validation estimator and score the incumbent against held-out
truth.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Sequence

import numpy as np

from . import estimators as est
from .bo import BoHistory, HyperParams, SearchSpace, Trial, run_bo
from .config import TOY_SPACE, EstimatorKind, RunConfig, SplitConfig
from .datasets import (
    LabeledDataset,
    SourceSplit,
    TargetOracle,
    ToyConfig,
    UnlabeledDataset,
    generate_toy,
    load_csv,
    split_source,
    split_target,
)
from .density_ratio import DensityRatioModel, UlsifConfig, fit_ulsif
from .errors import ConfigError, ShiftHpoError
from .learners import LearnerKind, LearnerSpec, LossKind, TrainedModel, loss, train_weighted

log = logging.getLogger(__name__)


def _derive_seed(*parts: int) -> int:
    return int(np.random.SeedSequence(list(parts)).generate_state(1)[0])


class Objective:
    """Validation score of a hyperparameter under one estimator.

    Ratios on the train and val folds are computed once up front; only the
    model, its losses and (for the variance-reduced estimator) the per-task
    divergences change with the hyperparameter.
    """

    def __init__(
        self,
        kind: EstimatorKind,
        splits: Sequence[SourceSplit],
        ratios: Sequence[Any] | None,
        target: UnlabeledDataset,
        oracle_target: LabeledDataset | None,
        learner: LearnerSpec,
        loss_kind: LossKind,
    ):
        self.kind = EstimatorKind(kind)
        self.splits = list(splits)
        self.learner = learner
        self.loss_kind = LossKind(loss_kind)
        self.target = target
        if self.kind is EstimatorKind.ORACLE:
            if oracle_target is None:
                raise ConfigError("the oracle estimator needs labeled target data")
            self.oracle_target = oracle_target
        else:
            # non-oracle objectives never hold target labels
            self.oracle_target = None
        needs_ratios = self.kind in (EstimatorKind.UNBIASED, EstimatorKind.VARIANCE_REDUCED)
        if needs_ratios and (ratios is None or len(ratios) != len(self.splits)):
            raise ConfigError(f"{self.kind.value} needs one fitted ratio model per source task")
        self.n_train = np.array([s.train.n_rows for s in self.splits])
        self.n_val = np.array([s.val.n_rows for s in self.splits])
        if needs_ratios:
            self.train_ratios = [np.asarray(r.evaluate(s.train.features)) for r, s in zip(ratios, self.splits)]
            self.val_ratios = [np.asarray(r.evaluate(s.val.features)) for r, s in zip(ratios, self.splits)]
            self.clipped = [
                float(r.clipped_fraction(s.val.features)) if hasattr(r, "clipped_fraction") else 0.0
                for r, s in zip(ratios, self.splits)
            ]
        else:
            self.train_ratios = self.val_ratios = None
            self.clipped = None

    # training ---------------------------------------------------------
    def _fit(self, theta, row_weights: Sequence[np.ndarray]) -> TrainedModel:
        folds = [(s.train, w) for s, w in zip(self.splits, row_weights)]
        return train_weighted(self.learner, theta, folds, self.loss_kind)

    def train(self, theta) -> TrainedModel:
        if self.learner.kind is LearnerKind.CONSTANT:
            return train_weighted(self.learner, theta, [], self.loss_kind)
        total = int(self.n_train.sum())
        if self.kind in (EstimatorKind.NAIVE, EstimatorKind.ORACLE):
            return self._fit(theta, [np.full(n, 1.0 / total) for n in self.n_train])
        uniform = [w / total for w in self.train_ratios]
        model = self._fit(theta, uniform)
        if self.kind is EstimatorKind.UNBIASED:
            return model
        # variance-reduced: refit with lambda* from divergences on the train folds
        table = est.WeightedLossTable.from_arrays(
            [self._losses(model, s.train) for s in self.splits], self.train_ratios
        )
        divs = est.estimate_divergences(table)
        if divs.all_floored:
            return model
        lam = est.vr_weights(divs, self.n_train).lam
        return self._fit(theta, [l * w for l, w in zip(lam, self.train_ratios)])

    def _losses(self, model: TrainedModel, ds: LabeledDataset) -> np.ndarray:
        return np.asarray(loss(self.loss_kind, model.predict(ds.features), ds.labels), dtype=np.float64).reshape(-1)

    # scoring ----------------------------------------------------------
    def evaluate(self, theta) -> tuple[float, dict]:
        model = self.train(theta)
        if self.kind is EstimatorKind.ORACLE:
            return est.empirical_target_objective(self._losses(model, self.oracle_target)), {}
        val_losses = [self._losses(model, s.val) for s in self.splits]
        if self.kind is EstimatorKind.NAIVE:
            return est.empirical_target_objective(np.concatenate(val_losses)), {}

        table = est.WeightedLossTable.from_arrays(val_losses, self.val_ratios)
        divs = est.estimate_divergences(table)
        fallback = False
        if self.kind is EstimatorKind.UNBIASED:
            weights = est.uniform_weights(self.n_val)
        elif divs.all_floored:
            log.warning("all task divergences at the floor; using uniform weights")
            weights = est.uniform_weights(self.n_val)
            fallback = True
        else:
            weights = est.vr_weights(divs, self.n_val)
        score = est.lambda_unbiased_estimate(table, weights)
        diag = {
            "lambda": weights.lam.tolist(),
            "div_raw": divs.raw.tolist(),
            "div_hat": divs.div_hat.tolist(),
            "variance": est.analytic_variance(weights, divs.div_hat),
            "clipped_fraction": list(self.clipped),
            "fallback": fallback,
        }
        return score, diag

    def __call__(self, theta) -> float:
        return self.evaluate(theta)[0]


def build_objective(
    kind: EstimatorKind | str,
    splits: Sequence[SourceSplit],
    ratios: Sequence[Any] | None,
    target: UnlabeledDataset,
    oracle_target: LabeledDataset | None,
    learner: LearnerSpec,
    loss_kind: LossKind | str,
) -> Objective:
    return Objective(EstimatorKind(kind), splits, ratios, target, oracle_target, learner, LossKind(loss_kind))


# toy ground truth ----------------------------------------------------------

def toy_true_objective(theta: float, mu_target: float, slope: float = 0.7, intercept: float = 0.3,
                       noise_sd: float = 1.0) -> float:
    """Expected (theta - Y)^2 / 2 when X ~ N(mu, 1) and Y = slope X + intercept + noise."""
    gap = theta - (slope * mu_target + intercept)
    return 0.5 * (gap * gap + slope * slope + noise_sd * noise_sd)


def toy_optimum_value(slope: float = 0.7, noise_sd: float = 1.0) -> float:
    return 0.5 * (slope * slope + noise_sd * noise_sd)


def compute_regret(history: BoHistory, true_f: Callable[[HyperParams], float], theta_star_value: float) -> float:
    return float(true_f(history.incumbent.theta)) - theta_star_value


# per-seed pipeline ----------------------------------------------------------

@dataclass
class Prepared:
    """Everything a seed needs before the optimiser starts."""

    target: UnlabeledDataset
    splits: list[SourceSplit]
    ratios: list[DensityRatioModel]
    oracle: TargetOracle | None
    test: LabeledDataset | None = None


def prepare(
    target: UnlabeledDataset,
    sources: Sequence[LabeledDataset],
    split: SplitConfig,
    ulsif: UlsifConfig,
    seed: int,
    oracle: TargetOracle | None = None,
    test: LabeledDataset | None = None,
    fit_ratios: bool = True,
) -> Prepared:
    splits = [
        split_source(ds, split.density_frac, split.train_frac_of_rest, seed=_derive_seed(seed, 1, j))
        for j, ds in enumerate(sources)
    ]
    ratios = []
    if fit_ratios:
        for j, sp in enumerate(splits):
            cfg = replace(ulsif, seed=_derive_seed(seed, 2, j))
            try:
                ratios.append(fit_ulsif(target, sp.density, cfg))
            except ShiftHpoError as exc:
                raise type(exc)(f"seed {seed}, density ratio for source {j}: {exc}") from exc
    return Prepared(target, splits, ratios, oracle, test)


def prepare_toy(toy: ToyConfig, split: SplitConfig, ulsif: UlsifConfig, seed: int,
                fit_ratios: bool = True) -> Prepared:
    tasks = generate_toy(replace(toy, seed=seed))
    return prepare(tasks.target, tasks.sources, split, ulsif, seed, tasks.oracle, fit_ratios=fit_ratios)


def prepare_csv(cfg: RunConfig, seed: int) -> Prepared:
    src = cfg.csv
    full_target = load_csv(src.target_path, src.label_column, task_id=-1)
    if not isinstance(full_target, LabeledDataset):
        raise ConfigError("the target file must carry the label column for final evaluation")
    hpo_part, test = split_target(full_target, cfg.split.target_train_frac, seed=_derive_seed(seed, 3))
    sources = []
    for j, path in enumerate(src.source_paths):
        ds = load_csv(path, src.label_column, task_id=j)
        if not isinstance(ds, LabeledDataset):
            raise ConfigError(f"{path}: source files need the label column")
        sources.append(ds)
    oracle = TargetOracle(hpo_part.features, hpo_part.labels)
    needs = cfg.estimator in (EstimatorKind.UNBIASED, EstimatorKind.VARIANCE_REDUCED)
    return prepare(hpo_part.unlabeled(), sources, cfg.split, cfg.ulsif, seed, oracle, test, fit_ratios=needs)


@dataclass
class SeedResult:
    estimator: EstimatorKind
    seed: int
    history: BoHistory
    final_score: float
    regret: float | None
    regret_bound: float | None = None
    c: float | None = None
    n: int | None = None


def run_estimator(
    prepared: Prepared,
    kind: EstimatorKind,
    space: SearchSpace,
    learner: LearnerSpec,
    loss_kind: LossKind,
    budget: int,
    n_init: int,
    beta: float,
    seed: int,
    toy: ToyConfig | None = None,
    delta: float = 0.1,
) -> SeedResult:
    oracle_target = prepared.oracle.labeled_target() if kind is EstimatorKind.ORACLE else None
    objective = build_objective(kind, prepared.splits, prepared.ratios or None, prepared.target,
                                oracle_target, learner, loss_kind)
    history = run_bo(objective.evaluate, space, budget, n_init, seed, beta)
    theta_hat = history.incumbent.theta

    regret = bound = None
    if toy is not None and learner.kind is LearnerKind.CONSTANT and loss_kind is LossKind.SQUARED_HALF:
        mu = prepared.oracle.mu

        def true_f(theta):
            return toy_true_objective(learner.hyperparameter(theta.as_dict()), mu, toy.slope,
                                      toy.intercept, toy.noise_sd)

        best = toy_optimum_value(toy.slope, toy.noise_sd)
        final = true_f(theta_hat)
        regret = compute_regret(history, true_f, best)
        if kind in (EstimatorKind.UNBIASED, EstimatorKind.VARIANCE_REDUCED):
            bound = _plugin_bound(objective, history, space, learner, toy.slope * mu + toy.intercept, delta)
    elif prepared.test is not None:
        # refit on the labeled target training part, score on the held-out part
        model = train_weighted(learner, theta_hat.as_dict(), [(prepared.oracle.labeled_target(),
                               np.full(prepared.oracle.labels.shape[0], 1.0 / prepared.oracle.labels.shape[0]))],
                               loss_kind)
        final = est.empirical_target_objective(
            loss(loss_kind, model.predict(prepared.test.features), prepared.test.labels))
    else:
        model = objective.train(theta_hat.as_dict())
        lt = prepared.oracle.labeled_target()
        final = est.empirical_target_objective(loss(loss_kind, model.predict(lt.features), lt.labels))
    return SeedResult(kind, seed, history, float(final), regret, bound)


def _plugin_bound(objective: Objective, history: BoHistory, space: SearchSpace, learner: LearnerSpec,
                  theta_star: float, delta: float) -> float | None:
    """Plug-in regret bound with empirical divergences.

    The estimated-objective minimiser over the whole space is approximated by
    the incumbent, so the simple-regret term is zero and two of the three
    variances coincide.
    """
    inc = history.incumbent
    if inc.diagnostics is None or not math.isfinite(inc.score):
        return None
    v_inc = inc.diagnostics["variance"]
    name = learner.param or space.names[0]
    values = dict(inc.theta.as_dict())
    dim = space.dims[space.names.index(name)]
    values[name] = min(max(theta_star, dim.low), dim.high)
    _, diag_star = objective.evaluate(values)
    return est.regret_bound(v_inc, diag_star["variance"], v_inc, 0.0, delta)


# reports -------------------------------------------------------------------

def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _trial_doc(t: Trial) -> dict:
    doc = {"theta": t.theta.as_dict(), "score": _num(t.score)}
    if t.error is not None:
        doc["error"] = t.error
    if t.diagnostics:
        doc["diagnostics"] = t.diagnostics
    return doc


def result_doc(r: SeedResult) -> dict:
    doc = {
        "estimator": r.estimator.value,
        "seed": r.seed,
        "incumbent_index": r.history.incumbent_index,
        "incumbent": r.history.incumbent.theta.as_dict(),
        "incumbent_score": _num(r.history.incumbent.score),
        "final_score": _num(r.final_score),
        "regret": _num(r.regret),
        "regret_bound": _num(r.regret_bound),
        "trials": [_trial_doc(t) for t in r.history.trials],
    }
    if r.c is not None:
        doc["c"] = r.c
    if r.n is not None:
        doc["n"] = r.n
    return doc


def mean_se(values: Sequence[float]) -> tuple[float, float]:
    v = np.asarray([x for x in values if x is not None], dtype=np.float64)
    if v.size == 0:
        return math.nan, math.nan
    se = float(np.std(v, ddof=1) / math.sqrt(v.size)) if v.size > 1 else 0.0
    return float(np.mean(v)), se


def aggregate(results: Sequence[SeedResult]) -> dict:
    m_f, se_f = mean_se([r.final_score for r in results])
    out = {"n_seeds": len(results), "final_score_mean": _num(m_f), "final_score_se": _num(se_f)}
    regrets = [r.regret for r in results if r.regret is not None]
    if regrets:
        m_r, se_r = mean_se(regrets)
        out.update(regret_mean=_num(m_r), regret_se=_num(se_r))
    return out


@dataclass
class RunReport:
    config: dict
    results: list[SeedResult]

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "runs": [result_doc(r) for r in self.results],
            "aggregate": aggregate(self.results),
        }


def run_mscs(config: RunConfig) -> RunReport:
    results = []
    for seed in config.seeds:
        if config.toy is not None:
            needs = config.estimator in (EstimatorKind.UNBIASED, EstimatorKind.VARIANCE_REDUCED)
            prepared = prepare_toy(config.toy, config.split, config.ulsif, seed, fit_ratios=needs)
        else:
            prepared = prepare_csv(config, seed)
        try:
            results.append(run_estimator(prepared, config.estimator, config.space, config.learner, config.loss,
                                         config.budget, config.n_init, config.beta, seed, config.toy))
        except ShiftHpoError as exc:
            raise type(exc)(f"seed {seed}, optimisation: {exc}") from exc
    return RunReport(config.to_dict(), results)


# toy sweep -----------------------------------------------------------------

ALL_ESTIMATORS = (EstimatorKind.ORACLE, EstimatorKind.NAIVE, EstimatorKind.UNBIASED,
                  EstimatorKind.VARIANCE_REDUCED)


def run_toy_sweep(
    c_values: Sequence[float] = (1.0, 2.0, 3.0, 4.0, 5.0),
    k: int = 2,
    n: int = 1000,
    seeds: Sequence[int] = tuple(range(30)),
    estimators: Sequence[EstimatorKind | str] = ALL_ESTIMATORS,
    budget: int = 50,
    n_init: int = 5,
    beta: float = 2.0,
    c_target: float = 1.0,
    split: SplitConfig = SplitConfig(),
    ulsif: UlsifConfig = UlsifConfig(),
) -> list[SeedResult]:
    """Every estimator on every (c, seed) cell; cells share data, splits and ratios."""
    kinds = [EstimatorKind(e) for e in estimators]
    needs = any(k_ in (EstimatorKind.UNBIASED, EstimatorKind.VARIANCE_REDUCED) for k_ in kinds)
    learner = LearnerSpec()
    results = []
    for c in c_values:
        toy = ToyConfig(k=k, n=n, c_source=(float(c),) * k, c_target=c_target)
        for seed in seeds:
            prepared = prepare_toy(toy, split, ulsif, seed, fit_ratios=needs)
            for kind in kinds:
                r = run_estimator(prepared, kind, TOY_SPACE, learner, LossKind.SQUARED_HALF,
                                  budget, n_init, beta, seed, toy)
                r.c, r.n = float(c), n
                results.append(r)
            log.info("c=%s seed=%s done", c, seed)
    return results


def truncated_regret(result: SeedResult, budget: int, toy: ToyConfig, mu_target: float) -> float:
    """Regret of the incumbent after the first ``budget`` trials of a toy run."""
    inc = result.history.truncated(budget).incumbent
    theta = LearnerSpec().hyperparameter(inc.theta)
    return toy_true_objective(theta, mu_target, toy.slope, toy.intercept, toy.noise_sd) - toy_optimum_value(
        toy.slope, toy.noise_sd)


@dataclass(frozen=True)
class NoRegretTable:
    """Mean VR regret over seeds, by source size and by budget."""

    c: float
    n_values: tuple[int, ...]
    budgets: tuple[int, ...]
    regret_by_n: tuple[float, ...]
    regret_by_budget: tuple[float, ...]
    se_by_n: tuple[float, ...]
    se_by_budget: tuple[float, ...]
    n_seeds: int

    @staticmethod
    def _nonincreasing(values: Sequence[float]) -> bool:
        return all(b <= a for a, b in zip(values, values[1:]))

    @property
    def nonincreasing_in_n(self) -> bool:
        return self._nonincreasing(self.regret_by_n)

    @property
    def nonincreasing_in_budget(self) -> bool:
        return self._nonincreasing(self.regret_by_budget)

    def to_dict(self) -> dict:
        return {
            "c": self.c,
            "n_seeds": self.n_seeds,
            "by_n": [{"n": n, "regret_mean": m, "regret_se": s}
                     for n, m, s in zip(self.n_values, self.regret_by_n, self.se_by_n)],
            "by_budget": [{"budget": b, "regret_mean": m, "regret_se": s}
                          for b, m, s in zip(self.budgets, self.regret_by_budget, self.se_by_budget)],
            "nonincreasing_in_n": self.nonincreasing_in_n,
            "nonincreasing_in_budget": self.nonincreasing_in_budget,
        }


def no_regret_sweep(
    n_values: Sequence[int] = (100, 400, 1600),
    budgets: Sequence[int] = (10, 25, 50),
    seeds: Sequence[int] = tuple(range(30)),
    c: float = 1.0,
    k: int = 2,
    n_for_budget: int = 1000,
    n_init: int = 5,
    beta: float = 2.0,
    split: SplitConfig = SplitConfig(),
    ulsif: UlsifConfig = UlsifConfig(),
) -> NoRegretTable:
    """VR regret as the source size grows (full budget) and as the budget grows.

    Budgets share one run per seed: shorter budgets are prefixes of the
    longest, so their incumbents come from truncating its history.
    """
    budgets = tuple(sorted(int(b) for b in budgets))
    kind = EstimatorKind.VARIANCE_REDUCED

    def cell(n: int) -> list[tuple[SeedResult, ToyConfig, float]]:
        toy = ToyConfig(k=k, n=n, c_source=(float(c),) * k, c_target=1.0)
        out = []
        for seed in seeds:
            prepared = prepare_toy(toy, split, ulsif, seed)
            r = run_estimator(prepared, kind, TOY_SPACE, LearnerSpec(), LossKind.SQUARED_HALF,
                              budgets[-1], n_init, beta, seed, toy)
            out.append((r, toy, prepared.oracle.mu))
        return out

    by_n = [mean_se([r.regret for r, _, _ in cell(int(n))]) for n in n_values]
    runs = cell(n_for_budget)
    by_b = [mean_se([truncated_regret(r, b, toy, mu) for r, toy, mu in runs]) for b in budgets]
    return NoRegretTable(
        float(c), tuple(int(n) for n in n_values), budgets,
        tuple(m for m, _ in by_n), tuple(m for m, _ in by_b),
        tuple(s for _, s in by_n), tuple(s for _, s in by_b), len(seeds),
    )


def sweep_summary(results: Sequence[SeedResult]) -> list[dict]:
    cells: dict[tuple, list[SeedResult]] = {}
    for r in results:
        cells.setdefault((r.estimator.value, r.c, r.n), []).append(r)
    rows = []
    for (kind, c, n), rs in sorted(cells.items(), key=lambda kv: (kv[0][1], kv[0][2] or 0, kv[0][0])):
        rows.append({"estimator": kind, "c": c, "n": n, **aggregate(rs)})
    return rows


def unbiased_to_vr_ratio(summary: Sequence[dict]) -> dict[str, float]:
    """Mean final score of Unbiased over that of VR, per c."""
    by = {(row["estimator"], row["c"]): row["final_score_mean"] for row in summary}
    out = {}
    for (kind, c), v in sorted(by.items(), key=lambda kv: kv[0][1]):
        if kind == EstimatorKind.UNBIASED.value and (EstimatorKind.VARIANCE_REDUCED.value, c) in by:
            out[repr(c)] = v / by[(EstimatorKind.VARIANCE_REDUCED.value, c)]
    return out


def sweep_report(results: Sequence[SeedResult], settings: dict) -> dict:
    summary = sweep_summary(results)
    return {
        "experiment": "toy",
        "settings": settings,
        "runs": [result_doc(r) for r in results],
        "summary": summary,
        "unbiased_to_vr_ratio": unbiased_to_vr_ratio(summary),
    }


def flat_csv(results: Sequence[SeedResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["estimator", "c", "seed", "regret", "final_score"])
    for r in results:
        w.writerow([r.estimator.value, "" if r.c is None else repr(r.c), r.seed,
                    "" if r.regret is None else repr(r.regret), repr(r.final_score)])
    return buf.getvalue()


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


# worked two-source example ------------------------------------------------

TABLE1_LOSS = (10.0, 1.0)
TABLE1_TARGET = (0.8, 0.2)
TABLE1_SOURCES = ((0.2, 0.8), (0.9, 0.1))


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tol: float

    @property
    def passed(self) -> bool:
        return abs(self.value - self.expected) <= self.tol

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"[{mark}] {self.name}: got {self.value:.6g}, expected {self.expected} +/- {self.tol}"


@dataclass(frozen=True)
class Table1Report:
    checks: tuple[Check, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def render(self) -> str:
        lines = [c.line() for c in self.checks]
        lines.append("all checks passed" if self.passed else "MISMATCH")
        return "\n".join(lines)


def verify_table1(tol: float = 1e-2) -> Table1Report:
    """Recompute the two-outcome, two-source worked example from its densities."""
    f_t = math.fsum(p * l for p, l in zip(TABLE1_TARGET, TABLE1_LOSS))
    divs = np.array([est.population_divergence(TABLE1_LOSS, ps, TABLE1_TARGET) for ps in TABLE1_SOURCES])
    n = np.array([1, 1])
    ub = est.uniform_weights(n)
    dropped = est.SourceWeighting(np.array([0.0, 1.0]), n)
    vr = est.vr_weights(divs, n)
    checks = (
        Check("target objective f_T", f_t, 8.2, tol),
        Check("Div(T||S1)", divs[0], 252.81, tol),
        Check("Div(T||S2)", divs[1], 4.27, tol),
        Check("variance, uniform weights", est.analytic_variance(ub, divs), 64.27, tol),
        Check("variance, S1 dropped", est.analytic_variance(dropped, divs), 4.27, tol),
        Check("lambda*_1", vr.lam[0], 0.017, tol),
        Check("lambda*_2", vr.lam[1], 0.983, tol),
        Check("variance, variance-reduced weights", est.analytic_variance(vr, divs), 4.21, tol),
    )
    return Table1Report(checks)
