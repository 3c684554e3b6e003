import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shift_hpo.errors import AssumptionError, InputError, WeightingError
from shift_hpo.estimators import (
    SourceWeighting,
    WeightedLossTable,
    analytic_variance,
    empirical_target_objective,
    estimate_divergence,
    estimate_divergences,
    floor_divergences,
    lambda_unbiased_estimate,
    optimal_variance,
    population_divergence,
    regret_bound,
    uniform_weights,
    vr_weights,
)

# two-outcome example (x1, x2): target (0.8, 0.2), S1 (0.2, 0.8), S2 (0.9, 0.1), L = (10, 1)
LOSS = np.array([10.0, 1.0])
P_T = np.array([0.8, 0.2])
P_S1 = np.array([0.2, 0.8])
P_S2 = np.array([0.9, 0.1])

# hand-derived: f_T = 8.2; E_S1[w^2 L^2] = 0.2*16*100 + 0.8*(1/16) = 320.05
# E_S2[w^2 L^2] = 0.9*(64/81)*100 + 0.1*4 = 71.5111..; minus 8.2^2 = 67.24
DIV1 = 320.05 - 67.24
DIV2 = 640.0 / 9.0 + 0.4 - 67.24


def test_population_divergences_match_hand_values():
    assert population_divergence(LOSS, P_S1, P_T) == pytest.approx(DIV1, abs=1e-9)
    assert population_divergence(LOSS, P_S2, P_T) == pytest.approx(DIV2, abs=1e-9)
    assert DIV1 == pytest.approx(252.81, abs=1e-2)
    assert DIV2 == pytest.approx(4.27, abs=1e-2)


def test_uniform_and_optimal_variance_on_example():
    n = [1, 1]
    uni = uniform_weights(n)
    np.testing.assert_allclose(uni.lam, [0.5, 0.5])
    assert analytic_variance(uni, [DIV1, DIV2]) == pytest.approx((DIV1 + DIV2) / 4, rel=1e-12)
    vr = vr_weights([DIV1, DIV2], n)
    expected = 1.0 / (1.0 / DIV1 + 1.0 / DIV2)
    assert analytic_variance(vr, [DIV1, DIV2]) == pytest.approx(expected, rel=1e-12)
    assert optimal_variance([DIV1, DIV2], n) == pytest.approx(expected, rel=1e-12)
    # most weight on the low-divergence source
    assert vr.lam[1] > 0.98


def test_single_draw_unbiased_estimate():
    # S1 draws x1 (w = 4), S2 draws x1 (w = 8/9), both with loss 10
    table = WeightedLossTable.from_arrays([[10.0], [10.0]], [[4.0], [8.0 / 9.0]])
    est = lambda_unbiased_estimate(table, uniform_weights([1, 1]))
    assert est == pytest.approx((40.0 + 80.0 / 9.0) / 2.0, abs=1e-12)


def test_estimate_divergence_worked_example():
    # w*L = (40, 0.25): mean of squares 800.03125, mean 20.125
    assert estimate_divergence([10.0, 1.0], [4.0, 0.25]) == pytest.approx(395.015625, abs=1e-12)


def test_estimate_divergence_converges_to_population_value():
    rng = np.random.default_rng(0)
    idx = rng.choice(2, size=200_000, p=P_S1)
    w = P_T / P_S1
    est = estimate_divergence(LOSS[idx], w[idx])
    assert est == pytest.approx(DIV1, rel=0.02)


@pytest.mark.parametrize("kind", ["uniform", "variance_reduced"])
def test_unbiasedness_by_resampling(kind):
    rng = np.random.default_rng(1)
    n = (3, 5)
    reps = 100_000
    sources = (P_S1, P_S2)
    w = [P_T / p for p in sources]
    lam = uniform_weights(n) if kind == "uniform" else vr_weights([DIV1, DIV2], n)
    sums = []
    for p, wj, nj in zip(sources, w, n):
        idx = rng.choice(2, size=(reps, nj), p=p)
        sums.append((wj[idx] * LOSS[idx]).sum(axis=1))
    est = lam.lam[0] * sums[0] + lam.lam[1] * sums[1]
    se = est.std(ddof=1) / math.sqrt(reps)
    assert abs(est.mean() - 8.2) < 3 * se
    # the empirical variance matches the analytic formula
    var = analytic_variance(lam, [DIV1, DIV2])
    assert est.var(ddof=1) == pytest.approx(var, rel=0.05)


def test_vr_weights_minimise_variance_over_random_weightings():
    rng = np.random.default_rng(2)
    for _ in range(20):
        k = int(rng.integers(2, 6))
        n = rng.integers(1, 50, size=k)
        div = rng.uniform(0.01, 100.0, size=k)
        best = analytic_variance(vr_weights(div, n), div, n)
        assert best == pytest.approx(optimal_variance(div, n), rel=1e-9)
        for _ in range(1000):
            lam = rng.dirichlet(np.ones(k))
            lam = lam / (lam @ n)
            assert best <= analytic_variance(lam, div, n) * (1 + 1e-9)


@given(
    n=st.lists(st.integers(1, 1000), min_size=1, max_size=8),
    seed=st.integers(0, 2**32 - 1),
)
def test_vr_weights_satisfy_constraint(n, seed):
    div = np.random.default_rng(seed).uniform(1e-6, 1e6, size=len(n))
    w = vr_weights(div, n)
    assert math.fsum(w.lam * np.array(n)) == pytest.approx(1.0, abs=1e-12)
    assert np.all(w.lam > 0)


def test_uniform_weights_reproduce_pooled_mean():
    rng = np.random.default_rng(3)
    losses = [rng.uniform(size=4), rng.uniform(size=7)]
    ratios = [rng.uniform(size=4), rng.uniform(size=7)]
    table = WeightedLossTable.from_arrays(losses, ratios)
    est = lambda_unbiased_estimate(table, uniform_weights([4, 7]))
    pooled = np.concatenate([l * r for l, r in zip(losses, ratios)]).mean()
    assert est == pytest.approx(pooled, rel=1e-12)


def test_weighting_constraint_is_enforced():
    with pytest.raises(WeightingError):
        SourceWeighting([0.5, 0.5], [2, 2])
    with pytest.raises(WeightingError):
        SourceWeighting([-0.1, 0.6], [1, 1])
    table = WeightedLossTable.from_arrays([[1.0]], [[1.0]])
    with pytest.raises(WeightingError):
        lambda_unbiased_estimate(table, uniform_weights([1, 1]))


def test_floor_prevents_zero_division():
    d = floor_divergences([0.0, 4.0])
    assert d.floor == pytest.approx(4e-6)
    assert d.div_hat[0] == pytest.approx(4e-6)
    assert not d.all_floored
    w = vr_weights(d, [10, 10])
    assert np.all(np.isfinite(w.lam))
    assert floor_divergences([0.0, 0.0]).all_floored


def test_estimate_divergences_from_table():
    table = WeightedLossTable.from_arrays([[10.0, 1.0], [2.0, 2.0]], [[4.0, 0.25], [1.0, 1.0]])
    d = estimate_divergences(table)
    assert d.raw[0] == pytest.approx(395.015625)
    assert d.raw[1] == 0.0
    assert d.div_hat[1] == pytest.approx(395.015625e-6)


@given(st.lists(st.floats(0, 100), min_size=1, max_size=50))
def test_empirical_divergence_is_nonnegative(values):
    assert estimate_divergence(values, np.ones(len(values))) >= -1e-9


def test_support_violation_raises():
    with pytest.raises(AssumptionError):
        population_divergence(LOSS, [1.0, 0.0], [0.5, 0.5])


def test_empirical_target_objective():
    assert empirical_target_objective([1.0, 2.0, 3.0]) == 2.0
    with pytest.raises(InputError):
        empirical_target_objective([])


def test_regret_bound_example():
    assert regret_bound(0.01, 0.01, 0.01, 0.0, 0.5) == pytest.approx(1.0 / math.sqrt(25) + math.sqrt(0.08))
    assert regret_bound(0.05, 0.05, 0.05, 0.0, 0.1) == pytest.approx(1.0 + math.sqrt(2.0))
    assert regret_bound(0.0, 0.0, 0.0, 0.0, 0.3) == 0.0
    bounds = [regret_bound(0.1, 0.2, 0.3, 0.05, d) for d in (0.01, 0.1, 0.5, 0.9)]
    assert all(a >= b for a, b in zip(bounds, bounds[1:]))
    with pytest.raises(InputError):
        regret_bound(0.1, 0.1, 0.1, 0.0, 1.5)
