import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shift_hpo.bo import (
    Dim,
    SearchSpace,
    acquisition_lcb,
    gp_fit,
    gp_predict,
    matern52,
    propose_next,
    run_bo,
)
from shift_hpo.errors import ConfigError


def test_matern_examples():
    assert matern52([0.3, 0.1], [0.3, 0.1], [1.0, 1.0], 2.5) == 2.5
    r1 = (1 + math.sqrt(5) + 5 / 3) * math.exp(-math.sqrt(5))
    assert matern52([0.0], [1.0], [1.0], 1.0) == pytest.approx(r1, abs=1e-15)
    assert round(r1, 4) == 0.5240
    assert matern52([0.0], [1e3], [1.0], 1.0) < 1e-300 + 1e-200
    # lengthscale scales the distance per dimension
    assert matern52([0.0, 0.0], [2.0, 0.0], [2.0, 5.0], 1.0) == pytest.approx(r1)


@given(a=st.lists(st.floats(-5, 5), min_size=2, max_size=2), b=st.lists(st.floats(-5, 5), min_size=2, max_size=2))
def test_matern_symmetric_and_bounded(a, b):
    k = matern52(a, b, [0.5, 2.0], 1.7)
    assert k == pytest.approx(matern52(b, a, [0.5, 2.0], 1.7))
    assert 0.0 <= k <= 1.7


def _dense_oracle(X, y, Xs, ls, sv, noise):
    # independent posterior: loop-built kernel, plain solve
    z_mean, z_sd = y.mean(), y.std() if y.std() > 0 else 1.0
    z = (y - z_mean) / z_sd
    k = lambda a, b: matern52(a, b, [ls] * X.shape[1], sv)
    K = np.array([[k(a, b) for b in X] for a in X]) + noise * np.eye(len(X))
    Ks = np.array([[k(a, b) for b in X] for a in Xs])
    mean = Ks @ np.linalg.solve(K, z)
    var = sv - np.einsum("ij,ji->i", Ks, np.linalg.solve(K, Ks.T))
    return z_mean + z_sd * mean, z_sd**2 * np.maximum(var, 0.0)


def test_gp_matches_dense_solve_oracle():
    rng = np.random.default_rng(0)
    X = rng.uniform(size=(8, 2))
    y = np.sin(4 * X[:, 0]) + X[:, 1] ** 2
    gp = gp_fit(X, y)
    Xs = rng.uniform(size=(25, 2))
    mean, var = gp.predict_unit(Xs)
    ref_mean, ref_var = _dense_oracle(X, y, Xs, gp.lengthscale, gp.signal_var, gp.noise_var)
    np.testing.assert_allclose(mean, ref_mean, atol=1e-8)
    np.testing.assert_allclose(var, ref_var, atol=1e-8)


def test_gp_lml_selection_is_a_grid_maximum():
    rng = np.random.default_rng(1)
    X = rng.uniform(size=(6, 1))
    y = (X[:, 0] - 0.4) ** 2
    best = gp_fit(X, y)
    for ls in (0.1, 0.3, 1.0):
        for sv in (0.5, 1.0, 2.0):
            assert gp_fit(X, y, (ls,), (sv,)).log_marginal_likelihood <= best.log_marginal_likelihood + 1e-12


def test_gp_interpolates_quadratic():
    X = np.linspace(0, 1, 5).reshape(-1, 1)
    y = (X[:, 0] - 0.3) ** 2
    gp = gp_fit(X, y, noise_var=1e-6)
    mean, _ = gp.predict_unit(X)
    assert np.max(np.abs(mean - y)) < 0.05


def test_gp_single_point_and_determinism():
    gp = gp_fit([[0.5]], [3.0])
    m, v = gp_predict(gp, [0.5])
    assert m == pytest.approx(3.0, abs=1e-6)
    a, b = gp_fit([[0.1], [0.9]], [1.0, 2.0]), gp_fit([[0.1], [0.9]], [1.0, 2.0])
    assert a.cholesky_factor.tobytes() == b.cholesky_factor.tobytes()


def test_gp_reverts_to_prior_far_away():
    X = np.array([[0.0], [0.02], [0.04]])
    y = np.array([1.0, 2.0, 4.0])
    gp = gp_fit(X, y, (0.1,), (1.0,))
    m, v = gp_predict(gp, [50.0])
    assert m == pytest.approx(y.mean(), abs=1e-9)
    assert v == pytest.approx(gp.signal_var * y.std() ** 2, rel=1e-9)


def test_gp_variance_nonnegative_everywhere():
    rng = np.random.default_rng(2)
    X = rng.uniform(size=(10, 3))
    gp = gp_fit(X, rng.normal(size=10))
    _, var = gp.predict_unit(rng.uniform(-0.5, 1.5, size=(10_000, 3)))
    assert np.all(var >= 0)


def test_lcb_examples():
    assert acquisition_lcb(1.0, 0.0) == 1.0
    assert acquisition_lcb(1.0, 4.0, 2.0) == -3.0


@given(m=st.floats(-1e3, 1e3), v=st.floats(0, 1e3), beta=st.floats(0, 10))
def test_lcb_below_mean(m, v, beta):
    assert acquisition_lcb(m, v, beta) <= m


def test_proposal_lands_in_low_region_and_is_deterministic():
    X = np.linspace(0, 1, 11).reshape(-1, 1)
    gp = gp_fit(X, X[:, 0])
    u = propose_next(gp, 1, seed=3)
    assert u[0] < 0.5
    assert np.array_equal(u, propose_next(gp, 1, seed=3))


def test_proposal_with_zero_beta_minimises_mean():
    X = np.linspace(0, 1, 9).reshape(-1, 1)
    gp = gp_fit(X, (X[:, 0] - 0.62) ** 2)
    u = propose_next(gp, 1, seed=0, beta=0.0)
    grid = np.linspace(0, 1, 100_001).reshape(-1, 1)
    mean, _ = gp.predict_unit(grid)
    assert u[0] == pytest.approx(grid[np.argmin(mean), 0], abs=2e-3)


def test_search_space_validation():
    with pytest.raises(ConfigError):
        Dim("a", 1.0, 1.0)
    with pytest.raises(ConfigError):
        Dim("a", 0.0, 1.0, "log")
    with pytest.raises(ConfigError):
        SearchSpace((Dim("a", 0, 1), Dim("a", 0, 2)))
    with pytest.raises(ConfigError):
        SearchSpace((Dim("a", 0, 1),)).point([2.0])


@given(u=st.lists(st.floats(0, 1), min_size=2, max_size=2))
def test_log_scale_round_trip(u):
    space = SearchSpace((Dim("lr", 1e-4, 1.0, "log"), Dim("x", -3.0, 5.0)))
    v = space.from_unit(u)
    assert 1e-4 <= v[0] <= 1.0 and -3.0 <= v[1] <= 5.0
    np.testing.assert_allclose(space.to_unit(v), u, atol=1e-12)


def _quadratic(theta):
    return (theta["theta"] - 0.3) ** 2


SPACE = SearchSpace((Dim("theta", -8.0, 8.0),))


def test_run_bo_finds_quadratic_minimum():
    h = run_bo(_quadratic, SPACE, budget=50, n_init=5, seed=0)
    assert abs(h.incumbent.theta["theta"] - 0.3) < 0.1


def test_run_bo_history_invariants():
    h = run_bo(_quadratic, SPACE, budget=12, n_init=4, seed=1)
    assert len(h.trials) == 12
    assert h.incumbent.score == h.scores.min()
    assert np.all(np.diff(h.incumbent_trace()) <= 0)


def test_run_bo_pure_random_search_when_budget_equals_init():
    h = run_bo(_quadratic, SPACE, budget=5, n_init=5, seed=2)
    rng = np.random.default_rng(2)
    expected = SPACE.from_unit(rng.uniform(size=(5, 1)))[:, 0]
    np.testing.assert_allclose([t.theta["theta"] for t in h.trials], expected)


def test_run_bo_is_deterministic_and_prefix_stable():
    a = run_bo(_quadratic, SPACE, budget=15, seed=4)
    b = run_bo(_quadratic, SPACE, budget=15, seed=4)
    c = run_bo(_quadratic, SPACE, budget=9, seed=4)
    assert [t.theta.values for t in a.trials] == [t.theta.values for t in b.trials]
    assert [t.theta.values for t in c.trials] == [t.theta.values for t in a.trials[:9]]


def test_run_bo_records_failures_as_infinite():
    def flaky(theta):
        if theta["theta"] > 0:
            raise RuntimeError("boom")
        return (theta["theta"] + 1.0) ** 2

    h = run_bo(flaky, SPACE, budget=12, n_init=4, seed=0)
    failed = [t for t in h.trials if t.error is not None]
    assert failed and all(t.score == math.inf for t in failed)
    assert math.isfinite(h.incumbent.score)


def test_run_bo_log_space_respects_bounds():
    space = SearchSpace((Dim("reg", 1e-3, 10.0, "log"),))
    h = run_bo(lambda t: (math.log10(t["reg"]) + 1) ** 2, space, budget=15, seed=0)
    assert all(1e-3 <= t.theta["reg"] <= 10.0 for t in h.trials)
    assert abs(math.log10(h.incumbent.theta["reg"]) + 1) < 0.2


def test_run_bo_budget_validation():
    with pytest.raises(ConfigError):
        run_bo(_quadratic, SPACE, budget=3, n_init=5)
