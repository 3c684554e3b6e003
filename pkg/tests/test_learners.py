import numpy as np
import pytest
from hypothesis import given, strategies as st

from shift_hpo.bo import HyperParams
from shift_hpo.datasets import LabeledDataset
from shift_hpo.errors import InputError, TrainingError
from shift_hpo.learners import (
    LearnerKind,
    LearnerSpec,
    LossKind,
    TrainedModel,
    loss,
    predict,
    train_weighted,
    weighted_ridge,
)

finite = st.floats(-1e3, 1e3)


def test_loss_examples():
    assert loss("squared_half", 2.0, 0.0) == 2.0
    assert loss("squared", 2.0, 0.0) == 4.0
    assert loss("absolute", -1.5, 1.0) == 2.5
    assert loss("bce", 0.5, 1.0) == pytest.approx(np.log(2.0))
    assert loss("zero_one", 0.7, 1.0) == 0.0
    assert loss("zero_one", 0.2, 1.0) == 1.0


def test_bce_is_finite_at_the_edges():
    assert np.isfinite(loss("bce", 0.0, 1.0))
    assert np.isfinite(loss("bce", 1.0, 0.0))
    with pytest.raises(InputError):
        loss("bce", 0.5, 0.3)


@given(p=finite, y=finite, kind=st.sampled_from([LossKind.SQUARED_HALF, LossKind.SQUARED, LossKind.ABSOLUTE]))
def test_regression_losses_nonnegative_and_zero_on_diagonal(p, y, kind):
    assert loss(kind, p, y) >= 0.0
    assert loss(kind, y, y) == 0.0


def test_constant_learner_ignores_data():
    m = train_weighted(LearnerSpec(), 1.25, [])
    assert m.kind is LearnerKind.CONSTANT
    assert predict(m, [3.0]) == 1.25
    np.testing.assert_array_equal(m.predict(np.zeros((4, 1))), np.full(4, 1.25))


def test_constant_learner_weighted_objective_minimiser():
    # the weighted squared-half risk of a constant is minimised at the weighted mean of y
    rng = np.random.default_rng(0)
    y = rng.normal(size=40)
    w = rng.uniform(0.1, 2.0, size=40)
    grid = np.linspace(-2, 2, 4001)
    risks = [np.sum(w * loss("squared_half", np.full(40, t), y)) for t in grid]
    assert grid[int(np.argmin(risks))] == pytest.approx(np.sum(w * y) / np.sum(w), abs=1e-3)


def test_hyperparameter_lookup():
    spec = LearnerSpec(LearnerKind.RIDGE, "reg")
    theta = HyperParams(("other", "reg"), (5.0, 0.3))
    assert spec.hyperparameter(theta) == 0.3
    assert spec.hyperparameter({"other": 1.0, "reg": 2.0}) == 2.0
    assert LearnerSpec().hyperparameter([0.7]) == 0.7
    assert LearnerSpec().hyperparameter(0.9) == 0.9


def _dense_weighted_ridge(x, y, w, reg):
    # oracle: augmented least squares with an unpenalised intercept column
    X = np.column_stack([np.ones(len(y)), x])
    P = np.eye(X.shape[1]) * reg
    P[0, 0] = 0.0
    sol = np.linalg.solve(X.T @ (w[:, None] * X) + P, X.T @ (w * y))
    return sol[1:], sol[0]


def test_weighted_ridge_matches_dense_oracle():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(60, 3))
    y = x @ np.array([1.0, -2.0, 0.5]) + 0.7 + 0.1 * rng.normal(size=60)
    w = rng.uniform(0.1, 3.0, size=60)
    beta, b0 = weighted_ridge(x, y, w, 0.4)
    ref_beta, ref_b0 = _dense_weighted_ridge(x, y, w, 0.4)
    np.testing.assert_allclose(beta, ref_beta, atol=1e-10)
    assert b0 == pytest.approx(ref_b0, abs=1e-10)


def test_weight_scaling_invariance_with_coscaled_reg():
    rng = np.random.default_rng(2)
    x, y, w = rng.normal(size=(30, 2)), rng.normal(size=30), rng.uniform(size=30)
    a = weighted_ridge(x, y, w, 0.5)
    b = weighted_ridge(x, y, 7.0 * w, 3.5)
    np.testing.assert_allclose(a[0], b[0], atol=1e-12)
    assert a[1] == pytest.approx(b[1], abs=1e-12)


def test_train_weighted_is_deterministic_and_pools_folds():
    rng = np.random.default_rng(3)
    d1 = LabeledDataset(rng.normal(size=(20, 2)), rng.normal(size=20))
    d2 = LabeledDataset(rng.normal(size=(10, 2)), rng.normal(size=10), task_id=1)
    w1, w2 = rng.uniform(size=20), rng.uniform(size=10)
    spec = LearnerSpec(LearnerKind.RIDGE)
    m1 = train_weighted(spec, 0.1, [(d1, w1), (d2, w2)])
    m2 = train_weighted(spec, 0.1, [(d1, w1), (d2, w2)])
    assert m1.coef.tobytes() == m2.coef.tobytes()
    ref = weighted_ridge(np.vstack([d1.features, d2.features]), np.concatenate([d1.labels, d2.labels]),
                         np.concatenate([w1, w2]), 0.1)
    np.testing.assert_allclose(m1.coef, ref[0])


def test_train_weighted_errors():
    ds = LabeledDataset(np.zeros((3, 1)), np.zeros(3))
    spec = LearnerSpec(LearnerKind.RIDGE)
    with pytest.raises(TrainingError):
        train_weighted(spec, 0.0, [(ds, np.ones(3))])
    with pytest.raises(TrainingError):
        train_weighted(spec, 1.0, [(ds, np.ones(2))])
    with pytest.raises(TrainingError):
        train_weighted(spec, 1.0, [(ds, np.zeros(3))])
    with pytest.raises(TrainingError):
        train_weighted(spec, 1.0, [(ds, -np.ones(3))])


def test_predict_dimension_check():
    m = TrainedModel(LearnerKind.RIDGE, np.array([1.0, 2.0]), 0.5)
    assert predict(m, [1.0, 1.0]) == 3.5
    with pytest.raises(InputError):
        m.predict(np.zeros((2, 3)))
