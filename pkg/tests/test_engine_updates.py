import numpy as np
import pytest

from maxlens.constraints import make_primitive
from maxlens.data import DataMatrix
from maxlens.fit import update_linear, update_quadratic
from maxlens.model import init_model
from maxlens.partition import RowPartition, build_partition


def test_init_model_no_constraints():
    part = build_partition(3, [])
    model = init_model(part, [], 2)
    assert model.n_classes == 1
    np.testing.assert_array_equal(model.cov[0], np.eye(2))
    np.testing.assert_array_equal(model.mean[0], 0.0)
    assert model.fit_status == "unfitted"


def test_init_model_case_a(adversarial):
    data, cons_a, _ = adversarial
    part = build_partition(3, cons_a)
    model = init_model(part, cons_a, 2)
    assert model.n_classes == 2
    for c in range(2):
        params = model.class_params(c)
        np.testing.assert_array_equal(params.dual_cov, np.eye(2))
        np.testing.assert_array_equal(params.natural_second, np.eye(2))
        np.testing.assert_array_equal(params.dual_mean, 0.0)
        np.testing.assert_array_equal(params.natural_first, 0.0)


def test_initial_expectations_linear_zero_quadratic_formula():
    rng = np.random.default_rng(12)
    data = DataMatrix.from_array(rng.normal(1.0, 2.0, size=(30, 3)))
    rows = np.arange(10, 30)
    w = rng.normal(size=3)
    lin = make_primitive(data, "linear", rows, w)
    quad = make_primitive(data, "quadratic", rows, w)
    part = build_partition(30, [lin, quad])
    model = init_model(part, [lin, quad], 3)

    assert model.expected_value(0) == pytest.approx(0.0, abs=1e-12)
    # with m=0, Sigma=I: E[f_quad] = |I| (w'w + (anchor . w)^2)
    anchor_term = float(quad.anchor @ w) ** 2
    expected = rows.size * (float(w @ w) + anchor_term)
    assert model.expected_value(1) == pytest.approx(expected, rel=1e-12)


def test_initial_quadratic_expectation_monte_carlo():
    rng = np.random.default_rng(99)
    data = DataMatrix.from_array(rng.normal(0.5, 1.5, size=(8, 2)))
    rows = np.arange(8)
    w = np.array([0.6, -0.8])
    quad = make_primitive(data, "quadratic", rows, w)
    part = build_partition(8, [quad])
    model = init_model(part, [quad], 2)

    draws = 40000
    samples = rng.standard_normal((draws, 8, 2))  # the initial model: N(0, I) rows
    f = ((samples - quad.anchor) @ w) ** 2
    mc = f.sum(axis=1).mean()
    se = f.sum(axis=1).std() / np.sqrt(draws)
    assert abs(model.expected_value(0) - mc) < 5 * se


def test_expected_value_matches_per_row_oracle():
    rng = np.random.default_rng(7)
    data = DataMatrix.from_array(rng.normal(size=(20, 3)))
    prims = []
    for _ in range(5):
        rows = rng.choice(20, size=rng.integers(2, 15), replace=False)
        kind = "quadratic" if rng.random() < 0.5 else "linear"
        prims.append(make_primitive(data, kind, rows, rng.normal(size=3)))
    part = build_partition(20, prims)
    model = init_model(part, prims, 3)
    for t in range(5):
        update_quadratic(model, t) if prims[t].kind == "quadratic" else update_linear(model, t)

    for t, p in enumerate(prims):
        total = 0.0
        for i in np.asarray(p.rows):
            params = model.row_params(int(i))
            if p.kind == "linear":
                total += float(p.direction @ params.dual_mean)
            else:
                q = params.dual_mean - p.anchor
                total += float(
                    p.direction @ params.dual_cov @ p.direction + (q @ p.direction) ** 2
                )
        assert model.expected_value(t) == pytest.approx(total, rel=1e-10)


def test_update_linear_noop_when_satisfied(adversarial):
    data, cons_a, _ = adversarial
    part = build_partition(3, cons_a)
    model = init_model(part, cons_a, 2)
    assert update_linear(model, 2) == pytest.approx(0.0, abs=1e-15)  # target is 0 at init


def test_update_linear_closed_form_and_case_a_mean(adversarial):
    data, cons_a, _ = adversarial
    part = build_partition(3, cons_a)
    model = init_model(part, cons_a, 2)
    lam = update_linear(model, 0)  # linear along e1, target 1, rows {0, 2}
    assert lam == pytest.approx(1.0 / 2.0)  # (target - 0) / (|I| w'w)
    cls = part.class_of_row[0]
    np.testing.assert_allclose(model.mean[cls], [0.5, 0.0], atol=1e-12)
    assert model.expected_value(0) == pytest.approx(1.0)


def test_update_quadratic_case_a_one_sweep(adversarial):
    data, cons_a, _ = adversarial
    part = build_partition(3, cons_a)
    model = init_model(part, cons_a, 2)
    update_linear(model, 0)
    update_quadratic(model, 1)
    cls = part.class_of_row[0]
    assert model.cov[cls, 0, 0] == pytest.approx(0.25, abs=1e-10)
    assert model.expected_value(1) == pytest.approx(0.5, abs=1e-9)


def test_update_quadratic_satisfies_own_constraint_immediately():
    rng = np.random.default_rng(31)
    data = DataMatrix.from_array(rng.normal(size=(25, 4)))
    prims = []
    for _ in range(6):
        rows = rng.choice(25, size=rng.integers(2, 20), replace=False)
        prims.append(make_primitive(data, "quadratic", rows, rng.normal(size=4)))
    part = build_partition(25, prims)
    model = init_model(part, prims, 4)
    for t in range(6):
        update_quadratic(model, t)
        scale = max(prims[t].scale, 1e-9)
        assert abs(model.expected_value(t) - prims[t].target) <= 1e-6 * scale


def test_refresh_duals_initially_noop():
    part = build_partition(5, [])
    model = init_model(part, [], 3)
    assert model.refresh_duals() == 0
    np.testing.assert_allclose(model.cov[0], np.eye(3), atol=1e-12)
    np.testing.assert_allclose(model.mean[0], 0.0, atol=1e-12)


def test_refresh_duals_cancels_incremental_drift():
    rng = np.random.default_rng(42)
    data = DataMatrix.from_array(rng.normal(size=(12, 4)))
    prims = []
    for _ in range(8):
        rows = rng.choice(12, size=rng.integers(2, 12), replace=False)
        prims.append(make_primitive(data, "quadratic", rows, rng.normal(size=4)))
    part = build_partition(12, prims)
    model = init_model(part, prims, 4)
    for sweep in range(125):  # 1000 rank-1 updates, no refresh in between
        for t in range(8):
            update_quadratic(model, t)
    incremental = model.cov.copy()
    model.refresh_duals()
    np.testing.assert_allclose(model.cov, incremental, atol=1e-6)


def test_refresh_duals_floors_singular_natural_params():
    part = build_partition(4, [])
    model = init_model(part, [], 2)
    model.theta2[0] = np.diag([1.0, 1e18])  # collapsed direction
    floored = model.refresh_duals()
    assert floored == 1
    evals = np.linalg.eigvalsh(model.cov[0])
    assert evals.min() >= 1e-12 * (1 - 1e-9)


def test_class_params_invariants_after_updates(adversarial):
    data, cons_a, _ = adversarial
    part = build_partition(3, cons_a)
    model = init_model(part, cons_a, 2)
    for t in range(4):
        if cons_a[t].kind == "linear":
            update_linear(model, t)
        else:
            update_quadratic(model, t)
    model.refresh_duals()
    for c in range(model.n_classes):
        p = model.class_params(c)
        np.testing.assert_allclose(p.dual_cov, p.dual_cov.T, atol=1e-10)
        assert np.linalg.eigvalsh(p.dual_cov).min() >= -1e-10
        np.testing.assert_allclose(p.dual_mean, p.dual_cov @ p.natural_first, atol=1e-9)
        np.testing.assert_allclose(
            p.dual_cov @ p.natural_second, np.eye(2), atol=1e-6
        )


def test_entropy_diagnostic_zero_at_init_negative_after_constraints(adversarial):
    data, cons_a, _ = adversarial
    part = build_partition(3, cons_a)
    model = init_model(part, cons_a, 2)
    assert model.entropy() == pytest.approx(0.0, abs=1e-9)
    update_linear(model, 0)
    assert model.entropy() < 0.0


def singleton_partition(n, constraints):
    """Every row its own class: the unfactored reference layout."""
    covering = []
    for i in range(n):
        covering.append(tuple(t for t, p in enumerate(constraints) if i in p.rows))
    return RowPartition(
        np.arange(n, dtype=np.int64),
        np.ones(n, dtype=np.int64),
        tuple(covering),
    )


def test_factored_equals_unfactored_per_row_reference():
    rng = np.random.default_rng(55)
    data = DataMatrix.from_array(rng.normal(size=(40, 3)))
    prims = []
    for _ in range(7):
        rows = rng.choice(40, size=rng.integers(3, 30), replace=False)
        kind = "quadratic" if rng.random() < 0.6 else "linear"
        prims.append(make_primitive(data, kind, rows, rng.normal(size=3)))

    factored = init_model(build_partition(40, prims), prims, 3)
    unfactored = init_model(singleton_partition(40, prims), prims, 3)
    assert unfactored.n_classes == 40

    for sweep in range(10):
        for t in range(7):
            if prims[t].kind == "linear":
                update_linear(factored, t)
                update_linear(unfactored, t)
            else:
                update_quadratic(factored, t)
                update_quadratic(unfactored, t)

    for t in range(7):
        assert factored.expected_value(t) == pytest.approx(
            unfactored.expected_value(t), rel=1e-10, abs=1e-10
        )
    for i in range(40):
        f = factored.row_params(i)
        u = unfactored.row_params(i)
        np.testing.assert_allclose(f.dual_mean, u.dual_mean, atol=1e-10)
        np.testing.assert_allclose(f.dual_cov, u.dual_cov, atol=1e-10)
