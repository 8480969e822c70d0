"""Regression models: polynomial least squares, moving least squares, forest.

Moving-least-squares values are verified against an independent direct
local solve written here (unshifted coordinates, plain numpy); forest
behavior is pinned by exact-constant and determinism checks.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftmoment import (
    ConfigurationError,
    DomainError,
    LabeledDataset,
    Linear,
    MovingLeastSquares,
    RandomForest,
    covering_radius,
    fit,
    regressor_from_json,
)


def direct_local_solve(xs, ys, x0, h, degree):
    # Independent oracle: weighted LS on monomials in the original
    # coordinate, evaluated at the query point.
    d = np.abs(xs - x0)
    mask = d < h
    t = d[mask] / h
    w = (1.0 - t) ** 4 * (4.0 * t + 1.0)
    A = np.vander(xs[mask], degree + 1, increasing=True)
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(sw[:, None] * A, sw * ys[mask], rcond=None)
    return float(np.polyval(coef[::-1], x0))


class TestLabeledDataset:
    def test_flat_vector_becomes_column(self):
        data = LabeledDataset(np.array([0.1, 0.5, 0.9]), np.array([1.0, 2.0, 3.0]))
        assert data.xs.shape == (3, 1)
        assert data.n == 3 and data.dim == 1

    def test_length_mismatch_rejected(self):
        with pytest.raises(ConfigurationError):
            LabeledDataset(np.array([0.1, 0.5]), np.array([1.0]))

    def test_outside_unit_cube_rejected(self):
        with pytest.raises(DomainError):
            LabeledDataset(np.array([0.1, 1.5]), np.array([1.0, 2.0]))

    def test_subset(self):
        data = LabeledDataset(np.array([0.1, 0.5, 0.9]), np.array([1.0, 2.0, 3.0]))
        sub = data.subset([0, 2])
        assert sub.n == 2
        assert sub.ys.tolist() == [1.0, 3.0]


class TestLinear:
    def test_exact_on_noiseless_line(self):
        rng = np.random.default_rng(3)
        xs = rng.uniform(0, 1, 50)
        model = fit(Linear(degree=1), LabeledDataset(xs, 2 * xs + 1), rng)
        q = np.linspace(0, 1, 101)
        assert np.max(np.abs(model.predict(q) - (2 * q + 1))) < 1e-10

    def test_degree_zero_is_training_mean(self):
        rng = np.random.default_rng(4)
        xs = rng.uniform(0, 1, 30)
        ys = rng.normal(0, 1, 30)
        model = fit(Linear(degree=0), LabeledDataset(xs, ys), rng)
        assert model.predict(0.1) == pytest.approx(ys.mean(), rel=1e-12)
        assert model.predict(0.9) == pytest.approx(ys.mean(), rel=1e-12)

    def test_degree_cap(self):
        with pytest.raises(ConfigurationError):
            Linear(degree=7)
        with pytest.raises(ConfigurationError):
            Linear(degree=-1)

    def test_rank_deficient_falls_back_to_min_norm(self):
        # All covariates identical: the slope is unidentifiable.
        xs = np.full(20, 0.5)
        model = fit(Linear(degree=1), LabeledDataset(xs, np.full(20, 2.0)), np.random.default_rng(0))
        assert model.diagnostics["rank_deficient"] is True
        assert model.predict(0.5) == pytest.approx(2.0, abs=1e-9)
        assert np.isfinite(model.predict(np.linspace(0, 1, 11))).all()

    def test_full_rank_flag_clear(self):
        xs = np.linspace(0, 1, 20)
        model = fit(Linear(degree=1), LabeledDataset(xs, xs), np.random.default_rng(0))
        assert model.diagnostics["rank_deficient"] is False

    def test_tensor_product_features_cover_cross_terms(self):
        rng = np.random.default_rng(8)
        X = rng.uniform(0, 1, (60, 2))
        ys = 1 + X[:, 0] + 2 * X[:, 1] + 3 * X[:, 0] * X[:, 1]
        model = fit(Linear(degree=1), LabeledDataset(X, ys), rng)
        Q = rng.uniform(0, 1, (25, 2))
        want = 1 + Q[:, 0] + 2 * Q[:, 1] + 3 * Q[:, 0] * Q[:, 1]
        assert np.max(np.abs(model.predict(Q) - want)) < 1e-9

    @settings(max_examples=25, deadline=None)
    @given(degree=st.integers(0, 3), seed=st.integers(0, 10_000))
    def test_duplicated_rows_change_nothing(self, degree, seed):
        rng = np.random.default_rng(seed)
        xs = rng.uniform(0, 1, 40)
        ys = 1 + 2 * xs - xs**2 + rng.normal(0, 0.3, 40)
        doubled = LabeledDataset(np.concatenate([xs, xs]), np.concatenate([ys, ys]))
        m1 = fit(Linear(degree=degree), LabeledDataset(xs, ys), rng)
        m2 = fit(Linear(degree=degree), doubled, rng)
        q = np.linspace(0, 1, 101)
        assert np.max(np.abs(m1.predict(q) - m2.predict(q))) < 1e-9


class TestMovingLeastSquares:
    def test_reproduces_quadratic(self):
        xs = np.linspace(0, 1, 100)
        model = fit(MovingLeastSquares(degree=2), LabeledDataset(xs, xs**2), np.random.default_rng(0))
        q = np.linspace(0.01, 0.99, 1000)
        assert np.max(np.abs(model.predict(q) - q**2)) < 1e-8

    @pytest.mark.parametrize("degree", [0, 1, 2, 3])
    def test_polynomial_reproduction_per_degree(self, degree):
        rng = np.random.default_rng(degree)
        coeffs = rng.uniform(-2, 2, degree + 1)
        xs = np.linspace(0, 1, 100)
        ys = np.polyval(coeffs, xs)
        model = fit(MovingLeastSquares(degree=degree), LabeledDataset(xs, ys), rng)
        q = np.linspace(0.01, 0.99, 500)
        assert np.max(np.abs(model.predict(q) - np.polyval(coeffs, q))) < 1e-8

    def test_matches_direct_local_solve(self):
        rng = np.random.default_rng(5)
        xs = np.sort(rng.uniform(0, 1, 200))
        ys = np.sin(6 * xs) + xs**2
        model = fit(MovingLeastSquares(degree=2), LabeledDataset(xs, ys), rng)
        for x0 in xs[::7]:
            value, h_eff, _, _ = model.local_fit(x0)
            assert value == pytest.approx(direct_local_solve(xs, ys, x0, h_eff, 2), abs=1e-10)

    def test_training_points_matched_on_dense_grid(self):
        xs = np.linspace(0, 1, 500)
        ys = np.sin(6 * xs) + xs**2
        model = fit(MovingLeastSquares(degree=2), LabeledDataset(xs, ys), np.random.default_rng(0))
        idx = np.arange(0, 500, 11)
        assert np.max(np.abs(model.predict(xs[idx]) - ys[idx])) < 1e-6

    def test_out_of_radius_point_has_no_influence(self):
        # An extra far-away point (a gross outlier in y) leaves the covering
        # radius and the local weights untouched, so the prediction is
        # identical floats.
        xs = np.linspace(0, 1, 200)
        ys = 1 + xs**2 + 0.2 * np.sin(4 * xs)
        base = fit(MovingLeastSquares(degree=2), LabeledDataset(xs, ys), np.random.default_rng(0))
        with_outlier = fit(
            MovingLeastSquares(degree=2),
            LabeledDataset(np.append(xs, 0.9503), np.append(ys, 1000.0)),
            np.random.default_rng(0),
        )
        value, h_eff, _, _ = base.local_fit(0.3)
        assert abs(0.9503 - 0.3) > h_eff
        assert with_outlier.local_fit(0.3)[0] == value

    def test_too_few_points_rejected(self):
        # Degree 3 in one dimension needs four basis functions.
        with pytest.raises(ConfigurationError):
            fit(
                MovingLeastSquares(degree=3),
                LabeledDataset(np.array([0.1, 0.5, 0.9]), np.zeros(3)),
                np.random.default_rng(0),
            )

    def test_radius_widening_recorded(self):
        xs = np.linspace(0, 1, 100)
        model = fit(
            MovingLeastSquares(degree=2, bandwidth_factor=0.1),
            LabeledDataset(xs, np.sin(xs)),
            np.random.default_rng(0),
        )
        value, h_eff, n_in, widenings = model.local_fit(0.312345)
        assert widenings >= 1
        assert n_in >= 3
        assert h_eff > model.diagnostics["bandwidth"]
        assert np.isfinite(value)

    def test_diagnostics_carry_radius_and_bandwidth(self):
        xs = np.linspace(0, 1, 50)
        model = fit(MovingLeastSquares(degree=2), LabeledDataset(xs, xs), np.random.default_rng(0))
        rho = covering_radius(xs)
        assert model.diagnostics["covering_radius"] == pytest.approx(rho)
        assert model.diagnostics["bandwidth"] == pytest.approx(2.5 * rho)


class TestRandomForest:
    def test_constant_data_predicts_constant(self):
        xs = np.linspace(0, 1, 40)
        model = fit(RandomForest(), LabeledDataset(xs, np.full(40, 3.0)), np.random.default_rng(2))
        assert np.all(model.predict(np.linspace(0, 1, 17)) == 3.0)

    def test_bitwise_determinism(self):
        rng = np.random.default_rng(0)
        xs = rng.uniform(0, 1, 200)
        ys = 1 + xs**2 + rng.normal(0, 0.1, 200)
        data = LabeledDataset(xs, ys)
        q = np.linspace(0, 1, 777)
        a = fit(RandomForest(), data, np.random.default_rng(42)).predict(q)
        b = fit(RandomForest(), data, np.random.default_rng(42)).predict(q)
        assert np.array_equal(a, b)

    def test_seed_changes_predictions(self):
        rng = np.random.default_rng(0)
        xs = rng.uniform(0, 1, 200)
        ys = np.sin(8 * xs) + rng.normal(0, 0.1, 200)
        data = LabeledDataset(xs, ys)
        q = np.linspace(0, 1, 101)
        a = fit(RandomForest(), data, np.random.default_rng(1)).predict(q)
        b = fit(RandomForest(), data, np.random.default_rng(2)).predict(q)
        assert not np.array_equal(a, b)

    def test_query_outside_training_range_is_finite(self):
        xs = np.linspace(0.4, 0.6, 50)
        model = fit(RandomForest(), LabeledDataset(xs, np.sin(xs)), np.random.default_rng(1))
        out = model.predict(np.array([0.0, 1.0]))
        assert np.isfinite(out).all()

    def test_fits_smooth_curve(self):
        rng = np.random.default_rng(7)
        xs = rng.uniform(0, 1, 1000)
        f = 1 + xs**2 + 0.2 * np.sin(16 * xs)
        model = fit(RandomForest(), LabeledDataset(xs, f + rng.normal(0, 0.05, 1000)), rng)
        q = np.linspace(0.05, 0.95, 200)
        want = 1 + q**2 + 0.2 * np.sin(16 * q)
        assert np.max(np.abs(model.predict(q) - want)) < 0.15

    def test_two_dimensional_splits(self):
        rng = np.random.default_rng(9)
        X = rng.uniform(0, 1, (300, 2))
        ys = X[:, 0] + 2 * X[:, 1]
        data = LabeledDataset(X, ys)
        Q = rng.uniform(0.1, 0.9, (50, 2))
        a = fit(RandomForest(), data, np.random.default_rng(5)).predict(Q)
        b = fit(RandomForest(), data, np.random.default_rng(5)).predict(Q)
        assert np.array_equal(a, b)
        assert np.max(np.abs(a - (Q[:, 0] + 2 * Q[:, 1]))) < 0.3

    def test_tiny_dataset_is_single_leaf(self):
        xs = np.array([0.2, 0.4, 0.6, 0.8])
        ys = np.array([1.0, 2.0, 3.0, 4.0])
        model = fit(RandomForest(trees=10), LabeledDataset(xs, ys), np.random.default_rng(0))
        # Four points cannot split under min_leaf=5; every tree is one leaf.
        preds = model.predict(np.linspace(0, 1, 9))
        assert np.all(preds == preds[0])

    def test_parameter_validation(self):
        with pytest.raises(ConfigurationError):
            RandomForest(trees=0)
        with pytest.raises(ConfigurationError):
            RandomForest(min_leaf=0)


class TestCoveringRadius:
    def test_three_point_example(self):
        assert covering_radius(np.array([0.0, 0.5, 1.0])) == 0.25

    def test_single_point(self):
        assert covering_radius(np.array([0.5])) == 0.5

    def test_thousand_uniform_draws_are_dense(self):
        # Brute-force check across seeds; a radius of 0.05 would need a gap
        # of 0.1 among 1000 uniforms, which essentially never happens.
        for seed in range(100):
            pts = np.random.default_rng(seed).uniform(0, 1, 1000)
            assert covering_radius(pts) < 0.05

    def test_empty_rejected(self):
        with pytest.raises(ConfigurationError):
            covering_radius(np.empty(0))

    def test_two_dimensional_grid(self):
        # A 2x2 corner grid leaves the center farthest away.
        pts = np.array([[0, 0], [0, 1], [1, 0], [1, 1]], dtype=float)
        got = covering_radius(pts, probe_grid_size=64)
        assert got == pytest.approx(np.sqrt(0.5), abs=1e-12)


class TestPredictionContracts:
    @pytest.mark.parametrize(
        "spec",
        [Linear(degree=2), MovingLeastSquares(degree=2), RandomForest(trees=50)],
        ids=["linear", "mls", "forest"],
    )
    def test_finite_everywhere(self, spec):
        rng = np.random.default_rng(11)
        xs = rng.uniform(0, 1, 120)
        ys = np.sin(5 * xs) + rng.normal(0, 0.2, 120)
        model = fit(spec, LabeledDataset(xs, ys), np.random.default_rng(1))
        q = np.concatenate([[0.0, 1.0], np.linspace(0, 1, 101)])
        assert np.isfinite(model.predict(q)).all()

    @pytest.mark.parametrize(
        "spec",
        [Linear(degree=2), MovingLeastSquares(degree=2), RandomForest(trees=50)],
        ids=["linear", "mls", "forest"],
    )
    def test_scalar_and_batch_agree(self, spec):
        rng = np.random.default_rng(12)
        xs = rng.uniform(0, 1, 80)
        model = fit(spec, LabeledDataset(xs, np.cos(3 * xs)), np.random.default_rng(1))
        q = np.array([0.2, 0.5, 0.8])
        batch = model.predict(q)
        assert batch == pytest.approx([model.predict(float(x)) for x in q])

    def test_empty_dataset_rejected(self):
        with pytest.raises(ConfigurationError):
            fit(Linear(), LabeledDataset(np.empty(0), np.empty(0)), np.random.default_rng(0))

    def test_records_training_size(self):
        xs = np.linspace(0, 1, 33)
        model = fit(Linear(degree=1), LabeledDataset(xs, xs), np.random.default_rng(0))
        assert model.n_train == 33


class TestJson:
    @pytest.mark.parametrize(
        "spec",
        [Linear(degree=3), MovingLeastSquares(degree=1, bandwidth_factor=3.0), RandomForest(trees=77, min_leaf=2)],
        ids=["linear", "mls", "forest"],
    )
    def test_round_trip(self, spec):
        assert regressor_from_json(spec.to_json()) == spec

    def test_forest_field_names(self):
        assert RandomForest().to_json() == {"kind": "forest", "trees": 200, "min_leaf": 5}

    def test_unknown_kind_rejected(self):
        with pytest.raises(ConfigurationError):
            regressor_from_json({"kind": "boosted"})
        with pytest.raises(ConfigurationError):
            regressor_from_json([1, 2, 3])
