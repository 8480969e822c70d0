"""First-stage regression models: polynomial least squares, moving least
squares with a compactly supported weight, and a bootstrap CART forest.

All models train on a LabeledDataset over [0,1]^d and expose a
deterministic, finite `predict`.  The moving-least-squares model solves a
local weighted system at every query; its bandwidth is tied to the covering
radius of the training points, the largest gap any domain point has to its
nearest sample.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from . import _forest
from .errors import ConfigurationError, DomainError

_RIDGE = 1e-10
_MAX_LINEAR_DEGREE = 6


@dataclass(frozen=True)
class LabeledDataset:
    """Sample pairs (x_i, y_i) with covariates in the unit cube."""

    xs: np.ndarray
    ys: np.ndarray

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, dtype=float))
        if xs.shape[0] == 1 and np.asarray(self.xs).ndim == 1:
            xs = xs.T  # a flat vector is a batch of 1-D points
        ys = np.asarray(self.ys, dtype=float).ravel()
        if xs.shape[0] != ys.shape[0]:
            raise ConfigurationError(
                f"xs has {xs.shape[0]} rows but ys has {ys.shape[0]} entries"
            )
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise DomainError("covariates must lie in the unit cube [0,1]^d")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    @property
    def dim(self) -> int:
        return self.xs.shape[1]

    def subset(self, indices) -> "LabeledDataset":
        return LabeledDataset(self.xs[indices], self.ys[indices])


# --- regressor specs -------------------------------------------------------


@dataclass(frozen=True)
class Linear:
    """Least squares on tensor-product polynomial features (per-axis degree cap)."""

    degree: int = 1

    def __post_init__(self):
        if not 0 <= self.degree <= _MAX_LINEAR_DEGREE:
            raise ConfigurationError(
                f"linear degree must be in [0, {_MAX_LINEAR_DEGREE}], got {self.degree}"
            )

    def to_json(self):
        return {"kind": "linear", "degree": self.degree}


@dataclass(frozen=True)
class MovingLeastSquares:
    """Local weighted polynomial fit with a compactly supported weight."""

    degree: int = 2
    bandwidth_factor: float = 2.5

    def __post_init__(self):
        if self.degree < 0:
            raise ConfigurationError("mls degree must be >= 0")
        if self.bandwidth_factor <= 0:
            raise ConfigurationError("bandwidth_factor must be positive")

    def to_json(self):
        return {"kind": "mls", "degree": self.degree, "bandwidth_factor": self.bandwidth_factor}


@dataclass(frozen=True)
class RandomForest:
    """Bootstrap ensemble of CART regression trees with variance-reduction splits."""

    trees: int = 200
    min_leaf: int = 5

    def __post_init__(self):
        if self.trees < 1:
            raise ConfigurationError("forest needs trees >= 1")
        if self.min_leaf < 1:
            raise ConfigurationError("forest needs min_leaf >= 1")

    def to_json(self):
        return {"kind": "forest", "trees": self.trees, "min_leaf": self.min_leaf}


RegressorSpec = Linear | MovingLeastSquares | RandomForest


def regressor_from_json(obj: dict) -> RegressorSpec:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigurationError("regressor config must be an object with a 'kind' field")
    kind = obj["kind"]
    if kind == "linear":
        return Linear(degree=int(obj.get("degree", 1)))
    if kind == "mls":
        return MovingLeastSquares(
            degree=int(obj.get("degree", 2)),
            bandwidth_factor=float(obj.get("bandwidth_factor", 2.5)),
        )
    if kind == "forest":
        return RandomForest(trees=int(obj.get("trees", 200)), min_leaf=int(obj.get("min_leaf", 5)))
    raise ConfigurationError(f"unknown regressor kind {kind!r}")


# --- fitted models ---------------------------------------------------------


class FittedRegressor:
    """A trained model: deterministic, finite predictions on [0,1]^d."""

    n_train: int = 0
    dim: int = 1

    def __init__(self, n_train: int, dim: int, diagnostics: dict | None = None):
        self.n_train = int(n_train)
        self.dim = int(dim)
        self.diagnostics = dict(diagnostics or {})

    def _predict_matrix(self, X: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def predict(self, x):
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        if arr.ndim == 0:
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            arr = arr[:, None] if self.dim == 1 else arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise DomainError(f"points have shape {np.shape(x)}, expected (n, {self.dim})")
        out = self._predict_matrix(np.ascontiguousarray(arr))
        return float(out[0]) if scalar else out


class CallableModel(FittedRegressor):
    """Wrap an arbitrary vectorized function as a fitted model.

    Used to inject oracle or deliberately wrong first-stage models into the
    estimators (for example a perfect f, or the constant zero).
    """

    def __init__(self, fn, dim: int = 1):
        super().__init__(n_train=0, dim=dim)
        self._fn = fn

    def _predict_matrix(self, X):
        xs = X[:, 0] if self.dim == 1 else X
        return np.asarray(self._fn(xs), dtype=float) * np.ones(X.shape[0])


class _LinearModel(FittedRegressor):
    def __init__(self, exponents, coef, rank_deficient, n_train, dim):
        super().__init__(n_train, dim, {"rank_deficient": bool(rank_deficient)})
        self._exponents = exponents
        self._coef = coef

    def _predict_matrix(self, X):
        return _poly_features(X, self._exponents) @ self._coef


def _tensor_exponents(dim: int, degree: int) -> np.ndarray:
    return np.array(list(itertools.product(range(degree + 1), repeat=dim)), dtype=np.int64)


def _total_degree_exponents(dim: int, degree: int) -> np.ndarray:
    combos = [e for e in itertools.product(range(degree + 1), repeat=dim) if sum(e) <= degree]
    combos.sort(key=lambda e: (sum(e), e))
    return np.array(combos, dtype=np.int64)


def _poly_features(X: np.ndarray, exponents: np.ndarray) -> np.ndarray:
    out = np.ones((X.shape[0], exponents.shape[0]))
    for j, expo in enumerate(exponents):
        for axis, p in enumerate(expo):
            if p:
                out[:, j] *= X[:, axis] ** p
    return out


def _fit_linear(spec: Linear, data: LabeledDataset) -> _LinearModel:
    exponents = _tensor_exponents(data.dim, spec.degree)
    phi = _poly_features(data.xs, exponents)
    rank = np.linalg.matrix_rank(phi)
    if rank < exponents.shape[0]:
        coef, *_ = np.linalg.lstsq(phi, data.ys, rcond=None)
        return _LinearModel(exponents, coef, True, data.n, data.dim)
    # Mean-form normal equations keep the ridge's effect invariant under
    # uniform row duplication.
    gram = phi.T @ phi / data.n
    rhs = phi.T @ data.ys / data.n
    damped = gram + _RIDGE * np.eye(exponents.shape[0])
    coef = np.linalg.solve(damped, rhs)
    # Damped iterative refinement removes the ridge's O(1e-10) coefficient
    # bias so noiseless in-class data is reproduced at float precision.
    for _ in range(2):
        coef = coef + np.linalg.solve(damped, rhs - gram @ coef)
    return _LinearModel(exponents, coef, False, data.n, data.dim)


class _MLSModel(FittedRegressor):
    def __init__(self, spec: MovingLeastSquares, data: LabeledDataset, radius: float):
        super().__init__(
            data.n,
            data.dim,
            {"covering_radius": radius, "bandwidth": spec.bandwidth_factor * radius},
        )
        self._spec = spec
        self._xs = data.xs
        self._ys = data.ys
        self._exponents = _total_degree_exponents(data.dim, spec.degree)
        self._base_h = max(spec.bandwidth_factor * radius, 1e-12)

    def local_fit(self, x) -> tuple[float, float, int, int]:
        """Solve the local system at one point.

        Returns (value, effective_radius, points_in_range, widenings); the
        radius doubles until at least basis-size points fall inside it.
        """
        x = np.asarray(x, dtype=float).reshape(self.dim)
        dist = np.sqrt(np.sum((self._xs - x) ** 2, axis=1))
        h = self._base_h
        need = self._exponents.shape[0]
        widenings = 0
        while int(np.count_nonzero(dist < h)) < need:
            h *= 2.0
            widenings += 1
        mask = dist < h
        t = dist[mask] / h
        weights = (1.0 - t) ** 4 * (4.0 * t + 1.0)
        local = (self._xs[mask] - x) / h
        phi = _poly_features(local, self._exponents)
        sw = np.sqrt(weights)
        coef, *_ = np.linalg.lstsq(sw[:, None] * phi, sw * self._ys[mask], rcond=None)
        return float(coef[0]), h, int(mask.sum()), widenings

    def _predict_matrix(self, X):
        return np.array([self.local_fit(row)[0] for row in X])


def _fit_mls(spec: MovingLeastSquares, data: LabeledDataset) -> _MLSModel:
    basis = _total_degree_exponents(data.dim, spec.degree).shape[0]
    if data.n < basis:
        raise ConfigurationError(
            f"moving least squares with degree {spec.degree} needs >= {basis} points, got {data.n}"
        )
    return _MLSModel(spec, data, covering_radius(data.xs))


class _ForestModel(FittedRegressor):
    def __init__(self, arrays, n_train, dim):
        super().__init__(n_train, dim)
        self._arrays = arrays

    def _predict_matrix(self, X):
        return _forest.predict_forest(X, *self._arrays)


def _fit_forest(spec: RandomForest, data: LabeledDataset, rng: np.random.Generator) -> _ForestModel:
    n = data.n
    boot = rng.integers(0, n, size=(spec.trees, n))
    max_nodes = 2 * n + 1
    feat = np.empty((spec.trees, max_nodes), np.int64)
    thresh = np.empty((spec.trees, max_nodes))
    left = np.empty((spec.trees, max_nodes), np.int64)
    right = np.empty((spec.trees, max_nodes), np.int64)
    value = np.empty((spec.trees, max_nodes))
    if data.dim == 1:
        # The 1-D kernel wants sorted training data; bootstrap indices drawn
        # over the sorted arrays are the same resampling distribution.
        order = np.argsort(data.xs[:, 0], kind="stable")
        _forest.build_forest_1d(
            np.ascontiguousarray(data.xs[order, 0]), data.ys[order], boot,
            spec.min_leaf, feat, thresh, left, right, value,
        )
    else:
        _forest.build_forest(
            np.ascontiguousarray(data.xs), data.ys, boot, spec.min_leaf,
            feat, thresh, left, right, value,
        )
    return _ForestModel((feat, thresh, left, right, value), n, data.dim)


def fit(spec: RegressorSpec, data: LabeledDataset, rng: np.random.Generator) -> FittedRegressor:
    """Train the model described by `spec` on `data`.

    Only the forest consumes the random stream (bootstrap resamples); the
    other models ignore it but accept it for a uniform calling convention.
    """
    if data.n == 0:
        raise ConfigurationError("cannot fit a regressor on an empty dataset")
    if isinstance(spec, Linear):
        return _fit_linear(spec, data)
    if isinstance(spec, MovingLeastSquares):
        return _fit_mls(spec, data)
    if isinstance(spec, RandomForest):
        return _fit_forest(spec, data, rng)
    raise ConfigurationError(f"unknown regressor spec {spec!r}")


def covering_radius(points, probe_grid_size: int = 2048) -> float:
    """Largest distance from any probe point of the unit cube to the sample.

    The probe grid has `probe_grid_size` uniform intervals per axis
    (endpoints included), so midpoints between grid-aligned samples are
    probed exactly.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[0] == 1 and np.asarray(points).ndim == 1:
        pts = pts.T
    if pts.size == 0:
        raise ConfigurationError("covering radius of an empty point set is undefined")
    d = pts.shape[1]
    axes = [np.linspace(0.0, 1.0, probe_grid_size + 1)] * d
    if d == 1:
        probes = axes[0][:, None]
    else:
        mesh = np.meshgrid(*axes, indexing="ij")
        probes = np.column_stack([m.ravel() for m in mesh])
    dist, _ = cKDTree(pts).query(probes, k=1)
    return float(np.max(dist))
