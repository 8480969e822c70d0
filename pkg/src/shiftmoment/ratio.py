"""Likelihood-ratio estimation from unlabeled covariates, and truncation.

A logistic classifier is trained to distinguish source draws (label 0)
from target draws (label 1) on polynomial features.  Its propensity
e(x) = P(label 1 | x) converts to a density-ratio estimate through the
odds identity w(x) = e(x)/(1-e(x)) * n/m, with e clipped away from {0,1}
so the ratio is always finite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ConfigurationError, DomainError
from .regressors import _poly_features, _total_degree_exponents

_CLIP = 1e-6
_MAX_NEWTON_ITERS = 100
_GRAD_TOL = 1e-8
_L2_PENALTY = 1e-6


@dataclass(frozen=True)
class UnlabeledDataset:
    """Covariate-only sample over the unit cube."""

    xs: np.ndarray

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, dtype=float))
        if xs.shape[0] == 1 and np.asarray(self.xs).ndim == 1:
            xs = xs.T
        if xs.size and (xs.min() < 0.0 or xs.max() > 1.0):
            raise DomainError("covariates must lie in the unit cube [0,1]^d")
        object.__setattr__(self, "xs", xs)

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    @property
    def dim(self) -> int:
        return self.xs.shape[1]


@dataclass(frozen=True)
class PropensityModel:
    """Fitted logistic classifier plus the sample counts it was trained on."""

    coefficients: np.ndarray
    degree: int
    dim: int
    n: int
    m: int
    converged: bool

    def propensity(self, x):
        """Clipped estimate of P(target | x)."""
        arr, scalar = _coerce_points(x, self.dim)
        phi = _poly_features(arr, _total_degree_exponents(self.dim, self.degree))
        e = np.clip(expit(phi @ self.coefficients), _CLIP, 1.0 - _CLIP)
        return float(e[0]) if scalar else e

    def to_json(self) -> dict:
        return {
            "coefficients": [float(c) for c in self.coefficients],
            "degree": self.degree,
            "dim": self.dim,
            "n": self.n,
            "m": self.m,
            "converged": self.converged,
        }


def propensity_model_from_json(obj: dict) -> PropensityModel:
    try:
        return PropensityModel(
            coefficients=np.asarray(obj["coefficients"], dtype=float),
            degree=int(obj["degree"]),
            dim=int(obj.get("dim", 1)),
            n=int(obj["n"]),
            m=int(obj["m"]),
            converged=bool(obj["converged"]),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigurationError(f"invalid propensity model payload: {exc}") from exc


def _coerce_points(x, dim: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr[:, None] if dim == 1 else arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise DomainError(f"points have shape {np.shape(x)}, expected (n, {dim})")
    return arr, scalar


def fit_propensity(
    source_xs: UnlabeledDataset,
    target_xs: UnlabeledDataset,
    feature_degree: int = 3,
    rng: np.random.Generator | None = None,
) -> PropensityModel:
    """Train the source-vs-target classifier by penalized Newton iterations.

    The optimization is deterministic (zero initialization); `rng` is
    accepted for calling-convention uniformity and never consumed.  If the
    gradient tolerance is not reached within the iteration budget, the
    lowest-loss iterate is returned with `converged=False`.
    """
    if source_xs.n == 0 or target_xs.n == 0:
        raise ConfigurationError("propensity fitting needs nonempty source and target samples")
    if source_xs.dim != target_xs.dim:
        raise ConfigurationError(
            f"source dimension {source_xs.dim} != target dimension {target_xs.dim}"
        )
    if feature_degree < 0:
        raise ConfigurationError("feature degree must be >= 0")

    X = np.vstack([source_xs.xs, target_xs.xs])
    z = np.concatenate([np.zeros(source_xs.n), np.ones(target_xs.n)])
    phi = _poly_features(X, _total_degree_exponents(source_xs.dim, feature_degree))
    n_total, p = phi.shape
    eye = np.eye(p)

    def loss(beta):
        eta = phi @ beta
        nll = np.mean(np.logaddexp(0.0, eta) - z * eta)
        return nll + 0.5 * _L2_PENALTY * float(beta @ beta)

    beta = np.zeros(p)
    best_beta, best_loss = beta, loss(beta)
    converged = False
    for _ in range(_MAX_NEWTON_ITERS):
        eta = phi @ beta
        sigma = expit(eta)
        grad = phi.T @ (sigma - z) / n_total + _L2_PENALTY * beta
        if np.linalg.norm(grad) <= _GRAD_TOL:
            converged = True
            break
        weights = sigma * (1.0 - sigma)
        hess = (phi.T * weights) @ phi / n_total + _L2_PENALTY * eye
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(hess, grad, rcond=None)
        # Step halving: the full Newton step can overshoot on saturated
        # propensities.
        current = loss(beta)
        scale = 1.0
        for _ in range(50):
            candidate = beta - scale * step
            if loss(candidate) < current:
                break
            scale *= 0.5
        beta = beta - scale * step
        here = loss(beta)
        if here < best_loss:
            best_beta, best_loss = beta, here
    else:
        beta = best_beta

    return PropensityModel(
        coefficients=beta,
        degree=feature_degree,
        dim=source_xs.dim,
        n=source_xs.n,
        m=target_xs.n,
        converged=converged,
    )


def ratio_from_propensity(e, n: int, m: int):
    """Odds-times-count-ratio map from propensity to density ratio."""
    e = np.clip(e, _CLIP, 1.0 - _CLIP)
    return e / (1.0 - e) * (n / m)


def ratio_at(model: PropensityModel, x):
    """Estimated likelihood ratio ŵ(x) at one point or a batch."""
    return ratio_from_propensity(model.propensity(x), model.n, model.m)


def truncate(w, T: float):
    """Cap a weight (or batch of weights) at the truncation level T."""
    if not T > 0:
        raise ConfigurationError(f"truncation level must be positive, got {T}")
    out = np.minimum(np.asarray(w, dtype=float), T)
    return float(out) if np.ndim(w) == 0 else out


def theoretical_rate(n: int, s: float, p: float, q: int, d: int) -> float:
    """Convergence-rate bound n^max{-q(s/d - 1/p) - 1, -1/2 - s/d}."""
    if n < 1 or s <= 0 or p <= 0 or q < 1 or d < 1:
        raise ConfigurationError("rate parameters must be positive (n, s, p, q, d)")
    exponent = max(-q * (s / d - 1.0 / p) - 1.0, -0.5 - s / d)
    return float(n**exponent)


def suggest_threshold(n: int, s: float, p: float, q: int, d: int, alpha: float) -> float:
    """Truncation level r(n)^(-1/(alpha+1)) from the rate bound, unit constant.

    alpha is the assumed tail exponent of the weight distribution; larger
    alpha (thinner tails) pushes the suggestion toward 1.
    """
    if alpha <= 0:
        raise ConfigurationError(f"tail exponent alpha must be positive, got {alpha}")
    return float(theoretical_rate(n, s, p, q, d) ** (-1.0 / (alpha + 1.0)))
