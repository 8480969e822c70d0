"""Densities on the unit cube: evaluation, exact sampling, shift diagnostics.

Every density lives on [0,1]^d (product form across axes for d > 1).  A
source/target pair is summarized by the diagnostics that drive estimator
behavior everywhere else in the package:

* ``sup_ratio``      -- B, the largest value of the likelihood ratio
                        w(x) = target.pdf(x) / source.pdf(x);
* ``density_bounds`` -- (b_lower, b_upper), the extreme values of a single
                        density, measuring how unevenly it samples the cube.

Samplers are inverse-CDF based so a fixed random stream yields a fixed
number of draws (no rejection steps), which keeps replicated experiments
deterministic.
"""

from __future__ import annotations

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.special import ndtr, ndtri

from .errors import ConfigurationError, DegeneratePairError, DomainError

# Resolution of the sup/inf searches: 1e5 uniform intervals per axis plus a
# golden-section polish around the grid arg-extremum.
_GRID_POINTS = 100_001
_GOLDEN_XTOL = 1e-8
_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0

_SQRT_2PI = np.sqrt(2.0 * np.pi)


def _golden_max(fn, lo: float, hi: float, xtol: float = _GOLDEN_XTOL):
    """Golden-section search for the maximum of fn on [lo, hi]."""
    a, b = float(lo), float(hi)
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while (b - a) > xtol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    x = 0.5 * (a + b)
    return x, fn(x)


class Density:
    """A probability density on [0,1]^dim with an exact seeded sampler."""

    dim: int = 1

    def _pdf_axis(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _ppf_axis(self, u: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _coerce(self, x) -> tuple[np.ndarray, bool]:
        """Normalize input to shape (n, dim); return (array, was_scalar)."""
        arr = np.asarray(x, dtype=float)
        scalar = arr.ndim == 0
        if arr.ndim == 0:
            if self.dim != 1:
                raise DomainError(f"scalar point given for a dim-{self.dim} density")
            arr = arr.reshape(1, 1)
        elif arr.ndim == 1:
            # For dim 1 a flat array is a batch; otherwise it is one point.
            arr = arr[:, None] if self.dim == 1 else arr[None, :]
            scalar = scalar or (self.dim > 1 and arr.shape[0] == 1)
        if arr.ndim != 2 or arr.shape[1] != self.dim:
            raise DomainError(
                f"points have shape {np.shape(x)}, expected (n, {self.dim})"
            )
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise DomainError("points must lie in the unit cube [0,1]^d")
        return arr, scalar

    def pdf(self, x):
        """Density value at x; accepts a scalar, an (n,) batch (dim 1), or (n, dim)."""
        arr, scalar = self._coerce(x)
        out = self._pdf_axis(arr[:, 0])
        for j in range(1, self.dim):
            out = out * self._pdf_axis(arr[:, j])
        return float(out[0]) if scalar else out

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """n i.i.d. draws as an (n, dim) array (inverse-CDF transform)."""
        if n < 0:
            raise ConfigurationError("sample size must be nonnegative")
        u = rng.random((n, self.dim))
        cols = [self._ppf_axis(u[:, j]) for j in range(self.dim)]
        return np.column_stack(cols) if cols else np.empty((0, self.dim))

    def to_json(self) -> dict:
        raise NotImplementedError


class Uniform(Density):
    """The uniform density on [0,1]."""

    def _pdf_axis(self, x):
        return np.ones_like(x)

    def _ppf_axis(self, u):
        return u

    def cdf(self, x):
        return np.asarray(x, dtype=float)

    def to_json(self):
        return {"kind": "uniform"}

    def __repr__(self):
        return "Uniform()"


class TruncatedNormal(Density):
    """A normal(mu, sigma) density truncated to [lo, hi] within the unit interval."""

    def __init__(self, lo: float, hi: float, mu: float, sigma: float):
        if not lo < hi:
            raise ConfigurationError(f"truncation bounds need lo < hi, got [{lo}, {hi}]")
        if sigma <= 0:
            raise ConfigurationError(f"sigma must be positive, got {sigma}")
        if lo < 0.0 or hi > 1.0:
            raise ConfigurationError("truncation interval must sit inside [0, 1]")
        self.lo, self.hi, self.mu, self.sigma = float(lo), float(hi), float(mu), float(sigma)
        self._cdf_lo = float(ndtr((self.lo - self.mu) / self.sigma))
        self._cdf_hi = float(ndtr((self.hi - self.mu) / self.sigma))
        self._mass = self._cdf_hi - self._cdf_lo
        if self._mass <= 0:
            raise ConfigurationError("truncation interval carries no probability mass")

    def _pdf_axis(self, x):
        z = (x - self.mu) / self.sigma
        val = np.exp(-0.5 * z * z) / (_SQRT_2PI * self.sigma * self._mass)
        return np.where((x >= self.lo) & (x <= self.hi), val, 0.0)

    def _ppf_axis(self, u):
        x = self.mu + self.sigma * ndtri(self._cdf_lo + u * self._mass)
        return np.clip(x, self.lo, self.hi)

    def cdf(self, x):
        z = np.clip(np.asarray(x, dtype=float), self.lo, self.hi)
        return (ndtr((z - self.mu) / self.sigma) - self._cdf_lo) / self._mass

    def mean(self) -> float:
        """Closed-form mean of the truncated distribution."""
        a = (self.lo - self.mu) / self.sigma
        b = (self.hi - self.mu) / self.sigma
        phi = lambda z: np.exp(-0.5 * z * z) / _SQRT_2PI
        return self.mu + self.sigma * (phi(a) - phi(b)) / self._mass

    def to_json(self):
        return {"kind": "tnorm", "lo": self.lo, "hi": self.hi, "mu": self.mu, "sigma": self.sigma}

    def __repr__(self):
        return f"TruncatedNormal({self.lo}, {self.hi}, {self.mu}, {self.sigma})"


class PolyFamily(Density):
    """The cubic density family p(x; a) = a x^3 + (-24/5 - 3a/2) x^2 + (a/2 + 24/5) x + 1/5.

    Integrates to one for every a; the hyperparameter reshapes where mass
    concentrates (raising the density's upper bound) while its boundary
    values stay fixed at 1/5.
    """

    _INTERP_KNOTS = 4096

    def __init__(self, a: float):
        self.a = float(a)
        self._c3 = self.a
        self._c2 = -24.0 / 5.0 - 1.5 * self.a
        self._c1 = 0.5 * self.a + 24.0 / 5.0
        self._c0 = 0.2
        grid = np.linspace(0.0, 1.0, _GRID_POINTS)
        if np.min(self._pdf_axis(grid)) <= 0.0:
            raise ConfigurationError(
                f"PolyFamily(a={a}) is not strictly positive on [0, 1]"
            )
        self._inverse_cdf = None

    def _pdf_axis(self, x):
        return ((self._c3 * x + self._c2) * x + self._c1) * x + self._c0

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return (((self._c3 / 4.0 * x + self._c2 / 3.0) * x + self._c1 / 2.0) * x + self._c0) * x

    def _ppf_axis(self, u):
        if self._inverse_cdf is None:
            knots = np.linspace(0.0, 1.0, self._INTERP_KNOTS)
            cdf = self.cdf(knots)
            cdf[0], cdf[-1] = 0.0, 1.0
            # cdf is strictly increasing (pdf > 0), so the monotone cubic
            # interpolant of the swapped table is a proper inverse.
            self._inverse_cdf = PchipInterpolator(cdf, knots)
        return np.clip(self._inverse_cdf(u), 0.0, 1.0)

    def to_json(self):
        return {"kind": "poly", "a": self.a}

    def __repr__(self):
        return f"PolyFamily({self.a})"


class Tabulated(Density):
    """A piecewise-linear density given by values on a uniform knot grid.

    The table is renormalized at construction with the exact trapezoid
    integral, so the unit-mass invariant holds by construction.  Sampling
    inverts the piecewise-quadratic CDF segment by segment (exact).
    """

    def __init__(self, values):
        vals = np.asarray(values, dtype=float)
        if vals.ndim != 1 or vals.size < 2:
            raise ConfigurationError("tabulated density needs >= 2 grid values")
        if np.any(vals < 0) or not np.all(np.isfinite(vals)):
            raise ConfigurationError("tabulated density values must be finite and >= 0")
        mass = np.trapezoid(vals, dx=1.0 / (vals.size - 1))
        if mass <= 0:
            raise ConfigurationError("tabulated density has zero total mass")
        self.values = vals / mass
        self.knots = np.linspace(0.0, 1.0, vals.size)
        seg = 0.5 * (self.values[:-1] + self.values[1:]) * np.diff(self.knots)
        self._knot_cdf = np.concatenate([[0.0], np.cumsum(seg)])
        self._knot_cdf[-1] = 1.0

    def _pdf_axis(self, x):
        return np.interp(x, self.knots, self.values)

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        j = np.clip(np.searchsorted(self.knots, x, side="right") - 1, 0, self.values.size - 2)
        t = x - self.knots[j]
        slope = (self.values[j + 1] - self.values[j]) / np.diff(self.knots)[j]
        return self._knot_cdf[j] + self.values[j] * t + 0.5 * slope * t * t

    def _ppf_axis(self, u):
        j = np.clip(np.searchsorted(self._knot_cdf, u, side="right") - 1, 0, self.values.size - 2)
        h = np.diff(self.knots)[j]
        v0 = self.values[j]
        slope = (self.values[j + 1] - self.values[j]) / h
        du = u - self._knot_cdf[j]
        # Solve v0*t + slope*t^2/2 = du on each segment.
        with np.errstate(invalid="ignore", divide="ignore"):
            disc = np.sqrt(np.maximum(v0 * v0 + 2.0 * slope * du, 0.0))
            t = np.where(np.abs(slope) > 1e-12 * np.maximum(v0, 1.0), (disc - v0) / slope,
                         np.where(v0 > 0, du / np.where(v0 > 0, v0, 1.0), 0.0))
        return np.clip(self.knots[j] + t, 0.0, 1.0)

    def to_json(self):
        return {"kind": "tabulated", "values": self.values.tolist()}

    def __repr__(self):
        return f"Tabulated(<{self.values.size} knots>)"


class ProductDensity(Density):
    """An axis-product of one-dimensional densities on [0,1]^d."""

    def __init__(self, axes):
        axes = list(axes)
        if not axes:
            raise ConfigurationError("product density needs at least one axis")
        if any(ax.dim != 1 for ax in axes):
            raise ConfigurationError("product axes must be one-dimensional densities")
        self.axes = axes
        self.dim = len(axes)

    def pdf(self, x):
        arr, scalar = self._coerce(x)
        out = np.ones(arr.shape[0])
        for j, ax in enumerate(self.axes):
            out = out * ax._pdf_axis(arr[:, j])
        return float(out[0]) if scalar else out

    def sample(self, n, rng):
        if n < 0:
            raise ConfigurationError("sample size must be nonnegative")
        u = rng.random((n, self.dim))
        return np.column_stack([ax._ppf_axis(u[:, j]) for j, ax in enumerate(self.axes)])

    def to_json(self):
        return {"kind": "product", "axes": [ax.to_json() for ax in self.axes]}

    def __repr__(self):
        return f"ProductDensity({self.axes!r})"


def density_from_json(obj: dict) -> Density:
    """Rebuild a density from its JSON configuration object."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigurationError("density config must be an object with a 'kind' field")
    kind = obj["kind"]
    try:
        if kind == "uniform":
            return Uniform()
        if kind == "tnorm":
            return TruncatedNormal(obj["lo"], obj["hi"], obj["mu"], obj["sigma"])
        if kind == "poly":
            return PolyFamily(obj["a"])
        if kind == "tabulated":
            return Tabulated(obj["values"])
        if kind == "product":
            return ProductDensity([density_from_json(ax) for ax in obj["axes"]])
    except KeyError as exc:
        raise ConfigurationError(f"density config '{kind}' is missing field {exc}") from None
    raise ConfigurationError(f"unknown density kind {kind!r}")


class SourceTargetPair:
    """A (source, target) density pair and its likelihood-ratio diagnostics."""

    def __init__(self, source: Density, target: Density):
        if source.dim != target.dim:
            raise ConfigurationError(
                f"source dim {source.dim} != target dim {target.dim}"
            )
        self.source = source
        self.target = target
        self.dim = source.dim

    def likelihood_ratio(self, x):
        """w(x) = target.pdf(x) / source.pdf(x). Requires source.pdf(x) > 0."""
        num = self.target.pdf(x)
        den = self.source.pdf(x)
        if np.any(np.asarray(den) <= 0.0):
            raise DegeneratePairError(
                "source density vanishes at an evaluation point; likelihood ratio undefined"
            )
        return num / den

    def sup_ratio(self) -> float:
        """B: the grid-plus-golden-section supremum of the likelihood ratio."""
        if self.dim == 1:
            return _sup_axis(self.source, self.target)
        if isinstance(self.source, ProductDensity) and isinstance(self.target, ProductDensity):
            out = 1.0
            for s_ax, t_ax in zip(self.source.axes, self.target.axes):
                out *= _sup_axis(s_ax, t_ax)
            return out
        raise ConfigurationError("sup_ratio beyond dim 1 requires product-form densities")

    def to_json(self):
        return {"source": self.source.to_json(), "target": self.target.to_json()}


def _sup_axis(source: Density, target: Density) -> float:
    grid = np.linspace(0.0, 1.0, _GRID_POINTS)
    den = source._pdf_axis(grid)
    if np.any(den <= 0.0):
        raise DegeneratePairError("source density vanishes on the search grid")
    ratio = target._pdf_axis(grid) / den
    i = int(np.argmax(ratio))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid.size - 1)]

    def at(x):
        s = float(source._pdf_axis(np.asarray([x]))[0])
        t = float(target._pdf_axis(np.asarray([x]))[0])
        return t / s if s > 0 else -np.inf

    _, refined = _golden_max(at, lo, hi)
    return float(max(ratio[i], refined))


def density_bounds(spec: Density) -> tuple[float, float]:
    """(b_lower, b_upper): extreme density values over the grid-plus-refinement search."""
    if spec.dim == 1:
        return _bounds_axis(spec)
    if isinstance(spec, ProductDensity):
        lows, highs = zip(*(_bounds_axis(ax) for ax in spec.axes))
        return float(np.prod(lows)), float(np.prod(highs))
    raise ConfigurationError("density_bounds beyond dim 1 requires product-form densities")


def _bounds_axis(spec: Density) -> tuple[float, float]:
    grid = np.linspace(0.0, 1.0, _GRID_POINTS)
    vals = spec._pdf_axis(grid)

    def at(x):
        return float(spec._pdf_axis(np.asarray([x]))[0])

    i_hi = int(np.argmax(vals))
    _, hi_ref = _golden_max(at, grid[max(i_hi - 1, 0)], grid[min(i_hi + 1, grid.size - 1)])
    i_lo = int(np.argmin(vals))
    _, lo_neg = _golden_max(
        lambda x: -at(x), grid[max(i_lo - 1, 0)], grid[min(i_lo + 1, grid.size - 1)]
    )
    return float(min(vals[i_lo], -lo_neg)), float(max(vals[i_hi], hi_ref))


def unit_mass_defect(spec: Density, nodes: int = 256) -> float:
    """|quadrature integral of the pdf - 1| per axis, maximized over axes.

    Smooth families use `nodes`-point Gauss-Legendre quadrature; tabulated
    densities integrate exactly on their own knots (the trapezoid rule is
    exact for piecewise-linear integrands), since a fixed-node rule cannot
    see their kinks.
    """
    axes = spec.axes if isinstance(spec, ProductDensity) else [spec]
    worst = 0.0
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes)
    x01 = 0.5 * (gl_x + 1.0)
    w01 = 0.5 * gl_w
    for ax in axes:
        if isinstance(ax, Tabulated):
            total = np.trapezoid(ax.values, ax.knots)
        else:
            total = float(np.sum(w01 * ax._pdf_axis(x01)))
        worst = max(worst, abs(total - 1.0))
    return worst
