"""Discrete Lomax mixtures, the zeta (discrete Pareto-1) baseline and samplers.

A continuous Lomax variable X with shape ``v`` and scale ``b`` has survival
``S(x) = (b / (x + b))**v``.  It is the Gamma(v, rate=b) mixture of
exponentials.  Occurrence numbers are modelled as ``K = floor(X) + 1`` so
that ``P(K = k) = S(k - 1) - S(k)`` on ``k = 1, 2, ...``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate
from scipy.special import gammaln, logsumexp

from .errors import DomainError, NumericError, ParameterError
from .special import hurwitz_zeta, zeta

# sampled occurrence numbers are clipped here to stay inside int64
K_MAX = 2**62

_WEIGHT_TOL = 1e-12


def _check_positive(name, value):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} must be a real number, got {value!r}") from None
    if not math.isfinite(value) or value <= 0.0:
        raise ParameterError(f"{name} must be finite and > 0, got {value}")
    return value


def _as_k(k):
    arr = np.asarray(k)
    if arr.dtype.kind not in "iuf":
        raise DomainError("occurrence numbers must be numeric")
    if np.any(~np.isfinite(arr)) or np.any(arr < 1) or np.any(arr != np.floor(arr)):
        raise DomainError("occurrence numbers must be integers >= 1")
    return arr.astype(float)


def _scalar_or_array(value, like):
    if np.ndim(like) == 0:
        return float(value)
    return value


@dataclass(frozen=True)
class LomaxComponent:
    v: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "v", _check_positive("v", self.v))
        object.__setattr__(self, "b", _check_positive("b", self.b))

    @property
    def e_lambda(self):
        """Mean of the Gamma mixing density, v/b."""
        return self.v / self.b

    def log_sf(self, x):
        return -self.v * np.log1p(np.asarray(x, dtype=float) / self.b)

    def logpmf(self, k):
        return _lomax_logpmf(_as_k(k), self.v, self.b)


@dataclass(frozen=True)
class GammaMixing:
    """Gamma density of the exponential rate: b**v / Gamma(v) * lam**(v-1) * exp(-b*lam)."""

    v: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "v", _check_positive("v", self.v))
        object.__setattr__(self, "b", _check_positive("b", self.b))

    def pdf(self, lam):
        lam = np.asarray(lam, dtype=float)
        with np.errstate(divide="ignore"):
            logp = (
                self.v * math.log(self.b)
                - gammaln(self.v)
                + (self.v - 1.0) * np.log(lam)
                - self.b * lam
            )
        out = np.where(lam > 0, np.exp(logp), 0.0)
        return _scalar_or_array(out, lam)

    @property
    def mean(self):
        return self.v / self.b


def _lomax_logpmf(k, v, b):
    # log[S(k-1) - S(k)] = log S(k-1) + log(1 - (1 + 1/(k-1+b))^-v)
    log_head = -v * np.log1p((k - 1.0) / b)
    log_ratio = -v * np.log1p(1.0 / (k - 1.0 + b))
    return log_head + np.log(-np.expm1(log_ratio))


def _lomax_logpmf_grad(k, v, b):
    """Gradient of the discrete Lomax log-pmf with respect to (log v, log b)."""
    km1 = k - 1.0
    l0 = np.log1p(km1 / b)
    l1 = np.log1p(k / b)
    d = -v * (l1 - l0)  # log S(k) - log S(k-1)
    # e^d / (1 - e^d)
    odds = np.exp(d) / -np.expm1(d)
    da_dv = -l0
    db_dv = -l1
    da_db = v * km1 / (b * (b + km1))
    db_db = v * k / (b * (b + k))
    g_v = da_dv - odds * (db_dv - da_dv)
    g_b = da_db - odds * (db_db - da_db)
    return g_v * v, g_b * b


def lomax_survival(x, comp: LomaxComponent):
    """Continuous survival (b / (x + b))**v for x >= 0."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr >= 0)):
        raise DomainError("lomax_survival requires x >= 0")
    out = np.exp(comp.log_sf(arr))
    return _scalar_or_array(out, x)


def lomax_pmf(k, comp: LomaxComponent):
    """P(K = k) = S(k-1) - S(k) on k >= 1."""
    arr = _as_k(k)
    out = np.exp(_lomax_logpmf(arr, comp.v, comp.b))
    return _scalar_or_array(out, k)


class MixtureParams:
    """Weighted Lomax components held in canonical order.

    Canonical order is descending weight, ties broken by ascending ``v`` then
    ascending ``b``.  Weights must sum to one within 1e-12.
    """

    __slots__ = ("weights", "components")

    def __init__(self, components: Iterable[tuple[float, LomaxComponent]]):
        items = []
        for c, comp in components:
            c = _check_positive("c", c)
            if not isinstance(comp, LomaxComponent):
                comp = LomaxComponent(*comp)
            items.append((c, comp))
        if not items:
            raise ParameterError("a mixture needs at least one component")
        total = math.fsum(c for c, _ in items)
        if abs(total - 1.0) > _WEIGHT_TOL:
            raise ParameterError(f"mixture weights sum to {total!r}, not 1")
        items.sort(key=lambda t: (-t[0], t[1].v, t[1].b))
        self.weights = tuple(c for c, _ in items)
        self.components = tuple(comp for _, comp in items)

    @classmethod
    def from_arrays(cls, c: Sequence[float], v: Sequence[float], b: Sequence[float]):
        if not len(c) == len(v) == len(b):
            raise ParameterError("c, v and b must have equal length")
        return cls((ci, LomaxComponent(vi, bi)) for ci, vi, bi in zip(c, v, b))

    @classmethod
    def single(cls, v, b):
        return cls([(1.0, LomaxComponent(v, b))])

    @property
    def M(self):
        return len(self.weights)

    @property
    def c(self):
        return np.array(self.weights)

    @property
    def v(self):
        return np.array([comp.v for comp in self.components])

    @property
    def b(self):
        return np.array([comp.b for comp in self.components])

    @property
    def e_lambda(self):
        return [comp.e_lambda for comp in self.components]

    def __iter__(self):
        return iter(zip(self.weights, self.components))

    def __eq__(self, other):
        if not isinstance(other, MixtureParams):
            return NotImplemented
        return self.weights == other.weights and self.components == other.components

    def __hash__(self):
        return hash((self.weights, self.components))

    def __repr__(self):
        parts = ", ".join(
            f"(c={c:.6g}, v={comp.v:.6g}, b={comp.b:.6g})" for c, comp in self
        )
        return f"MixtureParams([{parts}])"

    def to_dict(self):
        return {
            "components": [
                {"c": c, "v": comp.v, "b": comp.b} for c, comp in self
            ]
        }

    @classmethod
    def from_dict(cls, data):
        try:
            comps = data["components"]
            return cls.from_arrays(
                [float(x["c"]) for x in comps],
                [float(x["v"]) for x in comps],
                [float(x["b"]) for x in comps],
            )
        except (KeyError, TypeError) as exc:
            raise ParameterError(f"malformed mixture parameters: {exc}") from None

    # evaluable-distribution protocol used by the gof module
    n_free_params = property(lambda self: 3 * self.M - 1)

    def logpmf(self, k):
        arr = _as_k(k)
        terms = [
            math.log(c) + _lomax_logpmf(arr, comp.v, comp.b) for c, comp in self
        ]
        return logsumexp(np.stack(terms), axis=0)

    def pmf(self, k):
        return _scalar_or_array(np.exp(self.logpmf(k)), k)

    def sf(self, k):
        """P(K > k) = sum_i c_i S_i(k)."""
        arr = np.asarray(k, dtype=float)
        out = sum(c * np.exp(comp.log_sf(arr)) for c, comp in self)
        return _scalar_or_array(out, k)

    def cdf(self, k):
        arr = np.asarray(k, dtype=float)
        out = sum(c * -np.expm1(comp.log_sf(arr)) for c, comp in self)
        return _scalar_or_array(out, k)


def mixture_pmf(k, params: MixtureParams):
    return params.pmf(k)


class ZipfDistribution:
    """Zeta distribution p(k) = k**-s / zeta(s) on k >= 1."""

    n_free_params = 1

    def __init__(self, s):
        s = float(s)
        if not math.isfinite(s) or s <= 1.0:
            raise ParameterError(f"zipf exponent must be > 1, got {s}")
        self.s = s
        self.log_norm = math.log(zeta(s))

    def __repr__(self):
        return f"ZipfDistribution(s={self.s!r})"

    def logpmf(self, k):
        return -self.s * np.log(_as_k(k)) - self.log_norm

    def pmf(self, k):
        return _scalar_or_array(np.exp(self.logpmf(k)), k)

    def sf(self, k):
        """P(K > k) = zeta(s, k + 1) / zeta(s)."""
        arr = np.atleast_1d(np.asarray(k, dtype=float))
        out = np.array(
            [hurwitz_zeta(self.s, kk + 1.0) for kk in arr]
        ) / math.exp(self.log_norm)
        return _scalar_or_array(out if np.ndim(k) else out[0], k)

    def cdf(self, k):
        return _scalar_or_array(1.0 - np.asarray(self.sf(k)), k)


def zipf_pmf(k, s):
    return ZipfDistribution(s).pmf(k)


def _compound_survival(x, mix: GammaMixing, tol):
    """Integral of phi(lam) * exp(-lam * x) over lam in (0, inf)."""
    log_norm = mix.v * math.log(mix.b) - math.lgamma(mix.v)
    rate = mix.b + x

    def integrand(lam):
        if lam <= 0.0:
            return 0.0
        return math.exp(log_norm + (mix.v - 1.0) * math.log(lam) - rate * lam)

    # near zero, u = lam**v removes the lam**(v-1) singularity
    def integrand_u(u):
        return math.exp(log_norm - math.log(mix.v) - rate * u ** (1.0 / mix.v))

    scale = mix.v / rate
    cut = 10.0 * scale + 10.0 / rate
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            if mix.v <= 1.0:
                part_tol = tol / 3.0
                pieces = [
                    integrate.quad(integrand_u, 0.0, scale**mix.v, epsabs=part_tol, epsrel=part_tol, limit=200),
                    integrate.quad(integrand, scale, cut, epsabs=part_tol, epsrel=part_tol, limit=200),
                ]
            else:
                # bounded integrand; flag the Gamma peak so narrow densities are not missed
                part_tol = tol / 2.0
                mode = (mix.v - 1.0) / rate
                sd = math.sqrt(mix.v) / rate
                pts = sorted({p for p in (mode - 6 * sd, mode, mode + 6 * sd) if 0.0 < p < cut})
                pieces = [
                    integrate.quad(integrand, 0.0, cut, points=pts or None,
                                   epsabs=part_tol, epsrel=part_tol, limit=200),
                ]
            pieces.append(
                integrate.quad(integrand, cut, np.inf, epsabs=part_tol, epsrel=part_tol, limit=200)
            )
        except integrate.IntegrationWarning as exc:
            raise NumericError(
                f"quadrature did not converge at x={x}, v={mix.v}, b={mix.b}: {exc}"
            ) from None
    err = sum(e for _, e in pieces)
    if err > tol:
        raise NumericError(
            f"quadrature error estimate {err:.3g} exceeds {tol:.3g} at x={x}, v={mix.v}, b={mix.b}"
        )
    return math.fsum(val for val, _ in pieces)


def compound_pmf_numeric(k, mix: GammaMixing, tol=1e-10):
    """Discrete pmf at ``k`` obtained by numerically compounding exponentials over ``mix``.

    Independent of the closed form; used to check that the Gamma compound
    reproduces the discrete Lomax pmf.
    """
    if int(k) != k or k < 1:
        raise DomainError("k must be an integer >= 1")
    return _compound_survival(k - 1.0, mix, tol) - _compound_survival(float(k), mix, tol)


def exponential_discrete_pmf(k, lam):
    """Law of floor(X) + 1 for X ~ Exponential(lam)."""
    lam = _check_positive("lam", lam)
    arr = _as_k(k)
    out = np.exp(-lam * (arr - 1.0)) * -np.expm1(-lam)
    return _scalar_or_array(out, k)


def sample_mixture(params: MixtureParams, n, seed=None):
    """Draw ``n`` occurrence numbers from the discrete Lomax mixture.

    Component by weight, Lomax by inversion ``x = b((1-u)^(-1/v) - 1)``,
    then ``k = floor(x) + 1``.  Values beyond ``K_MAX`` are clipped.
    """
    n = int(n)
    if n < 1:
        raise ParameterError("n must be >= 1")
    rng = np.random.default_rng(seed)
    idx = rng.choice(params.M, size=n, p=params.c / params.c.sum())
    u = rng.random(n)
    v = params.v[idx]
    b = params.b[idx]
    with np.errstate(over="ignore"):
        x = b * np.expm1(-np.log1p(-u) / v)
    x = np.minimum(np.floor(x), float(K_MAX - 1))
    return x.astype(np.int64) + 1


@dataclass(frozen=True)
class MixtureMean:
    """Mean of the continuous Lomax mixture, or the divergent components."""

    value: float | None
    divergent: tuple[int, ...] = ()

    @property
    def is_divergent(self):
        return bool(self.divergent)


def mixture_mean(params: MixtureParams) -> MixtureMean:
    """sum_i c_i b_i / (v_i - 1); divergent if any v_i <= 1."""
    bad = tuple(i for i, comp in enumerate(params.components) if comp.v <= 1.0)
    if bad:
        return MixtureMean(None, bad)
    return MixtureMean(
        math.fsum(c * comp.b / (comp.v - 1.0) for c, comp in params)
    )
