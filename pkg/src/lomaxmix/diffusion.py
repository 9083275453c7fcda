"""Realization-rate diffusion and its exponential occurrence-number law.

N + 1 competing realization rates tau_i follow

    d tau_i = a (rho * mu - sum_j tau_j) dt + sigma dW_i,

reflected at zero.  Near the hyperplane sum_j tau_j = rho * mu the rates are
uniform on the simplex, so z = theta * tau_0 has the finite-N law
1 - (1 - z / (theta rho mu))^N, close to Exponential((N + 1) / (theta rho mu)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numba
import numpy as np
from scipy import optimize

from .errors import DomainError, NumericError, ParameterError

STABILITY_LIMIT = 0.5
_BLOCK_STEPS = 4096


@dataclass(frozen=True)
class DiffusionConfig:
    """Parameters of the rate diffusion.

    ``sigma``, ``dt`` and ``sample_stride`` default to values derived from the
    others: sigma keeps the hyperplane shell thin (mean excess of the rate sum
    about 0.5% of rho*mu), dt gives a*(N+1)*dt = 0.1, and the stride spans
    one in-plane decorrelation time (rho*mu/N)^2 / sigma^2.
    """

    N: int = 100
    rho: float = 1.0
    mu: float = 1.0
    theta: float = 100.0
    a: float = 1.0
    sigma: float | None = None
    dt: float | None = None
    burn_in: int = 10_000
    n_samples: int = 10_000
    sample_stride: int | None = None
    seed: int = 0
    tau_init: tuple[float, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ParameterError("N must be an integer >= 2")
        if not self.rho >= 1.0 or not math.isfinite(self.rho):
            raise ParameterError("rho must be finite and >= 1")
        for name in ("mu", "theta", "a"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ParameterError(f"{name} must be finite and > 0")
        if self.sigma is None:
            object.__setattr__(
                self, "sigma", self.rho * self.mu * math.sqrt(0.01 * self.a / self.N)
            )
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ParameterError("sigma must be finite and >= 0")
        if self.dt is None:
            object.__setattr__(self, "dt", 0.1 / (self.a * (self.N + 1)))
        if not (math.isfinite(self.dt) and self.dt > 0):
            raise ParameterError("dt must be finite and > 0")
        if self.sample_stride is None:
            stride = 1
            if self.sigma > 0:
                decorrelation = (self.rho * self.mu / self.N) ** 2 / self.sigma**2
                stride = max(1, int(math.ceil(decorrelation / self.dt)))
            object.__setattr__(self, "sample_stride", stride)
        if self.burn_in < 0 or self.n_samples < 1 or self.sample_stride < 1:
            raise ParameterError("burn_in >= 0, n_samples >= 1 and sample_stride >= 1 required")
        if self.tau_init is not None:
            tau = tuple(float(t) for t in self.tau_init)
            if len(tau) != self.N + 1 or any(not (math.isfinite(t) and t >= 0) for t in tau):
                raise ParameterError("tau_init needs N + 1 finite non-negative rates")
            object.__setattr__(self, "tau_init", tau)

    @property
    def step_gain(self):
        return self.a * (self.N + 1) * self.dt

    def check_stability(self):
        if self.step_gain >= STABILITY_LIMIT:
            raise NumericError(
                f"unstable step: a*(N+1)*dt = {self.step_gain:.3g} >= {STABILITY_LIMIT}; "
                f"reduce dt below {STABILITY_LIMIT / (self.a * (self.N + 1)):.3g}"
            )

    @property
    def z_max(self):
        return self.theta * self.rho * self.mu

    @property
    def mean_rate(self):
        """Average realization rate mu / (N + 1)."""
        return self.mu / (self.N + 1)

    @property
    def realization_time(self):
        return 1.0 / self.mean_rate

    @property
    def lambda_theory(self):
        """epsilon / (theta * rho) = (N + 1) / (theta * rho * mu)."""
        return self.realization_time / (self.theta * self.rho)


@dataclass(frozen=True)
class DiffusionResult:
    z_samples: np.ndarray
    lambda_theory: float
    sum_rate_trace: np.ndarray
    min_rate: float

    @property
    def lambda_empirical(self):
        return 1.0 / float(np.mean(self.z_samples))


@numba.njit(cache=True)
def _advance(tau, noise, drift_gain, target, limit, record_every, offset, z_out, sum_out, out_pos, theta):
    """Integrate len(noise) steps in place; record every ``record_every`` steps after ``offset``.

    Returns (next output position, min rate seen, 1 if the limit was crossed).
    """
    n_steps, width = noise.shape
    min_rate = np.inf
    for s in range(n_steps):
        total = 0.0
        for i in range(width):
            total += tau[i]
        drift = drift_gain * (target - total)
        for i in range(width):
            x = tau[i] + drift + noise[s, i]
            if x < 0.0:
                x = -x
            if x > limit:
                return out_pos, min_rate, 1
            tau[i] = x
            if x < min_rate:
                min_rate = x
        step = offset + s + 1
        if step > 0 and step % record_every == 0 and out_pos < z_out.shape[0]:
            z_out[out_pos] = theta * tau[0]
            acc = 0.0
            for i in range(width):
                acc += tau[i]
            sum_out[out_pos] = acc
            out_pos += 1
    return out_pos, min_rate, 0


def simulate_diffusion(cfg: DiffusionConfig) -> DiffusionResult:
    """Euler-Maruyama integration of the reflected rate diffusion.

    After ``burn_in`` steps, z = theta * tau_0 and the rate sum are recorded
    every ``sample_stride`` steps.  Deterministic for a given ``seed``.
    """
    cfg.check_stability()
    width = cfg.N + 1
    target = cfg.rho * cfg.mu
    if cfg.tau_init is None:
        tau = np.full(width, target / width)
    else:
        tau = np.array(cfg.tau_init, dtype=float)
    rng = np.random.default_rng(cfg.seed)
    noise_sd = cfg.sigma * math.sqrt(cfg.dt)
    drift_gain = cfg.a * cfg.dt
    limit = 1e6 * cfg.mu

    z = np.empty(cfg.n_samples)
    sums = np.empty(cfg.n_samples)
    total_steps = cfg.burn_in + cfg.n_samples * cfg.sample_stride
    pos = 0
    done = 0
    min_rate = float(tau.min())
    while done < total_steps:
        n = min(_BLOCK_STEPS, total_steps - done)
        if noise_sd > 0:
            noise = rng.standard_normal((n, width))
            noise *= noise_sd
        else:
            noise = np.zeros((n, width))
        pos, block_min, blown = _advance(
            tau, noise, drift_gain, target, limit, cfg.sample_stride,
            done - cfg.burn_in, z, sums, pos, cfg.theta,
        )
        if blown:
            raise NumericError(
                f"rate diffusion diverged (|tau| > 1e6*mu); check dt={cfg.dt:.3g} and a={cfg.a:.3g}"
            )
        min_rate = min(min_rate, block_min)
        done += n
    return DiffusionResult(z[:pos], cfg.lambda_theory, sums[:pos], min_rate)


def ks_exponential(samples, lam):
    """Kolmogorov-Smirnov distance between the sample ECDF and 1 - exp(-lam z)."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("no samples")
    if not (math.isfinite(lam) and lam > 0):
        raise DomainError("lambda must be finite and > 0")
    if x[0] < 0 or not np.all(np.isfinite(x)):
        raise DomainError("samples must be finite and non-negative")
    cdf = -np.expm1(-lam * x)
    i = np.arange(1, n + 1)
    stat = max(float(np.max(i / n - cdf)), float(np.max(cdf - (i - 1) / n)))
    return stat, n


def beta_marginal_cdf(z, cfg: DiffusionConfig):
    """Finite-N marginal 1 - (1 - z / (theta rho mu))^N on [0, theta rho mu]."""
    zmax = cfg.z_max
    arr = np.asarray(z, dtype=float)
    if np.any(arr < 0) or np.any(arr > zmax) or np.any(~np.isfinite(arr)):
        raise DomainError(f"z must lie in [0, {zmax}]")
    with np.errstate(divide="ignore"):
        out = -np.expm1(cfg.N * np.log1p(-arr / zmax))
    return float(out) if np.ndim(z) == 0 else out


def exponential_gap(cfg: DiffusionConfig):
    """sup_z |finite-N marginal CDF - (1 - exp(-lambda z))| over [0, theta rho mu]."""
    zmax = cfg.z_max
    lam = cfg.lambda_theory

    def gap(z):
        return abs(beta_marginal_cdf(z, cfg) - (-math.expm1(-lam * z)))

    grid = np.linspace(0.0, zmax, 20_001)
    vals = np.abs(beta_marginal_cdf(grid, cfg) + np.expm1(-lam * grid))
    j = int(np.argmax(vals))
    lo, hi = grid[max(j - 1, 0)], grid[min(j + 1, grid.size - 1)]
    res = optimize.minimize_scalar(lambda z: -gap(z), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12 * zmax})
    return max(float(vals[j]), -float(res.fun))
