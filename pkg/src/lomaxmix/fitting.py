"""Maximum-likelihood fits of the zeta baseline and of discrete Lomax mixtures."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from . import gof
from .corpus import FrequencyHistogram
from .distributions import (
    MixtureParams,
    ZipfDistribution,
    _lomax_logpmf,
    _lomax_logpmf_grad,
)
from .errors import (
    BoundaryError,
    ConvergenceError,
    InsufficientDataError,
    LomaxMixError,
    ParameterError,
)
from .special import hurwitz_zeta_with_derivative

ZIPF_S_MAX = 50.0


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 500
    rel_loglik_tolerance: float = 1e-9
    restarts: int = 5
    seed: int = 0
    v_bounds: tuple[float, float] = (1e-3, 1e3)
    b_bounds: tuple[float, float] = (1e-3, 1e6)
    threshold: int = gof.DEFAULT_THRESHOLD
    mstep_max_evals: int = 200

    def __post_init__(self):
        if self.max_iterations < 1 or self.restarts < 1:
            raise ParameterError("max_iterations and restarts must be positive")
        if not self.rel_loglik_tolerance > 0:
            raise ParameterError("rel_loglik_tolerance must be positive")
        for lo, hi in (self.v_bounds, self.b_bounds):
            if not 0 < lo < hi:
                raise ParameterError("parameter bounds must be positive and ordered")


@dataclass
class FitReport:
    model: str  # "zipf" or "mixture"
    params: float | MixtureParams
    log_likelihood: float
    chi_square: float
    dof: int
    p_value: float
    layout: gof.BinLayout
    sample_types: int
    converged: bool = True
    iterations: int = 0
    loglik_trace: list[float] = field(default_factory=list, repr=False, compare=False)

    @property
    def M(self):
        return self.params.M if self.model == "mixture" else None

    @property
    def e_lambda(self):
        return self.params.e_lambda if self.model == "mixture" else []

    @property
    def distribution(self):
        if self.model == "zipf":
            return ZipfDistribution(self.params)
        return self.params

    @property
    def n_free_params(self):
        return self.distribution.n_free_params

    def to_dict(self):
        out = {"model": self.model}
        if self.model == "mixture":
            out["M"] = self.params.M
            out["components"] = [
                {"c": c, "v": comp.v, "b": comp.b, "e_lambda": comp.e_lambda}
                for c, comp in self.params
            ]
        else:
            out["s"] = self.params
        out.update(
            loglik=self.log_likelihood,
            chi2=self.chi_square,
            dof=self.dof,
            p=self.p_value,
            types=self.sample_types,
            converged=self.converged,
            iterations=self.iterations,
            bins=self.layout.to_list(),
        )
        return out

    @classmethod
    def from_dict(cls, data):
        try:
            model = data["model"]
            if model == "mixture":
                params = MixtureParams.from_dict(data)
            elif model == "zipf":
                params = float(data["s"])
            else:
                raise ParameterError(f"unknown model kind {model!r}")
            return cls(
                model=model,
                params=params,
                log_likelihood=float(data["loglik"]),
                chi_square=float(data["chi2"]),
                dof=int(data["dof"]),
                p_value=float(data["p"]),
                layout=gof.BinLayout.from_list(data.get("bins", [])),
                sample_types=int(data["types"]),
                converged=bool(data.get("converged", True)),
                iterations=int(data.get("iterations", 0)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ParameterError(f"malformed fit report: {exc}") from None

    def table_row(self):
        """One summary line: M, c_i, v_i, b_i, v_i/b_i, chi2, dof, p."""
        if self.model == "zipf":
            head = f"zipf  s={self.params:.4f}"
        else:
            p = self.params
            cols = ["M=%d" % p.M]
            cols += ["c%d=%.3f" % (i + 1, c) for i, c in enumerate(p.weights)]
            cols += ["v%d=%.3f b%d=%.3f" % (i + 1, comp.v, i + 1, comp.b) for i, comp in enumerate(p.components)]
            cols += ["v%d/b%d=%.3f" % (i + 1, i + 1, e) for i, e in enumerate(p.e_lambda)]
            head = "  ".join(cols)
        return f"{head}  chi2={self.chi_square:.2f}  dof={self.dof}  p={self.p_value:.4g}"


def _report(hist, model, params, loglik, threshold, **extra):
    dist = ZipfDistribution(params) if model == "zipf" else params
    res = gof.chi_square(hist, dist, dist.n_free_params, threshold)
    return FitReport(
        model=model,
        params=params,
        log_likelihood=float(loglik),
        chi_square=res.chi2,
        dof=res.dof,
        p_value=res.p_value,
        layout=res.layout,
        sample_types=hist.total_types,
        **extra,
    )


# ---------------------------------------------------------------------------
# zeta baseline


def fit_zipf(hist: FrequencyHistogram, threshold=gof.DEFAULT_THRESHOLD) -> FitReport:
    """MLE of the zeta exponent s on (1, 50].

    The score equation  -zeta'(s)/zeta(s) = mean(log k)  has a decreasing
    left side, so the root is bracketed and found by Brent's method.
    """
    if not hist.total_types:
        raise InsufficientDataError("empty histogram")
    ks, ns = hist.arrays()
    if len(ks) == 1 and ks[0] != 1:
        raise InsufficientDataError("zipf fit needs at least two distinct occurrence numbers")
    total = float(ns.sum())
    mean_log_k = float(np.dot(ns, np.log(ks))) / total
    if mean_log_k == 0.0:
        raise BoundaryError("all mass at k=1: the likelihood increases without bound in s")
    if len(ks) == 1:
        raise InsufficientDataError("zipf fit needs at least two distinct occurrence numbers")

    def score(s):
        z, dz = hurwitz_zeta_with_derivative(s)
        return -dz / z - mean_log_k

    lo, hi = 1.0 + 1e-10, ZIPF_S_MAX
    if score(hi) > 0:
        raise BoundaryError(f"zipf MLE exceeds s = {ZIPF_S_MAX}")
    s_hat = optimize.brentq(score, lo, hi, xtol=1e-10, rtol=4 * np.finfo(float).eps)
    dist = ZipfDistribution(s_hat)
    loglik = float(np.dot(ns, dist.logpmf(ks)))
    return _report(hist, "zipf", s_hat, loglik, threshold)


# ---------------------------------------------------------------------------
# Lomax mixture EM


def _component_nll(theta, ks, w, w_total):
    v, b = np.exp(theta)
    return -float(np.dot(w, _lomax_logpmf(ks, v, b))) / w_total


def _log_bounds(opts):
    return [tuple(np.log(opts.v_bounds)), tuple(np.log(opts.b_bounds))]


def _mstep_component(ks, w, v, b, opts):
    """Maximize the responsibility-weighted log-likelihood of one component.

    Bounded Nelder-Mead in (log v, log b), warm-started at the current values.
    The returned point is never worse than the start.
    """
    w_total = float(w.sum())
    if w_total <= 0:
        return v, b
    x0 = np.array([math.log(v), math.log(b)])
    bounds = _log_bounds(opts)
    x0 = np.clip(x0, [lo for lo, _ in bounds], [hi for _, hi in bounds])
    f0 = _component_nll(x0, ks, w, w_total)
    res = optimize.minimize(
        _component_nll,
        x0,
        args=(ks, w, w_total),
        method="Nelder-Mead",
        bounds=bounds,
        options={
            "maxfev": opts.mstep_max_evals,
            "xatol": 1e-8,
            "fatol": 1e-14,
            "initial_simplex": np.array([x0, x0 + [0.05, 0.0], x0 + [0.0, 0.05]]),
        },
    )
    if res.fun <= f0:
        return tuple(np.exp(res.x))
    return tuple(np.exp(x0))


def _loglik_terms(ks, c, v, b):
    """log c_i + log p_i(k) as an (M, B) array."""
    return np.log(c)[:, None] + np.stack([_lomax_logpmf(ks, vi, bi) for vi, bi in zip(v, b)])


def _weighted_quantile_split(ks, ns, M):
    cum = np.cumsum(ns) / ns.sum()
    edges = np.searchsorted(cum, np.arange(1, M) / M, side="left")
    groups = []
    start = 0
    for e in list(edges) + [len(ks) - 1]:
        stop = max(e + 1, start + 1)
        stop = min(stop, len(ks))
        groups.append(slice(start, stop))
        start = min(stop, len(ks) - 1)
    return groups


def _initial_params(ks, ns, M, rng, restart, opts):
    """Quantile-split initialization, perturbed for restarts after the first.

    Each group's (v, b) is matched from its weighted median (continuous Lomax
    median b(2^(1/v) - 1)) and its mean log-excess ln(1 + x/b) ~ Exp(v).
    """
    c, v, b = [], [], []
    for g in _weighted_quantile_split(ks, ns, M):
        gk, gn = ks[g], ns[g].astype(float)
        cum = np.cumsum(gn) / gn.sum()
        median = float(gk[np.searchsorted(cum, 0.5)])
        x = np.maximum(gk - 0.5, 0.25)
        vi = 1.0
        for _ in range(3):
            bi = max(median - 0.5, 0.25) / (2.0 ** (1.0 / vi) - 1.0)
            vi = 1.0 / max(np.dot(gn, np.log1p(x / bi)) / gn.sum(), 1e-3)
            vi = min(max(vi, 0.2), 20.0)
        bi = max(median - 0.5, 0.25) / (2.0 ** (1.0 / vi) - 1.0)
        c.append(gn.sum())
        v.append(vi)
        b.append(bi)
    c = np.array(c) / np.sum(c)
    v = np.array(v)
    b = np.array(b)
    if restart > 0:
        v = v * np.exp(rng.normal(0.0, 0.3, M))
        b = b * np.exp(rng.normal(0.0, 0.5, M))
        c = c * np.exp(rng.normal(0.0, 0.3, M))
        c = c / c.sum()
    v = np.clip(v, *opts.v_bounds)
    b = np.clip(b, *opts.b_bounds)
    return c, v, b


def _em(ks, ns, c, v, b, opts):
    """Run EM from (c, v, b).  Returns (c, v, b, loglik, trace, converged)."""
    nsf = ns.astype(float)
    total = nsf.sum()
    v = v.copy()
    b = b.copy()
    terms = _loglik_terms(ks, c, v, b)
    lse = logsumexp(terms, axis=0)
    loglik = float(np.dot(nsf, lse))
    trace = [loglik]
    converged = False
    for _ in range(opts.max_iterations):
        resp = np.exp(terms - lse)
        weights = resp * nsf
        c = weights.sum(axis=1) / total
        c = np.maximum(c, 1e-300)
        for i in range(len(c)):
            v[i], b[i] = _mstep_component(ks, weights[i], v[i], b[i], opts)
        terms = _loglik_terms(ks, c, v, b)
        lse = logsumexp(terms, axis=0)
        new = float(np.dot(nsf, lse))
        trace.append(new)
        change = abs(new - loglik)
        loglik = new
        if change < opts.rel_loglik_tolerance * abs(loglik):
            converged = True
            break
    return c, v, b, loglik, trace, converged


def _unpack(theta, M):
    logits = np.concatenate([[0.0], theta[: M - 1]])
    log_c = logits - logsumexp(logits)
    return log_c, np.exp(theta[M - 1 : 2 * M - 1]), np.exp(theta[2 * M - 1 :])


def _mixture_nll_and_grad(theta, ks, nsf, M):
    """Per-observation negative log-likelihood over (logits, log v, log b)."""
    total = nsf.sum()
    log_c, v, b = _unpack(theta, M)
    terms = log_c[:, None] + np.stack([_lomax_logpmf(ks, vi, bi) for vi, bi in zip(v, b)])
    lse = logsumexp(terms, axis=0)
    weights = np.exp(terms - lse) * nsf
    grad_logits = (weights.sum(axis=1) - total * np.exp(log_c))[1:]
    grad_v = np.empty(M)
    grad_b = np.empty(M)
    for i in range(M):
        gv, gb = _lomax_logpmf_grad(ks, v[i], b[i])
        grad_v[i] = weights[i] @ gv
        grad_b[i] = weights[i] @ gb
    grad = np.concatenate([grad_logits, grad_v, grad_b])
    return -float(nsf @ lse) / total, -grad / total


def _polish(ks, ns, c, v, b, opts):
    """Quasi-Newton ascent of the observed-data likelihood from an EM solution.

    EM crawls along the flat ridges of Lomax mixtures; this finishes the
    climb.  Returns (c, v, b, loglik, success).
    """
    M = len(c)
    nsf = ns.astype(float)
    log_c = np.log(c)
    theta0 = np.concatenate([log_c[1:] - log_c[0], np.log(v), np.log(b)])
    bounds = [(-50.0, 50.0)] * (M - 1) + [tuple(np.log(opts.v_bounds))] * M + [tuple(np.log(opts.b_bounds))] * M
    res = optimize.minimize(
        _mixture_nll_and_grad,
        theta0,
        args=(ks, nsf, M),
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options={"maxiter": 2000, "ftol": 1e-15, "gtol": 1e-10},
    )
    log_c, v, b = _unpack(res.x, M)
    loglik = float(nsf @ logsumexp(_loglik_terms(ks, np.exp(log_c), v, b), axis=0))
    return np.exp(log_c), v, b, loglik, bool(res.success)


def _restart_rng(seed, M, restart):
    return np.random.default_rng([int(seed), int(M), int(restart)])


@dataclass
class _Restart:
    index: int
    c: np.ndarray
    v: np.ndarray
    b: np.ndarray
    loglik: float
    trace: list
    converged: bool


def _run_restart(ks, ns, M, r, opts):
    rng = _restart_rng(opts.seed, M, r)
    c0, v0, b0 = _initial_params(ks, ns, M, rng, r, opts)
    c, v, b, loglik, trace, em_converged = _em(ks, ns, c0, v0, b0, opts)
    pc, pv, pb, p_loglik, p_ok = _polish(ks, ns, c, v, b, opts)
    if p_loglik >= loglik:
        c, v, b, loglik = pc, pv, pb, p_loglik
    return _Restart(r, c, v, b, loglik, trace, em_converged or p_ok)


def fit_mixture(hist: FrequencyHistogram, M: int, opts: FitOptions | None = None) -> FitReport:
    """Fit an M-component discrete Lomax mixture to the binned counts.

    Each seeded restart runs EM (responsibilities, closed-form weights,
    Nelder-Mead component updates) and then polishes the result by direct
    quasi-Newton ascent.  The converged restart with the highest
    log-likelihood wins, lowest index on ties.
    """
    opts = opts or FitOptions()
    M = int(M)
    if M < 1:
        raise ParameterError("M must be >= 1")
    ks, ns = hist.arrays()
    if len(ks) < 2 * M:
        raise InsufficientDataError(
            f"M={M} needs at least {2 * M} distinct occurrence numbers, histogram has {len(ks)}"
        )

    runs = [_run_restart(ks, ns, M, r, opts) for r in range(opts.restarts)]
    pool = [run for run in runs if run.converged] or runs
    best = max(pool, key=lambda run: (run.loglik, -run.index))

    c = best.c / math.fsum(best.c)
    params = MixtureParams.from_arrays(c.tolist(), best.v.tolist(), best.b.tolist())
    report = _report(
        hist,
        "mixture",
        params,
        best.loglik,
        opts.threshold,
        converged=best.converged,
        iterations=len(best.trace) - 1,
        loglik_trace=best.trace,
    )
    if not best.converged:
        raise ConvergenceError(
            f"M={M} fit did not converge in any of {opts.restarts} restarts", best=report
        )
    return report


# ---------------------------------------------------------------------------
# choice of the number of components


@dataclass
class ModelSelection:
    reports: dict[int, FitReport]
    zipf: FitReport | None
    selected_M: int
    alpha: float
    flagged: bool = False  # no M reached p >= alpha; argmax-p chosen instead
    errors: dict = field(default_factory=dict)

    @property
    def selected(self) -> FitReport:
        return self.reports[self.selected_M]

    def to_dict(self):
        return {
            "selected_M": self.selected_M,
            "alpha": self.alpha,
            "flagged": self.flagged,
            "reports": [self.reports[m].to_dict() for m in sorted(self.reports)],
            "zipf": self.zipf.to_dict() if self.zipf else None,
            "errors": {str(k): v for k, v in sorted(self.errors.items(), key=lambda kv: str(kv[0]))},
        }

    @classmethod
    def from_dict(cls, data):
        try:
            reports = {}
            for item in data["reports"]:
                rep = FitReport.from_dict(item)
                reports[rep.M] = rep
            zipf = FitReport.from_dict(data["zipf"]) if data.get("zipf") else None
            return cls(
                reports=reports,
                zipf=zipf,
                selected_M=int(data["selected_M"]),
                alpha=float(data["alpha"]),
                flagged=bool(data.get("flagged", False)),
                errors=dict(data.get("errors", {})),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ParameterError):
                raise
            raise ParameterError(f"malformed model selection: {exc}") from None


def select_model(hist, max_M=3, alpha=0.01, opts: FitOptions | None = None) -> ModelSelection:
    """Fit M = 1..max_M and the zeta baseline; pick the smallest M with p >= alpha.

    Failing fits are recorded in ``errors`` without stopping the others; a
    fit that did not converge still contributes its best-so-far report.
    """
    opts = opts or FitOptions()
    if not 1 <= int(max_M) <= 5:
        raise ParameterError(f"max_M must lie in [1, 5], got {max_M}")
    if not 0.0 < alpha < 1.0:
        raise ParameterError("alpha must lie in (0, 1)")
    reports = {}
    errors = {}
    for M in range(1, int(max_M) + 1):
        try:
            reports[M] = fit_mixture(hist, M, opts)
        except ConvergenceError as exc:
            errors[M] = str(exc)
            if exc.best is not None:
                reports[M] = exc.best
        except LomaxMixError as exc:
            errors[M] = str(exc)
    try:
        zipf = fit_zipf(hist, opts.threshold)
    except LomaxMixError as exc:
        zipf = None
        errors["zipf"] = str(exc)
    if not reports:
        raise InsufficientDataError("no mixture could be fitted: " + "; ".join(map(str, errors.values())))

    passing = [M for M in sorted(reports) if reports[M].p_value >= alpha]
    if passing:
        selected, flagged = passing[0], False
    else:
        selected = max(sorted(reports), key=lambda M: reports[M].p_value)
        flagged = True
    return ModelSelection(reports, zipf, selected, alpha, flagged, errors)
