"""Chi-square goodness of fit with right-tail bin merging."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientBinsError, ParameterError
from .special import chi2_sf

__all__ = ["Bin", "BinLayout", "ChiSquareResult", "merge_bins", "chi_square", "chi2_sf"]

DEFAULT_THRESHOLD = 6


@dataclass(frozen=True)
class Bin:
    k_lo: int
    k_hi: int  # inclusive; the top bin also carries the tail mass beyond it
    observed: int
    expected: float

    def to_dict(self):
        return {"k_lo": self.k_lo, "k_hi": self.k_hi, "obs": self.observed, "exp": self.expected}


@dataclass(frozen=True)
class BinLayout:
    bins: tuple[Bin, ...]

    def __len__(self):
        return len(self.bins)

    def __iter__(self):
        return iter(self.bins)

    @property
    def observed(self):
        return np.array([b.observed for b in self.bins], dtype=float)

    @property
    def expected(self):
        return np.array([b.expected for b in self.bins])

    @property
    def ranges(self):
        return [(b.k_lo, b.k_hi) for b in self.bins]

    def to_list(self):
        return [b.to_dict() for b in self.bins]

    @classmethod
    def from_list(cls, items):
        return cls(
            tuple(Bin(int(d["k_lo"]), int(d["k_hi"]), int(d["obs"]), float(d["exp"])) for d in items)
        )


def _group_observed(ks, ns, threshold):
    """Right-to-left accumulation of raw bins; returns lists of indices into ks."""
    groups = []
    current = []
    acc = 0
    for i in range(len(ks) - 1, -1, -1):
        current.append(i)
        acc += ns[i]
        if acc >= threshold:
            groups.append(current)
            current, acc = [], 0
    if current:
        if groups:
            groups[-1].extend(current)
        else:
            groups.append(current)
    groups.reverse()
    return [sorted(g) for g in groups]


def _split_gap(model, top, bottom):
    """Last k of the lower bin when unobserved k in (top, bottom) separate two groups.

    The gap is divided where the model puts half of its probability on each
    side, so neither neighbour systematically gains expected mass.
    """
    if bottom - top <= 1:
        return top
    sf_top = float(model.sf(top))
    half = 0.5 * (sf_top + float(model.sf(bottom - 1)))
    if not sf_top > half:
        return (top + bottom) // 2
    lo, hi = top, bottom - 1  # invariant: sf(lo) > half >= sf(hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if float(model.sf(mid)) > half:
            lo = mid
        else:
            hi = mid
    return min((lo, hi), key=lambda e: abs(float(model.sf(e)) - half))


def merge_bins(hist, model, threshold=DEFAULT_THRESHOLD) -> BinLayout:
    """Merge sparse right-tail bins and attach model expectations.

    Raw bins are the observed occurrence numbers.  Moving from the largest k
    leftwards, bins are accumulated until the observed count reaches
    ``threshold``.  A leftover low-k accumulation joins its right neighbour.
    Bin ranges are contiguous: the first starts at k=1, unobserved k between
    two groups are split at the model's probability midpoint, and the top
    bin's expectation includes all mass above its k_hi, so expected counts
    partition the total.

    ``model`` only needs ``sf(k)``, the probability P(K > k).
    """
    if not hist.total_types:
        raise ParameterError("histogram is empty")
    if threshold < 1:
        raise ParameterError("threshold must be >= 1")
    ks, ns = hist.arrays()
    groups = _group_observed(ks, ns, threshold)

    ends = [
        _split_gap(model, int(ks[g[-1]]), int(ks[nxt[0]]))
        for g, nxt in zip(groups[:-1], groups[1:])
    ] + [int(ks[-1])]
    starts = [1] + [e + 1 for e in ends[:-1]]
    total = hist.total_types

    # P(lo <= K <= hi) = sf(lo - 1) - sf(hi); the top bin closes the partition
    edge_sf = [float(model.sf(e)) for e in ends[:-1]]
    probs = []
    prev = 1.0
    for sf_hi in edge_sf:
        probs.append(prev - sf_hi)
        prev = sf_hi
    probs.append(1.0 - math.fsum(probs))
    bins = [
        Bin(lo, hi, int(ns[g].sum()), total * prob)
        for g, lo, hi, prob in zip(groups, starts, ends, probs)
    ]
    return BinLayout(tuple(bins))


@dataclass(frozen=True)
class ChiSquareResult:
    chi2: float
    dof: int
    p_value: float
    layout: BinLayout

    def __iter__(self):
        return iter((self.chi2, self.dof, self.p_value))


def chi_square_statistic(layout: BinLayout) -> float:
    obs = layout.observed
    exp = layout.expected
    if np.any((exp <= 0) & (obs > 0)):
        return math.inf
    mask = exp > 0
    return float(np.sum((obs[mask] - exp[mask]) ** 2 / exp[mask]))


def chi_square(hist, model, n_free_params, threshold=DEFAULT_THRESHOLD) -> ChiSquareResult:
    """Pearson chi-square over the merged layout, dof = bins - 1 - n_free_params."""
    layout = merge_bins(hist, model, threshold)
    dof = len(layout) - 1 - int(n_free_params)
    if dof < 1:
        raise InsufficientBinsError(len(layout), n_free_params)
    stat = chi_square_statistic(layout)
    return ChiSquareResult(stat, dof, chi2_sf(stat, dof), layout)
