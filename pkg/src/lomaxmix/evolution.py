"""Price reduced equation applied to fitted frequency models.

    delta_zbar = z_fr - zbar + delta_zfr

``z_fr`` is the selection threshold frequency, ``zbar`` the mean
representation frequency and ``delta_zfr`` the selection error.  A negative
``delta_zbar`` marks a medium drifting toward extinction.

``zbar`` is the continuous Lomax-mixture mean sum_i c_i b_i / (v_i - 1),
which only exists when every v_i > 1.  (The ratio b/v is sometimes quoted
as the Lomax mean; it is not, and is not used here.)
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import MixtureParams, mixture_mean
from .errors import DomainError

DIVERGENT = "divergent"


def price_delta(z_fr, zbar, delta_zfr):
    for name, val in (("z_fr", z_fr), ("zbar", zbar), ("delta_zfr", delta_zfr)):
        if not isinstance(val, (int, float)) or not math.isfinite(val):
            raise DomainError(f"{name} must be a finite number, got {val!r}")
    return z_fr - zbar + delta_zfr


@dataclass(frozen=True)
class EvolutionAssessment:
    z_fr: float
    delta_zfr: float
    zbar: float | None  # None when the mixture mean diverges
    delta_zbar: float | None
    divergent_components: tuple[int, ...] = ()

    @property
    def divergent(self):
        return self.zbar is None

    @property
    def trend(self):
        if self.divergent:
            return "divergence-dominated"
        if self.delta_zbar > 0:
            return "growing"
        if self.delta_zbar < 0:
            return "declining"
        return "stationary"

    def to_dict(self):
        return {
            "z_fr": self.z_fr,
            "delta_zfr": self.delta_zfr,
            "zbar": DIVERGENT if self.divergent else self.zbar,
            "delta_zbar": DIVERGENT if self.divergent else self.delta_zbar,
        }


def assess_model(params: MixtureParams, z_fr, delta_zfr) -> EvolutionAssessment:
    """Evolution rate implied by a fitted mixture; flagged when its mean diverges."""
    z_fr = float(z_fr)
    delta_zfr = float(delta_zfr)
    if not (math.isfinite(z_fr) and math.isfinite(delta_zfr)):
        raise DomainError("z_fr and delta_zfr must be finite")
    mean = mixture_mean(params)
    if mean.is_divergent:
        return EvolutionAssessment(z_fr, delta_zfr, None, None, mean.divergent)
    return EvolutionAssessment(z_fr, delta_zfr, mean.value, price_delta(z_fr, mean.value, delta_zfr))


def compare_assessments(first: EvolutionAssessment, second: EvolutionAssessment):
    """Difference in evolution rate between two media (first minus second).

    None when either side is divergence-dominated.
    """
    if first.divergent or second.divergent:
        return None
    return first.delta_zbar - second.delta_zbar
