"""Skew-normal distribution: PDF, CDF, and moment <-> parameter conversion.

The moment-based parameterization (mean, variance, skewness) is what the
layout regressions predict; the (xi, omega, alpha) parameterization is what
the CDF needs. Conversion clamps |delta| at 0.999 so the shape parameter
stays defined for extreme skewness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .special import owens_t, std_normal_cdf, std_normal_pdf

__all__ = [
    "ParameterError",
    "SkewNormalParams",
    "MomentParams",
    "DELTA_MAX",
    "GAMMA1_MAX",
    "skewnorm_pdf",
    "skewnorm_cdf",
    "moments_to_skewnormal",
    "skewnormal_to_moments",
]

DELTA_MAX = 0.999

_B = math.sqrt(2.0 / math.pi)
_SKEW_COEF = (4.0 - math.pi) / 2.0


class ParameterError(ValueError):
    """Raised for invalid distribution parameters."""


def _gamma1_of_delta(delta: float) -> float:
    bd = _B * delta
    return _SKEW_COEF * bd**3 / (1.0 - bd * bd) ** 1.5


#: Largest |skewness| representable under the delta clamp (~0.98710).
GAMMA1_MAX = _gamma1_of_delta(DELTA_MAX)


@dataclass(frozen=True)
class SkewNormalParams:
    """Location (mm), scale (mm), shape of a skew-normal distribution."""

    xi: float
    omega: float
    alpha: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.xi) and math.isfinite(self.omega) and math.isfinite(self.alpha)):
            raise ParameterError("skew-normal parameters must be finite")
        if self.omega <= 0.0:
            raise ParameterError(f"omega must be positive, got {self.omega}")

    @property
    def delta(self) -> float:
        return self.alpha / math.sqrt(1.0 + self.alpha * self.alpha)


@dataclass(frozen=True)
class MomentParams:
    """Mean (mm), variance (mm^2), skewness of a tap-coordinate distribution."""

    mu: float
    sigma2: float
    gamma1: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and math.isfinite(self.sigma2) and math.isfinite(self.gamma1)):
            raise ParameterError("moment parameters must be finite")
        if self.sigma2 <= 0.0:
            raise ParameterError(f"sigma2 must be positive, got {self.sigma2}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


def skewnorm_pdf(x: float, p: SkewNormalParams) -> float:
    """Skew-normal density (2/omega) phi(z) Phi(alpha z), z = (x - xi)/omega."""
    z = (x - p.xi) / p.omega
    return 2.0 / p.omega * std_normal_pdf(z) * std_normal_cdf(p.alpha * z)


def skewnorm_cdf(x: float, p: SkewNormalParams) -> float:
    """Skew-normal CDF Phi(z) - 2 T(z, alpha), clipped to [0, 1]."""
    z = (x - p.xi) / p.omega
    c = std_normal_cdf(z) - 2.0 * owens_t(z, p.alpha)
    return min(1.0, max(0.0, c))


def moments_to_skewnormal(m: MomentParams) -> SkewNormalParams:
    """Convert (mu, sigma^2, gamma1) to (xi, omega, alpha).

    |delta| is capped at 0.999; skewness beyond the representable maximum is
    thereby clamped, never rejected.
    """
    g = abs(m.gamma1) ** (2.0 / 3.0)
    if m.gamma1 == 0.0:
        delta = 0.0
    else:
        delta = math.copysign(
            min(DELTA_MAX, math.sqrt(math.pi / 2.0 * g / (g + _SKEW_COEF ** (2.0 / 3.0)))),
            m.gamma1,
        )
    alpha = delta / math.sqrt(1.0 - delta * delta)
    omega = m.sigma / math.sqrt(1.0 - 2.0 * delta * delta / math.pi)
    xi = m.mu - omega * delta * _B
    return SkewNormalParams(xi=xi, omega=omega, alpha=alpha)


def skewnormal_to_moments(p: SkewNormalParams) -> MomentParams:
    """Exact moments of a skew-normal distribution (inverse conversion)."""
    delta = p.delta
    bd = _B * delta
    mean = p.xi + p.omega * bd
    var = p.omega * p.omega * (1.0 - bd * bd)
    gamma1 = _gamma1_of_delta(delta)
    return MomentParams(mu=mean, sigma2=var, gamma1=gamma1)
