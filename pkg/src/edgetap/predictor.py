"""Layout -> tap-distribution moments -> success rate.

Per axis, regression models map target size and edge distance to skewness
(hinge), variance (piecewise linear), and mean (piecewise quadratic). The
moments are converted to skew-normal parameters and integrated over the
target extent; the 2D success rate is the product of the axis rates. The
Gaussian baseline (variance affine in squared size, erf success rate) is
included for comparison.

Sign convention: every formula is written in a local frame where the nearest
screen edge (if any) lies on the negative side of the axis. Inputs with the
edge on the positive side are mirrored on entry and the predicted mean and
skewness are negated on exit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

from .skewnormal import (
    MomentParams,
    ParameterError,
    moments_to_skewnormal,
    skewnorm_cdf,
)
from .special import erf

__all__ = [
    "ModelDomainError",
    "EdgeSide",
    "VarianceTarget",
    "AxisGeometry",
    "TargetLayout",
    "BaselineConstants",
    "AxisConstants",
    "ModelConstants",
    "predict_gamma1",
    "predict_variance",
    "predict_mean",
    "predict_moments",
    "predict_axis_sr",
    "predict_sr_2d",
    "baseline_variance",
    "baseline_sr_1d",
    "baseline_sr_2d",
]

_SQRT_2 = math.sqrt(2.0)


class ModelDomainError(ValueError):
    """Raised when constants produce values outside the model's domain."""


class EdgeSide(str, Enum):
    NEGATIVE = "neg"
    POSITIVE = "pos"
    NONE = "none"


class VarianceTarget(str, Enum):
    """Which quantity the variance regression expression produces."""

    SIGMA_SQUARED = "sigma2"
    SIGMA = "sigma"


@dataclass(frozen=True)
class AxisGeometry:
    """One axis of a target layout: size S, edge margin, and edge side."""

    size: float
    margin: float
    edge_side: EdgeSide = EdgeSide.NONE

    def __post_init__(self) -> None:
        if not (math.isfinite(self.size) and math.isfinite(self.margin)):
            raise ParameterError("axis geometry must be finite")
        if self.size <= 0.0:
            raise ParameterError(f"size must be positive, got {self.size}")
        if self.margin < 0.0:
            raise ParameterError(f"margin must be nonnegative, got {self.margin}")

    @property
    def d_edge(self) -> float:
        """Distance from the target center to the nearest screen edge."""
        return self.margin + 0.5 * self.size


@dataclass(frozen=True)
class TargetLayout:
    axis_x: AxisGeometry
    axis_y: AxisGeometry


@dataclass(frozen=True)
class BaselineConstants:
    """Gaussian-baseline variance constants: sigma^2 = a * size^2 + b."""

    a: float
    b: float


@dataclass(frozen=True)
class AxisConstants:
    """Fitted regression constants for one axis.

    c, d: skewness hinge (c >= 0, d <= 0); e, f, g: variance in the
    skew region; h, i: variance in the far region; j, k, l: mean quadratic.
    """

    c: float
    d: float
    e: float
    f: float
    g: float
    h: float
    i: float
    j: float
    k: float
    l: float
    variance_target: VarianceTarget = VarianceTarget.SIGMA_SQUARED
    baseline: BaselineConstants | None = None

    def __post_init__(self) -> None:
        if self.c < 0.0:
            raise ParameterError(f"c must be >= 0, got {self.c}")
        if self.d > 0.0:
            raise ParameterError(f"d must be <= 0, got {self.d}")
        if self.d == 0.0 and self.c > 0.0:
            raise ParameterError(
                "d = 0 with c > 0 would make the skew region infinite"
            )

    @property
    def threshold(self) -> float:
        """Edge distance beyond which predicted skewness is zero (-c/d)."""
        if self.c == 0.0:
            return 0.0
        return -self.c / self.d


@dataclass(frozen=True)
class ModelConstants:
    x: AxisConstants
    y: AxisConstants


def _in_skew_region(axis: AxisGeometry, k: AxisConstants) -> bool:
    return axis.edge_side is not EdgeSide.NONE and axis.d_edge < k.threshold


def _edge_sign(axis: AxisGeometry) -> float:
    # sign(target center - screen edge) in the caller's frame
    return 1.0 if axis.edge_side is EdgeSide.NEGATIVE else -1.0


def predict_gamma1(axis: AxisGeometry, k: AxisConstants) -> float:
    """Predicted skewness: sign(center - edge) * max(0, c + d * d_edge)."""
    if axis.edge_side is EdgeSide.NONE:
        return 0.0
    return _edge_sign(axis) * max(0.0, k.c + k.d * axis.d_edge)


def predict_variance(axis: AxisGeometry, k: AxisConstants) -> float:
    """Predicted tap-coordinate variance (mm^2) along the axis."""
    if _in_skew_region(axis, k):
        value = k.e + k.f * axis.size**2 + k.g * axis.margin
        branch = "skew"
    else:
        value = k.h + k.i * axis.size**2
        branch = "far"
    if k.variance_target is VarianceTarget.SIGMA:
        if value <= 0.0:
            raise ModelDomainError(
                f"{branch}-region sigma expression is nonpositive ({value:.6g}) "
                f"for size={axis.size}, margin={axis.margin}"
            )
        value = value * value
    if value <= 0.0:
        raise ModelDomainError(
            f"{branch}-region variance is nonpositive ({value:.6g}) "
            f"for size={axis.size}, margin={axis.margin}"
        )
    return value


def predict_mean(axis: AxisGeometry, k: AxisConstants) -> float:
    """Predicted mean tap offset (mm) from the target center."""
    if not _in_skew_region(axis, k):
        return 0.0
    mu = k.j + k.k * (axis.d_edge - k.l) ** 2
    return _edge_sign(axis) * mu


def predict_moments(axis: AxisGeometry, k: AxisConstants) -> MomentParams:
    return MomentParams(
        mu=predict_mean(axis, k),
        sigma2=predict_variance(axis, k),
        gamma1=predict_gamma1(axis, k),
    )


def predict_axis_sr(axis: AxisGeometry, k: AxisConstants) -> float:
    """Probability that a tap lands within [-S/2, S/2] along the axis."""
    p = moments_to_skewnormal(predict_moments(axis, k))
    half = 0.5 * axis.size
    return skewnorm_cdf(half, p) - skewnorm_cdf(-half, p)


def predict_sr_2d(layout: TargetLayout, k: ModelConstants) -> float:
    """2D success rate as the product of independent axis rates."""
    return predict_axis_sr(layout.axis_x, k.x) * predict_axis_sr(layout.axis_y, k.y)


def baseline_variance(size: float, a: float, b: float) -> float:
    """Gaussian-baseline variance a * size^2 + b."""
    if size <= 0.0:
        raise ParameterError(f"size must be positive, got {size}")
    var = a * size * size + b
    if var <= 0.0:
        raise ModelDomainError(
            f"baseline variance nonpositive ({var:.6g}) for a={a}, b={b}, size={size}"
        )
    return var


def baseline_sr_1d(size: float, sigma: float) -> float:
    """Gaussian-baseline axis success rate erf(S / (2 sqrt(2) sigma))."""
    if size <= 0.0 or sigma <= 0.0:
        raise ParameterError("size and sigma must be positive")
    return erf(size / (2.0 * _SQRT_2 * sigma))


def baseline_sr_2d(layout: TargetLayout, k: ModelConstants) -> float:
    """Gaussian-baseline 2D success rate."""
    srs = []
    for axis, kc in ((layout.axis_x, k.x), (layout.axis_y, k.y)):
        if kc.baseline is None:
            raise ModelDomainError("baseline constants are not set for this axis")
        var = baseline_variance(axis.size, kc.baseline.a, kc.baseline.b)
        srs.append(baseline_sr_1d(axis.size, math.sqrt(var)))
    return srs[0] * srs[1]
