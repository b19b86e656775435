"""Fitting the regression constants from aggregated tap data.

Includes the hinge fit for the skewness model, piecewise OLS for variance
and mean, accuracy metrics (R2, MAE, RMSE, MAPE), leave-one-condition-out
cross validation, and the likelihood-ratio test of normal vs. skew-normal
fit per condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import minimize
from scipy.special import log_ndtr
from scipy.stats import chi2

from .predictor import (
    AxisConstants,
    AxisGeometry,
    BaselineConstants,
    EdgeSide,
    VarianceTarget,
    predict_axis_sr,
    predict_gamma1,
    predict_mean,
    predict_variance,
)
from .skewnormal import (
    MomentParams,
    ParameterError,
    SkewNormalParams,
    moments_to_skewnormal,
)
from .taplog import ConditionAggregate, layout_key

__all__ = [
    "FitError",
    "Axis",
    "Metrics",
    "MeanFit",
    "FitReport",
    "LoocvResult",
    "LRTestResult",
    "compute_metrics",
    "fit_gamma1",
    "fit_variance",
    "fit_mean",
    "fit_baseline",
    "fit_all",
    "loocv",
    "mle_skewnormal",
    "lr_test",
]

_ALPHA_BOUND = 50.0


class FitError(ValueError):
    """A regression could not be carried out on the given data."""


class Axis(str, Enum):
    X = "x"
    Y = "y"


def _geometry(agg: ConditionAggregate, axis: Axis) -> AxisGeometry:
    return agg.layout.axis_x if axis is Axis.X else agg.layout.axis_y


def _moments(agg: ConditionAggregate, axis: Axis) -> MomentParams:
    return agg.moments_x if axis is Axis.X else agg.moments_y


def _observed_sr(agg: ConditionAggregate, axis: Axis) -> float:
    return agg.observed_sr_x if axis is Axis.X else agg.observed_sr_y


@dataclass(frozen=True)
class Metrics:
    r2: float
    mae: float
    rmse: float
    mape: float  # percent
    mape_skipped: int = 0  # observed-zero entries excluded from MAPE


def compute_metrics(predicted, observed) -> Metrics:
    """Standard regression accuracy metrics of predicted against observed."""
    pred = np.asarray(predicted, dtype=float)
    obs = np.asarray(observed, dtype=float)
    if pred.shape != obs.shape or pred.ndim != 1 or len(pred) == 0:
        raise FitError("predicted and observed must be equal-length nonempty vectors")
    resid = pred - obs
    sse = float(np.sum(resid**2))
    sst = float(np.sum((obs - np.mean(obs)) ** 2))
    if sst == 0.0:
        r2 = 1.0 if sse == 0.0 else -math.inf
    else:
        r2 = 1.0 - sse / sst
    mae = float(np.mean(np.abs(resid)))
    rmse = math.sqrt(sse / len(pred))
    nonzero = obs != 0.0
    skipped = int(np.sum(~nonzero))
    if np.any(nonzero):
        mape = float(np.mean(np.abs(resid[nonzero] / obs[nonzero]))) * 100.0
    else:
        mape = math.nan
    return Metrics(r2=r2, mae=mae, rmse=rmse, mape=mape, mape_skipped=skipped)


def _folded_gamma_obs(aggs, axis: Axis) -> tuple[np.ndarray, np.ndarray]:
    """(d_edge, skewness folded into the canonical edge-negative frame)."""
    d_edges, ys = [], []
    for agg in aggs:
        geom = _geometry(agg, axis)
        if geom.edge_side is EdgeSide.NONE:
            continue
        sign = 1.0 if geom.edge_side is EdgeSide.NEGATIVE else -1.0
        d_edges.append(geom.d_edge)
        ys.append(sign * _moments(agg, axis).gamma1)
    return np.array(d_edges), np.array(ys)


def fit_gamma1(aggs: list[ConditionAggregate], axis: Axis) -> tuple[float, float]:
    """Fit the hinge skewness model magnitude = max(0, c + d * d_edge).

    Least squares over conditions with a screen edge, with c >= 0 and
    d <= 0 enforced. Nelder-Mead over (c, d), initialized from OLS on the
    clearly-skewed subset.
    """
    d_edges, ys = _folded_gamma_obs(aggs, axis)
    if len(np.unique(d_edges)) < 3:
        raise FitError("need at least 3 distinct d_edge values with a screen edge")
    if np.max(ys) <= 0.0:
        return 0.0, 0.0

    def sse(params: np.ndarray) -> float:
        c = max(params[0], 0.0)
        d = min(params[1], 0.0)
        r = np.maximum(0.0, c + d * d_edges) - ys
        penalty = max(-params[0], 0.0) ** 2 + max(params[1], 0.0) ** 2
        return float(np.sum(r * r)) + 1e3 * penalty

    active = np.abs(ys) > 0.05
    if np.sum(active) >= 2 and len(np.unique(d_edges[active])) >= 2:
        A = np.column_stack([np.ones(np.sum(active)), d_edges[active]])
        beta, *_ = np.linalg.lstsq(A, ys[active], rcond=None)
        c0, d0 = float(beta[0]), float(beta[1])
    else:
        c0, d0 = float(np.max(ys)), -0.1
    c0 = max(c0, 1e-6)
    d0 = min(d0, -1e-6)
    res = minimize(
        sse, np.array([c0, d0]), method="Nelder-Mead",
        options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000, "maxfev": 4000},
    )
    c = max(float(res.x[0]), 0.0)
    d = min(float(res.x[1]), 0.0)
    return c, d


def _ols(design: np.ndarray, y: np.ndarray, region: str) -> np.ndarray:
    if design.shape[0] < design.shape[1]:
        raise FitError(f"{region} region has fewer points than parameters")
    beta, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        raise FitError(f"{region} region design is rank-deficient")
    return beta


def fit_variance(
    aggs: list[ConditionAggregate],
    axis: Axis,
    threshold: float,
    target: VarianceTarget = VarianceTarget.SIGMA_SQUARED,
) -> tuple[float, float, float, float, float]:
    """Two independent OLS fits of the piecewise variance model.

    Skew region (edge present, d_edge < threshold): [1, size^2, margin];
    far region (everything else): [1, size^2]. ``target`` chooses whether
    the regression response is sigma^2 or sigma.
    """
    skew_rows, skew_y, far_rows, far_y = [], [], [], []
    for agg in aggs:
        geom = _geometry(agg, axis)
        sigma2 = _moments(agg, axis).sigma2
        y = math.sqrt(sigma2) if target is VarianceTarget.SIGMA else sigma2
        if geom.edge_side is not EdgeSide.NONE and geom.d_edge < threshold:
            skew_rows.append([1.0, geom.size**2, geom.margin])
            skew_y.append(y)
        else:
            far_rows.append([1.0, geom.size**2])
            far_y.append(y)
    if not skew_rows or not far_rows:
        region = "skew" if not skew_rows else "far"
        raise FitError(f"{region} region is empty")
    e, f, g = (float(v) for v in _ols(np.array(skew_rows), np.array(skew_y), "skew"))
    h, i = (float(v) for v in _ols(np.array(far_rows), np.array(far_y), "far"))
    return e, f, g, h, i


@dataclass(frozen=True)
class MeanFit:
    j: float
    k: float
    l: float
    degenerate: bool = False


def fit_mean(aggs: list[ConditionAggregate], axis: Axis, threshold: float) -> MeanFit:
    """Fit mu = j + k (d_edge - l)^2 on the skew region via expanded OLS.

    Observed means are folded into the canonical edge-negative frame. The
    far region is excluded and assigned mu = 0.
    """
    d_edges, mus = [], []
    for agg in aggs:
        geom = _geometry(agg, axis)
        if geom.edge_side is EdgeSide.NONE or geom.d_edge >= threshold:
            continue
        sign = 1.0 if geom.edge_side is EdgeSide.NEGATIVE else -1.0
        d_edges.append(geom.d_edge)
        mus.append(sign * _moments(agg, axis).mu)
    d_arr = np.array(d_edges)
    if len(np.unique(d_arr)) < 3:
        raise FitError("skew region needs at least 3 distinct d_edge values")
    design = np.column_stack([np.ones(len(d_arr)), d_arr, d_arr**2])
    b0, b1, b2 = (float(v) for v in _ols(design, np.array(mus), "skew"))
    if abs(b2) < 1e-12:
        return MeanFit(j=b0, k=0.0, l=0.0, degenerate=True)
    l = -b1 / (2.0 * b2)
    k = b2
    j = b0 - k * l * l
    return MeanFit(j=j, k=k, l=l)


def fit_baseline(aggs: list[ConditionAggregate], axis: Axis) -> BaselineConstants:
    """OLS fit of the Gaussian-baseline variance sigma^2 = a size^2 + b."""
    rows = [[_geometry(a, axis).size ** 2, 1.0] for a in aggs]
    ys = [_moments(a, axis).sigma2 for a in aggs]
    a, b = (float(v) for v in _ols(np.array(rows), np.array(ys), "baseline"))
    return BaselineConstants(a=a, b=b)


@dataclass(frozen=True)
class FitReport:
    constants: AxisConstants
    threshold: float
    metrics_gamma1: Metrics
    metrics_variance: Metrics  # in the regression target space (sigma or sigma^2)
    metrics_mean: Metrics
    metrics_sr: Metrics
    mean_degenerate: bool
    residuals: list[dict] = field(repr=False, default_factory=list)


def fit_all(
    aggs: list[ConditionAggregate],
    axis: Axis,
    target: VarianceTarget = VarianceTarget.SIGMA_SQUARED,
) -> FitReport:
    """Full per-axis fit: skewness hinge first, then its threshold
    partitions the data for the variance and mean fits. SR metrics come
    from running the predictor with the fitted constants."""
    if not aggs:
        raise FitError("no aggregated conditions to fit")
    aggs = sorted(aggs, key=lambda a: layout_key(a.layout))
    c, d = fit_gamma1(aggs, axis)
    threshold = 0.0 if c == 0.0 else -c / d
    e, f, g, h, i = fit_variance(aggs, axis, threshold, target)
    mean_fit = fit_mean(aggs, axis, threshold)
    constants = AxisConstants(
        c=c, d=d, e=e, f=f, g=g, h=h, i=i,
        j=mean_fit.j, k=mean_fit.k, l=mean_fit.l,
        variance_target=target,
        baseline=fit_baseline(aggs, axis),
    )

    rows = []
    for agg in aggs:
        geom = _geometry(agg, axis)
        m = _moments(agg, axis)
        var_pred = predict_variance(geom, constants)
        if target is VarianceTarget.SIGMA:
            var_pred_t, var_obs_t = math.sqrt(var_pred), math.sqrt(m.sigma2)
        else:
            var_pred_t, var_obs_t = var_pred, m.sigma2
        rows.append({
            "size": geom.size,
            "margin": geom.margin,
            "edge": geom.edge_side.value,
            "d_edge": geom.d_edge,
            "n": agg.n,
            "gamma1_obs": m.gamma1,
            "gamma1_pred": predict_gamma1(geom, constants),
            "variance_obs": var_obs_t,
            "variance_pred": var_pred_t,
            "mu_obs": m.mu,
            "mu_pred": predict_mean(geom, constants),
            "sr_obs": _observed_sr(agg, axis),
            "sr_pred": predict_axis_sr(geom, constants),
        })
    return FitReport(
        constants=constants,
        threshold=threshold,
        metrics_gamma1=compute_metrics(
            [r["gamma1_pred"] for r in rows], [r["gamma1_obs"] for r in rows]),
        metrics_variance=compute_metrics(
            [r["variance_pred"] for r in rows], [r["variance_obs"] for r in rows]),
        metrics_mean=compute_metrics(
            [r["mu_pred"] for r in rows], [r["mu_obs"] for r in rows]),
        metrics_sr=compute_metrics(
            [r["sr_pred"] for r in rows], [r["sr_obs"] for r in rows]),
        mean_degenerate=mean_fit.degenerate,
        residuals=rows,
    )


@dataclass(frozen=True)
class LoocvResult:
    metrics: Metrics
    n_folds: int
    skipped: list[str] = field(default_factory=list)


def loocv(
    aggs: list[ConditionAggregate],
    axis: Axis,
    target: VarianceTarget = VarianceTarget.SIGMA_SQUARED,
) -> LoocvResult:
    """Leave-one-condition-out cross validation of SR prediction."""
    if len(aggs) < 3:
        raise FitError("LOOCV needs at least 3 conditions")
    aggs = sorted(aggs, key=lambda a: layout_key(a.layout))
    preds, obs, skipped = [], [], []
    for idx, held_out in enumerate(aggs):
        rest = aggs[:idx] + aggs[idx + 1:]
        try:
            report = fit_all(rest, axis, target)
            preds.append(predict_axis_sr(_geometry(held_out, axis), report.constants))
            obs.append(_observed_sr(held_out, axis))
        except (FitError, ParameterError) as exc:
            skipped.append(f"fold {idx} ({layout_key(held_out.layout)}): {exc}")
    if not preds:
        raise FitError("every LOOCV fold failed")
    return LoocvResult(metrics=compute_metrics(preds, obs), n_folds=len(preds), skipped=skipped)


# -- likelihood-ratio test ----------------------------------------------------

def _skewnorm_nll(params: np.ndarray, xs: np.ndarray) -> float:
    xi, log_omega, alpha = params
    if abs(alpha) > _ALPHA_BOUND or abs(log_omega) > 50.0:
        return 1e12
    omega = math.exp(log_omega)
    z = (xs - xi) / omega
    ll = (
        len(xs) * (math.log(2.0) - log_omega)
        - 0.5 * float(np.sum(z * z))
        - 0.5 * len(xs) * math.log(2.0 * math.pi)
        + float(np.sum(log_ndtr(alpha * z)))
    )
    ll = float(ll)
    if not math.isfinite(ll):
        return 1e12
    return -ll


def _normal_llf(xs: np.ndarray) -> float:
    n = len(xs)
    var_mle = float(np.var(xs))
    return -0.5 * n * (math.log(2.0 * math.pi * var_mle) + 1.0)


def mle_skewnormal(samples) -> tuple[SkewNormalParams, float, bool]:
    """Maximum-likelihood skew-normal fit via Nelder-Mead.

    Returns (params, log-likelihood, converged). omega is kept positive via
    log-parameterization and |alpha| is bounded at 50. Initialized from the
    sample moments.
    """
    xs = np.asarray(samples, dtype=float)
    if len(xs) < 8:
        raise FitError("need at least 8 samples")
    if float(np.var(xs)) <= 0.0:
        raise FitError("samples have zero variance")
    mean = float(np.mean(xs))
    var = float(np.var(xs, ddof=1))
    centered = xs - mean
    m2 = float(np.mean(centered**2))
    g1 = float(np.mean(centered**3)) / m2**1.5
    init = moments_to_skewnormal(MomentParams(mu=mean, sigma2=var, gamma1=g1))
    x0 = np.array([init.xi, math.log(init.omega), np.clip(init.alpha, -_ALPHA_BOUND, _ALPHA_BOUND)])
    res = minimize(
        _skewnorm_nll, x0, args=(xs,), method="Nelder-Mead",
        options={"xatol": 1e-9, "fatol": 1e-9, "maxiter": 2000, "maxfev": 4000},
    )
    best = res.x
    # The normal MLE is a boundary candidate of the nested family; never
    # report a fit worse than it.
    normal_point = np.array([mean, 0.5 * math.log(np.var(xs)), 0.0])
    if _skewnorm_nll(normal_point, xs) < _skewnorm_nll(best, xs):
        best = normal_point
    params = SkewNormalParams(
        xi=float(best[0]), omega=math.exp(float(best[1])), alpha=float(best[2]))
    return params, -_skewnorm_nll(best, xs), bool(res.success)


@dataclass(frozen=True)
class LRTestResult:
    llf_normal: float
    llf_skewnormal: float
    statistic: float
    p_value: float
    params: SkewNormalParams
    converged: bool


def lr_test(samples) -> LRTestResult:
    """Likelihood-ratio test of normal vs. skew-normal fit.

    The statistic 2 * (llf_skewnormal - llf_normal) is referred to the
    chi-squared distribution with one degree of freedom.
    """
    xs = np.asarray(samples, dtype=float)
    params, llf_sn, converged = mle_skewnormal(xs)
    llf_norm = _normal_llf(xs)
    stat = 2.0 * (llf_sn - llf_norm)
    p = float(chi2.sf(max(stat, 0.0), df=1))
    return LRTestResult(
        llf_normal=llf_norm, llf_skewnormal=llf_sn,
        statistic=stat, p_value=p, params=params, converged=converged,
    )
