"""Touch success-rate prediction near screen edges.

Tap coordinates are modeled per axis as skew-normal distributions whose
moments (skewness, variance, mean) are simple regressions on the target
size and its distance to the nearest screen edge. The package covers the
predictive closed forms, tap-log ingestion and fitting, seeded simulation
oracles, a CLI, and a small HTTP service.
"""

from .special import erf, owens_t, std_normal_cdf, std_normal_pdf
from .skewnormal import (
    GAMMA1_MAX,
    MomentParams,
    ParameterError,
    SkewNormalParams,
    moments_to_skewnormal,
    skewnorm_cdf,
    skewnorm_pdf,
    skewnormal_to_moments,
)
from .predictor import (
    AxisConstants,
    AxisGeometry,
    BaselineConstants,
    EdgeSide,
    ModelConstants,
    ModelDomainError,
    TargetLayout,
    VarianceTarget,
    baseline_sr_1d,
    baseline_sr_2d,
    baseline_variance,
    predict_axis_sr,
    predict_gamma1,
    predict_mean,
    predict_moments,
    predict_sr_2d,
    predict_variance,
)
from .taplog import (
    AggregationMode,
    ConditionAggregate,
    LogFormat,
    ParseError,
    TapTrial,
    aggregate,
    filter_outliers_3sd,
    filter_outliers_iqr,
    load_constants,
    parse_tap_log,
    save_constants,
    write_tap_log,
)
from .estimation import (
    Axis,
    FitError,
    FitReport,
    LRTestResult,
    Metrics,
    compute_metrics,
    fit_all,
    fit_gamma1,
    fit_mean,
    fit_variance,
    loocv,
    lr_test,
    mle_skewnormal,
)
from .simulation import SimDesign, mc_axis_sr, sample_skewnormal, synth_experiment
from .presets import list_presets, load_design_preset, load_preset

__version__ = "0.1.0"
