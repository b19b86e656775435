"""Command-line interface.

Subcommands: predict, fit, loocv, simulate, lrtest, convert. All outputs
are deterministic functions of the inputs and flags; reruns are
byte-identical. Exit codes: 0 success, 2 usage/validation error,
3 computation failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import presets
from .estimation import (
    Axis,
    FitError,
    compute_metrics,
    fit_all,
    fit_baseline,
    loocv as run_loocv,
    lr_test,
)
from .predictor import (
    AxisConstants,
    AxisGeometry,
    EdgeSide,
    ModelConstants,
    ModelDomainError,
    TargetLayout,
    VarianceTarget,
    baseline_sr_2d,
    predict_axis_sr,
    predict_moments,
    predict_sr_2d,
)
from .simulation import load_design, synth_experiment
from .skewnormal import ParameterError, moments_to_skewnormal
from .taplog import (
    AggregationMode,
    LogFormat,
    ParseError,
    aggregate,
    constants_to_dict,
    filter_outliers_3sd,
    filter_outliers_iqr,
    layout_key,
    load_constants,
    parse_tap_log,
    write_tap_log,
)

EXIT_USAGE = 2
EXIT_COMPUTE = 3


def _fmt(x: float) -> str:
    """Human output: 6 significant digits."""
    return f"{x:.6g}"


def _load_constants_arg(spec: str) -> ModelConstants:
    if spec in ("exp1", "exp2", "exp3"):
        return presets.load_preset(spec)
    path = Path(spec)
    if not path.exists():
        raise ParameterError(f"constants file not found: {spec}")
    return load_constants(path)


def _load_design_arg(spec: str):
    if spec in presets.list_design_presets():
        return presets.load_design_preset(spec)
    path = Path(spec)
    if not path.exists():
        raise ParameterError(f"design file not found: {spec}")
    return load_design(path)


def _read_log(path: str, fmt: str):
    p = Path(path)
    if not p.exists():
        raise ParameterError(f"tap log not found: {path}")
    with open(p, encoding="utf-8") as fh:
        return parse_tap_log(fh, LogFormat(fmt))


def _prepare_aggs(args):
    trials = _read_log(args.log, args.format)
    if args.outlier == "3sd":
        trials, _, _ = filter_outliers_3sd(trials)
    elif args.outlier == "iqr":
        trials, _, _ = filter_outliers_iqr(trials)
    aggs, _ = aggregate(trials, AggregationMode(args.aggregation))
    return aggs


def _metrics_dict(m) -> dict:
    return {"r2": m.r2, "mae": m.mae, "rmse": m.rmse,
            "mape_percent": m.mape, "mape_skipped": m.mape_skipped}


# -- predict ------------------------------------------------------------------

def cmd_predict(args) -> int:
    k = _load_constants_arg(args.constants)
    layout = TargetLayout(
        axis_x=AxisGeometry(args.w, args.margin_x, EdgeSide(args.edge_x)),
        axis_y=AxisGeometry(args.h, args.margin_y, EdgeSide(args.edge_y)),
    )
    out: dict = {"sr": predict_sr_2d(layout, k)}
    for name, axis_geom, kc in (("x", layout.axis_x, k.x), ("y", layout.axis_y, k.y)):
        m = predict_moments(axis_geom, kc)
        p = moments_to_skewnormal(m)
        out[f"sr_{name}"] = predict_axis_sr(axis_geom, kc)
        out[name] = {
            "gamma1": m.gamma1, "sigma2": m.sigma2, "mu": m.mu,
            "xi": p.xi, "omega": p.omega, "alpha": p.alpha,
        }
    if args.baseline:
        out["baseline_sr"] = baseline_sr_2d(layout, k)
    if args.json:
        print(json.dumps(out, sort_keys=True))
    else:
        print(f"SR   = {_fmt(out['sr'])}")
        print(f"SR_x = {_fmt(out['sr_x'])}   SR_y = {_fmt(out['sr_y'])}")
        for name in ("x", "y"):
            a = out[name]
            print(f"{name}: gamma1={_fmt(a['gamma1'])} sigma2={_fmt(a['sigma2'])} "
                  f"mu={_fmt(a['mu'])} xi={_fmt(a['xi'])} omega={_fmt(a['omega'])} "
                  f"alpha={_fmt(a['alpha'])}")
        if args.baseline:
            print(f"baseline SR = {_fmt(out['baseline_sr'])}")
    return 0


# -- fit ----------------------------------------------------------------------

def _fallback_axis_constants(aggs, axis: Axis, target: VarianceTarget) -> AxisConstants:
    """Reversion-only constants for an axis with no edge data: skewness and
    mean fixed at zero, variance from the far-region (baseline) OLS. With a
    single distinct size the slope is unidentifiable; fall back to a
    constant-variance model."""
    from edgetap.predictor import BaselineConstants

    moments = [(a.moments_x if axis is Axis.X else a.moments_y) for a in aggs]
    sizes2 = np.array([(a.layout.axis_x if axis is Axis.X else a.layout.axis_y).size ** 2
                       for a in aggs])
    variances = np.array([m.sigma2 for m in moments])
    single_size = len(np.unique(sizes2)) < 2
    if single_size:
        baseline = BaselineConstants(a=0.0, b=float(np.mean(variances)))
    else:
        baseline = fit_baseline(aggs, axis)
    if target is VarianceTarget.SIGMA:
        sigmas = np.sqrt(variances)
        if single_size:
            h, i = float(np.mean(sigmas)), 0.0
        else:
            beta, *_ = np.linalg.lstsq(
                np.column_stack([np.ones(len(aggs)), sizes2]), sigmas, rcond=None)
            h, i = float(beta[0]), float(beta[1])
    else:
        h, i = baseline.b, baseline.a
    return AxisConstants(c=0.0, d=0.0, e=0.0, f=0.0, g=0.0, h=h, i=i,
                         j=0.0, k=0.0, l=0.0, variance_target=target, baseline=baseline)


def cmd_fit(args) -> int:
    aggs = _prepare_aggs(args)
    target = VarianceTarget(args.variance_target)
    axes = [Axis.X, Axis.Y] if args.axis == "both" else [Axis(args.axis)]
    fitted: dict[str, AxisConstants] = {}
    report_blocks: dict[str, dict] = {}
    for axis in (Axis.X, Axis.Y):
        if axis in axes:
            report = fit_all(aggs, axis, target)
            fitted[axis.value] = report.constants
            report_blocks[axis.value] = {
                "threshold": report.threshold,
                "metrics": {
                    "gamma1": _metrics_dict(report.metrics_gamma1),
                    "variance": _metrics_dict(report.metrics_variance),
                    "mu": _metrics_dict(report.metrics_mean),
                    "sr": _metrics_dict(report.metrics_sr),
                },
            }
            print(f"axis {axis.value}: threshold -c/d = {_fmt(report.threshold)} mm")
            print(f"axis {axis.value}: SR R^2 = {_fmt(report.metrics_sr.r2)}  "
                  f"MAE = {_fmt(report.metrics_sr.mae)}")
            if args.residuals:
                res_path = Path(args.residuals)
                if len(axes) > 1:
                    res_path = res_path.with_name(f"{res_path.stem}_{axis.value}{res_path.suffix}")
                with open(res_path, "w", encoding="utf-8", newline="") as fh:
                    writer = csv.DictWriter(fh, fieldnames=list(report.residuals[0]), lineterminator="\n")
                    writer.writeheader()
                    writer.writerows(report.residuals)
        else:
            fitted[axis.value] = _fallback_axis_constants(aggs, axis, target)
    model = ModelConstants(x=fitted["x"], y=fitted["y"])
    doc = constants_to_dict(model, preset_name=args.preset_name,
                            source=f"fitted from {Path(args.log).name}")
    doc["fit"] = report_blocks
    payload = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.output:
        Path(args.output).write_text(payload, encoding="utf-8")
    else:
        sys.stdout.write(payload)
    return 0


def cmd_loocv(args) -> int:
    aggs = _prepare_aggs(args)
    result = run_loocv(aggs, Axis(args.axis), VarianceTarget(args.variance_target))
    m = result.metrics
    print(f"LOOCV over {result.n_folds} conditions "
          f"({len(result.skipped)} folds skipped)")
    print(f"R^2 = {_fmt(m.r2)}  MAE = {_fmt(m.mae)}  RMSE = {_fmt(m.rmse)}  "
          f"MAPE = {_fmt(m.mape)}%")
    for note in result.skipped:
        print(f"skipped: {note}", file=sys.stderr)
    return 0


# -- simulate -----------------------------------------------------------------

def cmd_simulate(args) -> int:
    k = _load_constants_arg(args.constants)
    design = _load_design_arg(args.design)
    if args.seed is not None:
        from dataclasses import replace
        design = replace(design, seed=args.seed)
    trials = synth_experiment(k, design)
    fmt = LogFormat(args.format)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            write_tap_log(trials, fh, fmt)
    else:
        write_tap_log(trials, sys.stdout, fmt)
    print(f"wrote {len(trials)} trials", file=sys.stderr)
    return 0


# -- lrtest -------------------------------------------------------------------

def cmd_lrtest(args) -> int:
    trials = _read_log(args.log, args.format)
    axis = Axis(args.axis)
    by_condition: dict[tuple, list] = {}
    for t in trials:
        by_condition.setdefault(layout_key(t.layout), []).append(t)
    out_fh = open(args.output, "w", encoding="utf-8", newline="") if args.output else sys.stdout
    try:
        writer = csv.writer(out_fh, lineterminator="\n")
        writer.writerow(["size", "margin", "edge", "d_edge", "n",
                         "llf_normal", "llf_skewnormal", "statistic", "p_value"])
        for key in sorted(by_condition):
            members = by_condition[key]
            geom = members[0].layout.axis_x if axis is Axis.X else members[0].layout.axis_y
            xs = [t.tap_x if axis is Axis.X else t.tap_y for t in members]
            if len(xs) < 8:
                print(f"condition {key}: n={len(xs)} < 8, skipped", file=sys.stderr)
                continue
            r = lr_test(xs)
            writer.writerow([repr(geom.size), repr(geom.margin), geom.edge_side.value,
                             repr(geom.d_edge), len(xs),
                             repr(r.llf_normal), repr(r.llf_skewnormal),
                             repr(r.statistic), repr(r.p_value)])
    finally:
        if out_fh is not sys.stdout:
            out_fh.close()
    return 0


# -- convert ------------------------------------------------------------------

def cmd_convert(args) -> int:
    trials = _read_log(args.input, args.from_format)
    with open(args.output, "w", encoding="utf-8", newline="") as fh:
        write_tap_log(trials, fh, LogFormat(args.to_format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edgetap",
                                     description="Edge-aware touch success-rate modeling")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("predict", help="predict success rate for a target layout")
    p.add_argument("constants", help="constants JSON path or preset name (exp1/exp2/exp3)")
    p.add_argument("--w", type=float, required=True, help="target width (mm)")
    p.add_argument("--h", type=float, required=True, help="target height (mm)")
    p.add_argument("--margin-x", type=float, required=True)
    p.add_argument("--margin-y", type=float, required=True)
    p.add_argument("--edge-x", choices=["neg", "pos", "none"], default="none")
    p.add_argument("--edge-y", choices=["neg", "pos", "none"], default="none")
    p.add_argument("--baseline", action="store_true", help="also print the Gaussian-baseline SR")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_predict)

    def add_log_opts(q, with_fit_opts=True):
        q.add_argument("log", help="tap-log file")
        q.add_argument("--format", choices=["csv", "jsonl"], default="csv")
        if with_fit_opts:
            q.add_argument("--outlier", choices=["3sd", "iqr", "none"], default="3sd")
            q.add_argument("--aggregation", choices=["per-participant", "pooled"],
                           default="per-participant")
            q.add_argument("--variance-target", choices=["sigma2", "sigma"], default="sigma2")

    p = sub.add_parser("fit", help="fit regression constants from a tap log")
    add_log_opts(p)
    p.add_argument("--axis", choices=["x", "y", "both"], default="both")
    p.add_argument("--preset-name", default="fitted")
    p.add_argument("--residuals", help="write per-condition residual table CSV here")
    p.add_argument("-o", "--output", help="constants JSON output path (default stdout)")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("loocv", help="leave-one-condition-out cross validation")
    add_log_opts(p)
    p.add_argument("--axis", choices=["x", "y"], required=True)
    p.set_defaults(func=cmd_loocv)

    p = sub.add_parser("simulate", help="generate a synthetic tap log")
    p.add_argument("constants", help="constants JSON path or preset name")
    p.add_argument("design", help="design JSON path or design preset name")
    p.add_argument("--seed", type=int, default=None, help="override the design seed")
    p.add_argument("--format", choices=["csv", "jsonl"], default="csv")
    p.add_argument("-o", "--output", help="tap-log output path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("lrtest", help="normal vs. skew-normal likelihood-ratio test per condition")
    add_log_opts(p, with_fit_opts=False)
    p.add_argument("--axis", choices=["x", "y"], required=True)
    p.add_argument("-o", "--output", help="CSV output path (default stdout)")
    p.set_defaults(func=cmd_lrtest)

    p = sub.add_parser("convert", help="convert a tap log between CSV and JSONL")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--from", dest="from_format", choices=["csv", "jsonl"], required=True)
    p.add_argument("--to", dest="to_format", choices=["csv", "jsonl"], required=True)
    p.set_defaults(func=cmd_convert)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ParameterError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if isinstance(exc, (FitError, ModelDomainError)):
            return EXIT_COMPUTE
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
