"""Tap-log parsing, outlier filtering, aggregation, and constants JSON."""

import io
import json
import math

import numpy as np
import pytest

from edgetap.predictor import (
    AxisGeometry,
    BaselineConstants,
    EdgeSide,
    ModelConstants,
    TargetLayout,
    VarianceTarget,
)
from edgetap.taplog import (
    AggregationMode,
    LogFormat,
    ParseError,
    TapTrial,
    aggregate,
    constants_from_dict,
    constants_to_dict,
    filter_outliers_3sd,
    filter_outliers_iqr,
    layout_key,
    parse_tap_log,
    write_tap_log,
)

from conftest import exp1_x_constants

HEADER = ("participant,size_x_mm,size_y_mm,margin_x_mm,margin_y_mm,"
          "edge_x,edge_y,tap_x_mm,tap_y_mm,repetition\n")

LAYOUT = TargetLayout(
    axis_x=AxisGeometry(3.119, 0.0, EdgeSide.NEGATIVE),
    axis_y=AxisGeometry(15.596, 0.0, EdgeSide.NONE),
)


def trial(p, x, y, rep=1, layout=LAYOUT):
    return TapTrial(participant=p, layout=layout, tap_x=x, tap_y=y, repetition=rep)


class TestParse:
    def test_empty_with_header(self):
        assert parse_tap_log(io.StringIO(HEADER)) == []

    def test_single_row(self):
        text = HEADER + "p01,3.119,15.596,0,0,neg,none,0.41,-0.22,1\n"
        trials = parse_tap_log(io.StringIO(text))
        assert len(trials) == 1
        t = trials[0]
        assert t.participant == "p01"
        assert t.layout == LAYOUT
        assert (t.tap_x, t.tap_y, t.repetition) == (0.41, -0.22, 1)

    def test_positioned_error(self):
        rows = [f"p01,3.119,15.596,0,0,neg,none,0.{i},0,1" for i in range(10)]
        rows[5] = "p01,3.119,15.596,0,0,neg,none,oops,0,1"  # line 7 of the file
        with pytest.raises(ParseError) as exc:
            parse_tap_log(io.StringIO(HEADER + "\n".join(rows)))
        assert exc.value.line == 7
        assert exc.value.field == "tap_x_mm"

    def test_missing_column(self):
        with pytest.raises(ParseError) as exc:
            parse_tap_log(io.StringIO("participant,tap_x_mm\np01,0.1\n"))
        assert exc.value.line == 1

    def test_bad_edge_value(self):
        text = HEADER + "p01,3.119,15.596,0,0,left,none,0.41,-0.22,1\n"
        with pytest.raises(ParseError) as exc:
            parse_tap_log(io.StringIO(text))
        assert exc.value.field == "edge_x"

    def test_jsonl(self):
        rec = {"participant": "p02", "size_x_mm": 1.56, "size_y_mm": 2.0,
               "margin_x_mm": 0.5, "margin_y_mm": 0.0, "edge_x": "pos",
               "edge_y": "none", "tap_x_mm": -0.3, "tap_y_mm": 0.7,
               "repetition": 4}
        trials = parse_tap_log(io.StringIO(json.dumps(rec) + "\n"),
                               LogFormat.JSONL)
        assert len(trials) == 1
        assert trials[0].layout.axis_x.edge_side is EdgeSide.POSITIVE

    def test_jsonl_bad_line(self):
        with pytest.raises(ParseError) as exc:
            parse_tap_log(io.StringIO("{}\n{bad\n"), LogFormat.JSONL)
        # first line fails before the malformed second one
        assert exc.value.line == 1

    def test_round_trip_csv(self):
        trials = [trial("p01", 0.123456789012345, -1.5, 1),
                  trial("p02", 2.0, 3.0, 2)]
        buf = io.StringIO()
        write_tap_log(trials, buf)
        assert parse_tap_log(io.StringIO(buf.getvalue())) == trials

    def test_round_trip_jsonl(self):
        trials = [trial("p01", 0.1, -0.2, 1), trial("p02", 1e-17, 5.5, 9)]
        buf = io.StringIO()
        write_tap_log(trials, buf, LogFormat.JSONL)
        assert parse_tap_log(io.StringIO(buf.getvalue()), LogFormat.JSONL) == trials


class TestFilter3sd:
    def test_identical_coordinates_kept(self):
        trials = [trial("p01", 0.5, 0.5, i) for i in range(10)]
        kept, removed, warnings = filter_outliers_3sd(trials)
        assert kept == trials and removed == [] and warnings == []

    def test_single_far_point_removed(self):
        rng = np.random.default_rng(3)
        xs = rng.normal(0.0, 0.1, 100)
        trials = [trial("p01", float(x), 0.0, i) for i, x in enumerate(xs)]
        outlier = trial("p01", float(np.mean(xs) + 10 * np.std(xs, ddof=1)), 0.0, 100)
        trials.append(outlier)
        kept, removed, _ = filter_outliers_3sd(trials)
        assert removed == [outlier]
        assert len(kept) == 100

    def test_y_axis_trips_whole_trial(self):
        trials = [trial("p01", 0.0, float(v), i)
                  for i, v in enumerate([0.1, -0.1, 0.05, -0.05, 0.0] * 20)]
        bad = trial("p01", 0.0, 50.0, 999)
        kept, removed, _ = filter_outliers_3sd(trials + [bad])
        assert removed == [bad]

    def test_small_group_warned(self):
        lone = [trial("p01", 0.1, 0.2, 1)]
        kept, removed, warnings = filter_outliers_3sd(lone)
        assert kept == lone and removed == []
        assert len(warnings) == 1 and "n=1" in warnings[0].message

    def test_partition_order_stable(self):
        rng = np.random.default_rng(11)
        trials = [trial(f"p{i % 3}", float(v), 0.0, i)
                  for i, v in enumerate(rng.normal(0, 1, 60))]
        trials.append(trial("p0", 40.0, 0.0, 99))
        kept, removed, _ = filter_outliers_3sd(trials)
        assert len(kept) + len(removed) == len(trials)
        merged_ids = {id(t) for t in kept} | {id(t) for t in removed}
        assert merged_ids == {id(t) for t in trials}
        # kept preserves input order
        pos = {id(t): i for i, t in enumerate(trials)}
        assert [pos[id(t)] for t in kept] == sorted(pos[id(t)] for t in kept)

    def test_hand_computed_fence(self):
        vals = [0.0, 1.0, 2.0, 3.0, 4.0, 20.0]
        trials = [trial("p01", v, 0.0, i) for i, v in enumerate(vals)]
        m, sd = np.mean(vals), np.std(vals, ddof=1)
        kept, removed, _ = filter_outliers_3sd(trials)
        expect_removed = [t for t in trials if abs(t.tap_x - m) > 3 * sd]
        assert removed == expect_removed


class TestFilterIqr:
    def test_all_inside(self):
        trials = [trial("p01", float(v), 0.0, i)
                  for i, v in enumerate(np.linspace(-1, 1, 21))]
        kept, removed, _ = filter_outliers_iqr(trials)
        assert removed == []

    def test_point_beyond_fence_removed(self):
        vals = list(np.linspace(0.0, 1.0, 40))
        q1, q3 = np.percentile(vals, [25, 75])
        iqr = q3 - q1
        far = float(q3 + 4.0 * iqr)
        trials = [trial("p01", float(v), 0.0, i) for i, v in enumerate(vals)]
        bad = trial("p01", far, 0.0, 99)
        kept, removed, _ = filter_outliers_iqr(trials + [bad])
        assert removed == [bad]

    def test_zero_iqr_keeps_identical(self):
        trials = [trial("p01", 1.5, 0.0, i) for i in range(10)]
        kept, removed, _ = filter_outliers_iqr(trials)
        assert removed == []


class TestAggregate:
    def test_pooled_symmetric_pair(self):
        big = TargetLayout(axis_x=AxisGeometry(10.0, 0.0, EdgeSide.NONE),
                           axis_y=AxisGeometry(10.0, 0.0, EdgeSide.NONE))
        trials = [trial("p01", -1.0, -0.5, 1, big), trial("p01", 1.0, 0.5, 2, big)]
        aggs, _ = aggregate(trials, AggregationMode.POOLED)
        assert len(aggs) == 1
        a = aggs[0]
        assert a.moments_x.mu == 0.0
        assert a.moments_x.sigma2 == pytest.approx(2.0)  # n-1 denominator
        assert a.observed_sr == 1.0

    def test_pooled_skewness_fixture(self):
        # {0,0,0,1}: m2 = 0.1875, m3 = 0.09375, b1 = m3/m2^1.5 = 1.1547...
        big = TargetLayout(axis_x=AxisGeometry(10.0, 0.0, EdgeSide.NONE),
                           axis_y=AxisGeometry(10.0, 0.0, EdgeSide.NONE))
        trials = [trial("p01", v, v - 0.5, i, big)
                  for i, v in enumerate([0.0, 0.0, 0.0, 1.0])]
        aggs, _ = aggregate(trials, AggregationMode.POOLED)
        b1 = 0.09375 / 0.1875 ** 1.5
        assert aggs[0].moments_x.gamma1 == pytest.approx(b1, abs=1e-12)
        assert b1 == pytest.approx(2.0 / math.sqrt(3.0))

    def test_observed_sr_fractions(self):
        lay = TargetLayout(axis_x=AxisGeometry(2.0, 0.0, EdgeSide.NONE),
                           axis_y=AxisGeometry(2.0, 0.0, EdgeSide.NONE))
        trials = [trial("p01", 0.0, 0.0, 1, lay),    # hit both
                  trial("p01", 1.5, 0.0, 2, lay),    # miss x
                  trial("p01", 0.0, 1.5, 3, lay),    # miss y
                  trial("p01", 1.5, 1.5, 4, lay)]    # miss both
        aggs, _ = aggregate(trials, AggregationMode.POOLED)
        a = aggs[0]
        assert a.observed_sr_x == 0.5 and a.observed_sr_y == 0.5
        assert a.observed_sr == 0.25
        assert a.observed_sr <= min(a.observed_sr_x, a.observed_sr_y)

    def test_per_participant_averages(self):
        lay = TargetLayout(axis_x=AxisGeometry(4.0, 0.0, EdgeSide.NONE),
                           axis_y=AxisGeometry(4.0, 0.0, EdgeSide.NONE))
        t1 = [trial("p01", v, v / 10.0, i, lay) for i, v in enumerate([0.0, 1.0, 2.0])]
        t2 = [trial("p02", v, v / 10.0, i, lay) for i, v in enumerate([1.0, 3.0, 5.0])]
        aggs, _ = aggregate(t1 + t2, AggregationMode.PER_PARTICIPANT)
        a = aggs[0]
        assert a.moments_x.mu == pytest.approx((1.0 + 3.0) / 2.0)
        assert a.moments_x.sigma2 == pytest.approx((1.0 + 4.0) / 2.0)
        # p01 hits 3/3 inside [-2,2]; p02 hits 1/3
        assert a.observed_sr_x == pytest.approx((1.0 + 1.0 / 3.0) / 2.0)

    def test_per_participant_minimum(self):
        lay = TargetLayout(axis_x=AxisGeometry(4.0, 0.0, EdgeSide.NONE),
                           axis_y=AxisGeometry(4.0, 0.0, EdgeSide.NONE))
        good = [trial("p01", v, v / 10.0, i, lay) for i, v in enumerate([0.0, 1.0, 2.0])]
        thin = [trial("p02", 9.0, 9.0, 1, lay)]
        aggs, warnings = aggregate(good + thin, AggregationMode.PER_PARTICIPANT)
        assert len(aggs) == 1
        assert any(w.participant == "p02" for w in warnings)
        assert aggs[0].moments_x.mu == pytest.approx(1.0)

    def test_pooled_shard_invariance(self):
        rng = np.random.default_rng(8)
        lay = TargetLayout(axis_x=AxisGeometry(3.0, 1.0, EdgeSide.NEGATIVE),
                           axis_y=AxisGeometry(3.0, 1.0, EdgeSide.NONE))
        all_trials = [trial(f"p{i % 4}", float(rng.normal()), float(rng.normal()), i, lay)
                      for i in range(80)]
        whole, _ = aggregate(all_trials, AggregationMode.POOLED)
        shards, _ = aggregate(all_trials[:37] + all_trials[37:], AggregationMode.POOLED)
        assert whole == shards

    def test_adjusted_skewness_flag(self):
        big = TargetLayout(axis_x=AxisGeometry(10.0, 0.0, EdgeSide.NONE),
                           axis_y=AxisGeometry(10.0, 0.0, EdgeSide.NONE))
        trials = [trial("p01", v, v - 0.5, i, big)
                  for i, v in enumerate([0.0, 0.0, 0.0, 1.0])]
        plain, _ = aggregate(trials, AggregationMode.POOLED)
        adj, _ = aggregate(trials, AggregationMode.POOLED, adjusted_skewness=True)
        n = 4
        factor = math.sqrt(n * (n - 1)) / (n - 2)
        assert adj[0].moments_x.gamma1 == pytest.approx(
            plain[0].moments_x.gamma1 * factor)

    def test_sorted_by_layout_key(self):
        lay_a = TargetLayout(axis_x=AxisGeometry(1.0, 0.0, EdgeSide.NEGATIVE),
                             axis_y=AxisGeometry(1.0, 0.0, EdgeSide.NONE))
        lay_b = TargetLayout(axis_x=AxisGeometry(2.0, 0.0, EdgeSide.NEGATIVE),
                             axis_y=AxisGeometry(1.0, 0.0, EdgeSide.NONE))
        trials = ([trial("p01", v, 0.0, i, lay_b) for i, v in enumerate([0.0, 0.1, 0.2])]
                  + [trial("p01", v, 0.0, i, lay_a) for i, v in enumerate([0.0, 0.1, 0.2])])
        aggs, _ = aggregate(trials, AggregationMode.POOLED)
        keys = [layout_key(a.layout) for a in aggs]
        assert keys == sorted(keys)


class TestConstantsJson:
    def test_round_trip(self):
        k = ModelConstants(
            x=exp1_x_constants(baseline=BaselineConstants(a=0.0236, b=1.5)),
            y=exp1_x_constants(variance_target=VarianceTarget.SIGMA),
        )
        d = constants_to_dict(k, preset_name="t", source="s")
        back = constants_from_dict(d)
        assert back == k
        assert d["preset_name"] == "t" and d["source"] == "s"

    def test_transposed_baseline_swapped_on_load(self):
        d = constants_to_dict(ModelConstants(x=exp1_x_constants(),
                                             y=exp1_x_constants()))
        d["x"]["baseline"] = {"a": 1.5, "b": 0.0236, "transposed": True}
        d["y"]["baseline"] = {"a": 1.5, "b": 0.0236}
        back = constants_from_dict(d)
        assert back.x.baseline == BaselineConstants(a=0.0236, b=1.5)
        assert back.y.baseline == BaselineConstants(a=1.5, b=0.0236)

    def test_missing_key_raises(self):
        d = constants_to_dict(ModelConstants(x=exp1_x_constants(),
                                             y=exp1_x_constants()))
        del d["x"]["c"]
        with pytest.raises(KeyError):
            constants_from_dict(d)
