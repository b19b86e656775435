"""Seeded sampling, Monte Carlo oracles, and synthetic experiments."""

import math

import numpy as np
import pytest
from scipy.special import erfinv

from edgetap.predictor import AxisGeometry, EdgeSide, ModelConstants
from edgetap.presets import load_design_preset, load_preset
from edgetap.simulation import (
    SimDesign,
    _rng,
    _sample_with_rng,
    load_design,
    mc_axis_sr,
    sample_skewnormal,
    save_design,
    synth_experiment,
)
from edgetap.skewnormal import SkewNormalParams, skewnormal_to_moments

from conftest import exp1_x_constants


class TestSampler:
    def test_determinism(self):
        p = SkewNormalParams(0.5, 1.2, 3.0)
        a = sample_skewnormal(p, 1000, 42)
        b = sample_skewnormal(p, 1000, 42)
        assert np.array_equal(a, b)

    def test_seed_sensitivity(self):
        p = SkewNormalParams(0.5, 1.2, 3.0)
        assert not np.array_equal(sample_skewnormal(p, 100, 1),
                                  sample_skewnormal(p, 100, 2))

    def test_alpha_zero_normal_moments(self):
        n = 1_000_000
        xs = sample_skewnormal(SkewNormalParams(2.0, 1.5, 0.0), n, 9)
        assert abs(np.mean(xs) - 2.0) < 4.0 * 1.5 / math.sqrt(n)
        assert abs(np.std(xs) - 1.5) < 4.0 * 1.5 / math.sqrt(n)

    def test_skewness_matches_closed_form(self):
        p = SkewNormalParams(0.0, 1.0, 5.0)
        xs = sample_skewnormal(p, 1_000_000, 5)
        centered = xs - np.mean(xs)
        g1 = np.mean(centered**3) / np.mean(centered**2) ** 1.5
        assert abs(g1 - skewnormal_to_moments(p).gamma1) < 0.01
        assert abs(skewnormal_to_moments(p).gamma1 - 0.8510) < 1e-4

    def test_invalid_n(self):
        with pytest.raises(ValueError):
            sample_skewnormal(SkewNormalParams(0.0, 1.0, 0.0), 0, 1)


class TestMcOracle:
    def test_huge_target(self):
        est, se = mc_axis_sr(SkewNormalParams(0.0, 1.0, 2.0), 100.0, 10_000, 3)
        assert est == 1.0 and se == 0.0

    def test_half_probability_interval(self):
        # alpha = 0: mass on [-size/2, size/2] is erf(size / (2 sqrt2)) = 0.5
        size = 2.0 * math.sqrt(2.0) * float(erfinv(0.5))
        n = 1_000_000
        est, se = mc_axis_sr(SkewNormalParams(0.0, 1.0, 0.0), size, n, 17)
        assert abs(est - 0.5) <= 3.0 * se

    def test_standard_error_formula(self):
        est, se = mc_axis_sr(SkewNormalParams(0.0, 1.0, 4.0), 1.5, 100_000, 23)
        assert se == pytest.approx(math.sqrt(est * (1.0 - est) / 100_000))

    def test_invalid_size(self):
        with pytest.raises(ValueError):
            mc_axis_sr(SkewNormalParams(0.0, 1.0, 0.0), 0.0, 100, 1)


class TestSynthExperiment:
    def one_condition_design(self, reps=1, participants=1, seed=0):
        return SimDesign(margins_x=(0.0,), sizes_x=(3.119,),
                         margins_y=(20.0,), sizes_y=(15.596,),
                         edge_x=EdgeSide.NEGATIVE, edge_y=EdgeSide.NONE,
                         repetitions=reps, participants=participants, seed=seed)

    def exp1_like_constants(self):
        return ModelConstants(x=exp1_x_constants(),
                              y=exp1_x_constants(c=0.0, d=0.0))

    def test_single_trial(self):
        trials = synth_experiment(self.exp1_like_constants(),
                                  self.one_condition_design())
        assert len(trials) == 1
        assert trials[0].participant == "p01"
        assert trials[0].repetition == 1

    def test_row_count(self):
        design = SimDesign(margins_x=(0.0, 1.56), sizes_x=(1.56, 3.119, 7.798),
                           margins_y=(20.0,), sizes_y=(15.596,),
                           edge_x=EdgeSide.NEGATIVE, edge_y=EdgeSide.NONE,
                           repetitions=4, participants=5, seed=1)
        trials = synth_experiment(self.exp1_like_constants(), design)
        assert len(trials) == 2 * 3 * 1 * 1 * 4 * 5

    def test_determinism(self):
        k = self.exp1_like_constants()
        d = self.one_condition_design(reps=10, participants=3, seed=7)
        assert synth_experiment(k, d) == synth_experiment(k, d)

    def test_far_condition_skewness_vanishes(self):
        k = self.exp1_like_constants()
        design = SimDesign(margins_x=(15.0,), sizes_x=(3.119,),
                           margins_y=(20.0,), sizes_y=(15.596,),
                           edge_x=EdgeSide.NEGATIVE, edge_y=EdgeSide.NONE,
                           repetitions=50_000, participants=1, seed=13)
        xs = np.array([t.tap_x for t in synth_experiment(k, design)])
        centered = xs - xs.mean()
        g1 = np.mean(centered**3) / np.mean(centered**2) ** 1.5
        assert abs(g1) < 0.05

    def test_2d_independence(self):
        # same per-condition substream the generator uses
        from edgetap.predictor import predict_moments
        from edgetap.skewnormal import moments_to_skewnormal
        k = self.exp1_like_constants()
        px = moments_to_skewnormal(predict_moments(
            AxisGeometry(3.119, 0.0, EdgeSide.NEGATIVE), k.x))
        py = moments_to_skewnormal(predict_moments(
            AxisGeometry(15.596, 20.0, EdgeSide.NONE), k.y))
        rng = _rng(42, 0, 0)
        n = 1_000_000
        xs = _sample_with_rng(px, n, rng)
        ys = _sample_with_rng(py, n, rng)
        corr = float(np.corrcoef(xs, ys)[0, 1])
        assert abs(corr) < 0.003

    def test_substream_order_independence(self):
        # participant substreams are keyed, not sequential
        k = self.exp1_like_constants()
        d = self.one_condition_design(reps=5, participants=4, seed=3)
        trials = synth_experiment(k, d)
        by_pid = {}
        for t in trials:
            by_pid.setdefault(t.participant, []).append(t.tap_x)
        d1 = SimDesign(margins_x=(0.0,), sizes_x=(3.119,),
                       margins_y=(20.0,), sizes_y=(15.596,),
                       edge_x=EdgeSide.NEGATIVE, edge_y=EdgeSide.NONE,
                       repetitions=5, participants=2, seed=3)
        trials2 = synth_experiment(k, d1)
        for t in trials2:
            assert t.tap_x in by_pid[t.participant]


class TestDesignIo:
    def test_round_trip(self, tmp_path):
        design = SimDesign(margins_x=(0.0, 1.0), sizes_x=(2.0,),
                           margins_y=(3.0,), sizes_y=(4.0, 5.0),
                           edge_x=EdgeSide.POSITIVE, edge_y=EdgeSide.NEGATIVE,
                           repetitions=6, participants=7, seed=8)
        path = tmp_path / "design.json"
        save_design(design, path)
        assert load_design(path) == design

    def test_preset_grids(self):
        d1 = load_design_preset("exp1")
        assert len(d1.margins_x) == 9 and len(d1.sizes_x) == 5
        assert d1.repetitions == 24 and d1.participants == 15
        assert d1.edge_x is EdgeSide.NEGATIVE
        d3 = load_design_preset("exp3")
        assert d3.edge_x is EdgeSide.POSITIVE and d3.edge_y is EdgeSide.NEGATIVE
        assert len(d3.conditions()) == 5 * 3 * 5 * 3

    def test_invalid_design(self):
        with pytest.raises(ValueError):
            SimDesign(margins_x=(), sizes_x=(1.0,), margins_y=(1.0,),
                      sizes_y=(1.0,), edge_x=EdgeSide.NONE, edge_y=EdgeSide.NONE,
                      repetitions=1, participants=1, seed=0)


class TestPresets:
    def test_constants_presets_load(self):
        for name in ("exp1", "exp2", "exp3"):
            k = load_preset(name)
            assert k.x.baseline is not None and k.y.baseline is not None

    def test_exp1_threshold(self):
        k = load_preset("exp1")
        assert k.x.threshold == pytest.approx(1.09 / 0.17)

    def test_transposed_baseline_applied(self):
        # stored verbatim as (1.50, 0.0236) with the transposed flag;
        # loaded as slope 0.0236, intercept 1.50
        k = load_preset("exp1")
        assert k.x.baseline.a == pytest.approx(0.0236)
        assert k.x.baseline.b == pytest.approx(1.5)

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            load_preset("exp9")
