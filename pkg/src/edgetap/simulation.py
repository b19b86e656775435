"""Seeded skew-normal sampling and synthetic experiment generation.

Sampling uses the delta representation X = xi + omega (delta |U0| +
sqrt(1 - delta^2) U1). Substreams are derived from (seed, condition index,
participant index) so that per-condition generation is order independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .predictor import (
    AxisConstants,
    AxisGeometry,
    EdgeSide,
    ModelConstants,
    TargetLayout,
    predict_moments,
)
from .skewnormal import SkewNormalParams, moments_to_skewnormal
from .taplog import TapTrial

__all__ = [
    "SimDesign",
    "sample_skewnormal",
    "mc_axis_sr",
    "synth_experiment",
    "load_design",
    "save_design",
]


@dataclass(frozen=True)
class SimDesign:
    """Factorial grid of target conditions plus sampling counts."""

    margins_x: tuple
    sizes_x: tuple
    margins_y: tuple
    sizes_y: tuple
    edge_x: EdgeSide
    edge_y: EdgeSide
    repetitions: int
    participants: int
    seed: int

    def __post_init__(self) -> None:
        for name in ("margins_x", "sizes_x", "margins_y", "sizes_y"):
            if len(getattr(self, name)) == 0:
                raise ValueError(f"{name} must be nonempty")
        if self.repetitions < 1 or self.participants < 1:
            raise ValueError("repetitions and participants must be positive")

    def conditions(self) -> list[TargetLayout]:
        layouts = []
        for mx in self.margins_x:
            for sx in self.sizes_x:
                for my in self.margins_y:
                    for sy in self.sizes_y:
                        layouts.append(TargetLayout(
                            axis_x=AxisGeometry(sx, mx, self.edge_x),
                            axis_y=AxisGeometry(sy, my, self.edge_y),
                        ))
        return layouts


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=tuple(stream)))


def _sample_with_rng(p: SkewNormalParams, n: int, rng: np.random.Generator) -> np.ndarray:
    delta = p.delta
    u0 = rng.standard_normal(n)
    u1 = rng.standard_normal(n)
    return p.xi + p.omega * (delta * np.abs(u0) + math.sqrt(1.0 - delta * delta) * u1)


def sample_skewnormal(p: SkewNormalParams, n: int, seed: int) -> np.ndarray:
    """Draw n skew-normal variates, deterministic per seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return _sample_with_rng(p, n, _rng(seed))


def mc_axis_sr(p: SkewNormalParams, size: float, n: int, seed: int) -> tuple[float, float]:
    """Monte Carlo estimate of the probability mass on [-size/2, size/2].

    Returns (estimate, standard error). This is the independent oracle for
    the closed-form axis success rate.
    """
    if size <= 0.0:
        raise ValueError("size must be positive")
    rng = _rng(seed)
    half = 0.5 * size
    hits = 0
    remaining = n
    chunk = 2_000_000
    while remaining > 0:
        m = min(chunk, remaining)
        xs = _sample_with_rng(p, m, rng)
        hits += int(np.count_nonzero(np.abs(xs) <= half))
        remaining -= m
    est = hits / n
    se = math.sqrt(est * (1.0 - est) / n)
    return est, se


def synth_experiment(k: ModelConstants, design: SimDesign) -> list[TapTrial]:
    """Generate tap trials from the model's per-condition distributions.

    All participants share the generating constants; each (condition,
    participant) pair gets its own deterministic substream.
    """
    trials: list[TapTrial] = []
    for cond_idx, layout in enumerate(design.conditions()):
        px = moments_to_skewnormal(predict_moments(layout.axis_x, k.x))
        py = moments_to_skewnormal(predict_moments(layout.axis_y, k.y))
        for part_idx in range(design.participants):
            rng = _rng(design.seed, cond_idx, part_idx)
            xs = _sample_with_rng(px, design.repetitions, rng)
            ys = _sample_with_rng(py, design.repetitions, rng)
            pid = f"p{part_idx + 1:02d}"
            for rep in range(design.repetitions):
                trials.append(TapTrial(
                    participant=pid, layout=layout,
                    tap_x=float(xs[rep]), tap_y=float(ys[rep]),
                    repetition=rep + 1,
                ))
    return trials


def load_design(path) -> SimDesign:
    with open(path, encoding="utf-8") as fh:
        d = json.load(fh)
    return SimDesign(
        margins_x=tuple(d["margins_x"]), sizes_x=tuple(d["sizes_x"]),
        margins_y=tuple(d["margins_y"]), sizes_y=tuple(d["sizes_y"]),
        edge_x=EdgeSide(d["edge_x"]), edge_y=EdgeSide(d["edge_y"]),
        repetitions=int(d["repetitions"]), participants=int(d["participants"]),
        seed=int(d["seed"]),
    )


def save_design(design: SimDesign, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({
            "margins_x": list(design.margins_x), "sizes_x": list(design.sizes_x),
            "margins_y": list(design.margins_y), "sizes_y": list(design.sizes_y),
            "edge_x": design.edge_x.value, "edge_y": design.edge_y.value,
            "repetitions": design.repetitions, "participants": design.participants,
            "seed": design.seed,
        }, fh, indent=2, sort_keys=True)
        fh.write("\n")
