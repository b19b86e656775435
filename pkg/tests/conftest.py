import numpy as np
import pytest

from edgetap.estimation import Axis
from edgetap.predictor import (
    AxisConstants,
    AxisGeometry,
    EdgeSide,
    TargetLayout,
    predict_axis_sr,
    predict_moments,
)
from edgetap.taplog import ConditionAggregate
from edgetap.skewnormal import MomentParams

EXP1_MARGINS = (0.0, 1.56, 3.119, 4.679, 7.798, 9.358, 12.477, 15.596, 18.715)
EXP1_SIZES = (1.56, 2.339, 3.119, 4.679, 7.798)


def exp1_x_constants(**overrides) -> AxisConstants:
    base = dict(c=1.09, d=-0.17, e=0.155, f=0.0461, g=0.466,
                h=1.6, i=0.0205, j=-0.393, k=0.108, l=3.73)
    base.update(overrides)
    return AxisConstants(**base)


def noiseless_aggs(kx: AxisConstants, margins=EXP1_MARGINS, sizes=EXP1_SIZES,
                   edge=EdgeSide.NEGATIVE) -> list[ConditionAggregate]:
    """Condition aggregates whose x-axis observations equal the model's
    own predictions exactly (for identifiability and fixed-point tests)."""
    aggs = []
    dummy_y = AxisGeometry(15.596, 20.0, EdgeSide.NONE)
    for margin in margins:
        for size in sizes:
            geom = AxisGeometry(size, margin, edge)
            layout = TargetLayout(axis_x=geom, axis_y=dummy_y)
            m = predict_moments(geom, kx)
            sr = predict_axis_sr(geom, kx)
            aggs.append(ConditionAggregate(
                layout=layout, n=1000,
                moments_x=m,
                moments_y=MomentParams(0.0, 1.0, 0.0),
                observed_sr=sr, observed_sr_x=sr, observed_sr_y=1.0,
            ))
    return aggs
