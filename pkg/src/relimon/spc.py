"""Probability-based control limits and the mean value chart."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .failure_data import GroupedSeries
from .go_model import OrderedGoModel, mean_value, ordered_mean_value

__all__ = [
    "BELOW_LCL",
    "ABOVE_UCL",
    "IN_CONTROL",
    "ChartPoint",
    "ControlLimits",
    "DetectionReport",
    "MeanValueChart",
    "build_chart",
    "chart_to_csv",
    "chart_to_dict",
    "control_limits",
    "detect",
]

P_LOW = 0.00135
P_CENTER = 0.5
P_HIGH = 0.99865

BELOW_LCL = "below_lcl"
IN_CONTROL = "in_control"
ABOVE_UCL = "above_ucl"
OUT_OF_CONTROL = "out_of_control"
M_SCALES = ("base", "ordered")


def _time_at_probability(model: OrderedGoModel, p: float) -> float:
    # (1 - e^{-bt})^r = p
    return -math.log1p(-(p ** (1.0 / model.order_r))) / model.b


@dataclass(frozen=True)
class ControlLimits:
    t_low: float
    t_center: float
    t_high: float
    m_low: float
    m_center: float
    m_high: float
    p_low: float = P_LOW
    p_center: float = P_CENTER
    p_high: float = P_HIGH

    def __post_init__(self):
        if not (self.m_low < self.m_center < self.m_high):
            raise ValueError("control limits must satisfy m_low < m_center < m_high")
        if not (self.t_low < self.t_center < self.t_high):
            raise ValueError("limit times must satisfy t_low < t_center < t_high")

    @classmethod
    def from_levels(cls, model: OrderedGoModel, m_low: float, m_center: float, m_high: float) -> "ControlLimits":
        """Limits with externally supplied m-levels (e.g. published values).

        The limit times still come from the model's probability equation.
        """
        t = [_time_at_probability(model, p) for p in (P_LOW, P_CENTER, P_HIGH)]
        return cls(*t, m_low, m_center, m_high)

    def status(self, value: float) -> str:
        # values on a limit count as in control
        if value < self.m_low:
            return BELOW_LCL
        if value > self.m_high:
            return ABOVE_UCL
        return IN_CONTROL

    def to_dict(self) -> dict:
        return {
            "p_low": self.p_low,
            "p_center": self.p_center,
            "p_high": self.p_high,
            "t_low": self.t_low,
            "t_center": self.t_center,
            "t_high": self.t_high,
            "m_low": self.m_low,
            "m_center": self.m_center,
            "m_high": self.m_high,
        }


def control_limits(model: OrderedGoModel) -> ControlLimits:
    """LCL/CL/UCL where the ordered CDF shape (1 - e^{-bt})^r hits 0.00135, 0.5, 0.99865.

    On the m-scale each limit is a^r * p.
    """
    scale = model.scale
    t = [_time_at_probability(model, p) for p in (P_LOW, P_CENTER, P_HIGH)]
    return ControlLimits(*t, scale * P_LOW, scale * P_CENTER, scale * P_HIGH)


@dataclass(frozen=True)
class ChartPoint:
    index: int
    time: float
    m_value: float
    diff: float
    status: str


@dataclass(frozen=True)
class MeanValueChart:
    points: tuple[ChartPoint, ...]
    limits: ControlLimits
    model: OrderedGoModel
    m_scale: str = "base"

    @property
    def alarm_indices(self) -> list[int]:
        return [p.index for p in self.points if p.status == BELOW_LCL]

    @property
    def verdict(self) -> str:
        return OUT_OF_CONTROL if self.alarm_indices else IN_CONTROL


def build_chart(
    g: GroupedSeries,
    model: OrderedGoModel,
    limits: ControlLimits | None = None,
    m_scale: str = "base",
) -> MeanValueChart:
    """Successive differences of m at the grouped cumulative times.

    Point k (1-based, k = 1..n-1) sits at s_k with m(s_k) and
    diff = m(s_{k+1}) - m(s_k).  ``m_scale="base"`` uses a(1 - e^{-bt}),
    ``"ordered"`` uses [a(1 - e^{-bt})]^r.
    """
    if model.order_r != g.order_r:
        raise ValueError(f"model order {model.order_r} does not match data order {g.order_r}")
    if g.n_groups < 2:
        raise ValueError("chart needs at least 2 groups")
    if m_scale == "base":
        m = np.asarray(mean_value(model.params, g.s))
    elif m_scale == "ordered":
        m = np.asarray(ordered_mean_value(model, g.s))
    else:
        raise ValueError(f"m_scale must be one of {M_SCALES}, got {m_scale!r}")
    if limits is None:
        limits = control_limits(model)
    diffs = np.diff(m)
    points = tuple(
        ChartPoint(
            index=k + 1,
            time=g.cum_times[k],
            m_value=float(m[k]),
            diff=float(diffs[k]),
            status=limits.status(float(diffs[k])),
        )
        for k in range(g.n_groups - 1)
    )
    return MeanValueChart(points=points, limits=limits, model=model, m_scale=m_scale)


@dataclass(frozen=True)
class DetectionReport:
    verdict: str
    alarms: tuple[int, ...]
    above_ucl: tuple[int, ...]
    n_points: int

    @property
    def n_alarms(self) -> int:
        return len(self.alarms)

    @property
    def n_above_ucl(self) -> int:
        return len(self.above_ucl)

    @property
    def n_in_control(self) -> int:
        return self.n_points - self.n_alarms - self.n_above_ucl

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "alarms": list(self.alarms),
            "above_ucl": list(self.above_ucl),
            "counts": {
                "points": self.n_points,
                "below_lcl": self.n_alarms,
                "in_control": self.n_in_control,
                "above_ucl": self.n_above_ucl,
            },
        }


def detect(chart: MeanValueChart) -> DetectionReport:
    """Below-LCL points are alarms; above-UCL points signal better quality, not trouble."""
    alarms = tuple(p.index for p in chart.points if p.status == BELOW_LCL)
    above = tuple(p.index for p in chart.points if p.status == ABOVE_UCL)
    return DetectionReport(
        verdict=OUT_OF_CONTROL if alarms else IN_CONTROL,
        alarms=alarms,
        above_ucl=above,
        n_points=len(chart.points),
    )


def _format_time(t: float) -> str:
    return str(int(t)) if t.is_integer() else repr(t)


CSV_COLUMNS = ("index", "time", "m", "diff", "status")


def chart_to_csv(chart: MeanValueChart) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p in chart.points:
        writer.writerow([p.index, _format_time(p.time), f"{p.m_value:.9f}", f"{p.diff:.9f}", p.status])
    return buf.getvalue()


def chart_to_dict(chart: MeanValueChart) -> dict:
    return {
        "model": {"a": chart.model.a, "b": chart.model.b, "r": chart.model.order_r},
        "m_scale": chart.m_scale,
        "limits": chart.limits.to_dict(),
        "points": [
            {"index": p.index, "time": p.time, "m": p.m_value, "diff": p.diff, "status": p.status}
            for p in chart.points
        ],
        "verdict": chart.verdict,
        "alarms": chart.alarm_indices,
    }
