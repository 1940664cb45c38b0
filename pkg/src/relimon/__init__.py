"""Software reliability monitoring with an order-statistics Goel-Okumoto model."""

from .failure_data import (
    FailureSeries,
    GroupedSeries,
    ParseError,
    group_by_order,
    musa_fixture,
    parse_failure_data,
    serialize_failure_data,
)
from .go_model import GoParams, OrderedGoModel, intensity, mean_value, ordered_mean_value
from .mle import FitError, FitResult, SolverConfig, fit, fit_oracle
from .spc import ControlLimits, MeanValueChart, build_chart, control_limits, detect
from .simulate import SimConfig, simulate_nhpp

__version__ = "0.1.0"
