"""Goel-Okumoto mean value function and its order-r grouped form."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GoParams",
    "OrderedGoModel",
    "intensity",
    "mean_value",
    "mean_value_inverse",
    "one_minus_exp",
    "ordered_mean_value",
]


def one_minus_exp(x):
    """1 - exp(-x) without cancellation for small x."""
    return -np.expm1(-np.asarray(x, dtype=float))


@dataclass(frozen=True)
class GoParams:
    a: float
    b: float

    def __post_init__(self):
        for name in ("a", "b"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class OrderedGoModel:
    params: GoParams
    order_r: int = 1

    def __post_init__(self):
        if isinstance(self.order_r, bool) or int(self.order_r) != self.order_r or self.order_r < 1:
            raise ValueError(f"order must be a positive integer, got {self.order_r!r}")
        object.__setattr__(self, "order_r", int(self.order_r))

    @classmethod
    def from_ab(cls, a: float, b: float, r: int = 1) -> "OrderedGoModel":
        return cls(GoParams(a, b), r)

    @property
    def a(self) -> float:
        return self.params.a

    @property
    def b(self) -> float:
        return self.params.b

    @property
    def scale(self) -> float:
        """Asymptote a**r of the ordered mean value function."""
        return self.params.a ** self.order_r


def _check_time(t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)) or np.any(t < 0):
        raise ValueError("time must be finite and >= 0")
    return t


def _out(x: np.ndarray):
    return float(x) if x.ndim == 0 else x


def mean_value(params: GoParams, t):
    """Expected cumulative failures a(1 - exp(-b t)); accepts scalars or arrays."""
    t = _check_time(t)
    return _out(params.a * one_minus_exp(params.b * t))


def mean_value_inverse(params: GoParams, m):
    """Time at which ``mean_value`` reaches ``m``; requires 0 <= m < a."""
    m = np.asarray(m, dtype=float)
    if np.any(m < 0) or np.any(m >= params.a):
        raise ValueError(f"mean value must lie in [0, a={params.a}), got {m}")
    return _out(-np.log1p(-m / params.a) / params.b)


def ordered_mean_value(model: OrderedGoModel, t):
    """[a(1 - exp(-b t))]**r."""
    t = _check_time(t)
    base = model.a * one_minus_exp(model.b * t)
    return _out(base ** model.order_r)


def intensity(model: OrderedGoModel, t):
    """Time derivative of ``ordered_mean_value``: a^r r F^(r-1) b exp(-b t)."""
    t = _check_time(t)
    r = model.order_r
    bt = model.b * t
    return _out(model.scale * r * one_minus_exp(bt) ** (r - 1) * model.b * np.exp(-bt))
