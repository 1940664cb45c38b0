"""Inter-failure time series: parsing, serialization and order-r grouping."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "FailureSeries",
    "GroupedSeries",
    "ParseError",
    "group_by_order",
    "musa_fixture",
    "parse_failure_data",
    "serialize_failure_data",
]

FORMATS = ("plain", "csv")
CSV_HEADER = ("fault", "time")


class ParseError(ValueError):
    """Malformed failure data; ``line`` is 1-based, or None for whole-input errors."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class FailureSeries:
    deltas: tuple[float, ...]
    source_label: str = field(default="", compare=False)

    def __post_init__(self):
        deltas = tuple(float(x) for x in self.deltas)
        if not deltas:
            raise ValueError("no observations")
        for i, x in enumerate(deltas):
            if not math.isfinite(x) or x < 0:
                raise ValueError(f"observation {i + 1} is not a finite non-negative time: {x!r}")
        object.__setattr__(self, "deltas", deltas)

    def __len__(self) -> int:
        return len(self.deltas)

    @property
    def total(self) -> float:
        return math.fsum(self.deltas)


@dataclass(frozen=True)
class GroupedSeries:
    """Cumulative times 0 < s_1 <= ... <= s_n at every ``order_r``-th failure.

    Ties can only come from subgroups whose inter-failure times are all zero.
    """

    order_r: int
    cum_times: tuple[float, ...]
    dropped_tail: int = 0

    def __post_init__(self):
        if self.order_r < 1:
            raise ValueError(f"order must be >= 1, got {self.order_r}")
        cum = tuple(float(x) for x in self.cum_times)
        if not cum:
            raise ValueError("grouped series is empty")
        if not cum[0] > 0:
            raise ValueError(f"first cumulative time must be > 0, got {cum[0]!r}")
        prev = 0.0
        for k, s in enumerate(cum):
            if not math.isfinite(s) or s < prev:
                raise ValueError(
                    f"cumulative times must be finite and non-decreasing; "
                    f"group {k + 1} has s={s!r} after {prev!r}"
                )
            prev = s
        object.__setattr__(self, "cum_times", cum)

    @property
    def n_groups(self) -> int:
        return len(self.cum_times)

    @cached_property
    def s(self) -> np.ndarray:
        arr = np.array(self.cum_times, dtype=float)
        arr.flags.writeable = False
        return arr

    @property
    def s_n(self) -> float:
        return self.cum_times[-1]


def group_by_order(series: FailureSeries, r: int) -> GroupedSeries:
    """Sum inter-failure times in disjoint successive subgroups of size ``r``.

    The trailing ``len(series) % r`` observations do not form a full subgroup
    and are dropped.  ``cum_times[k]`` is the correctly rounded sum of the
    first ``(k + 1) * r`` deltas.
    """
    if not isinstance(r, (int, np.integer)) or isinstance(r, bool) or r < 1:
        raise ValueError(f"order must be a positive integer, got {r!r}")
    r = int(r)
    n_groups, tail = divmod(len(series), r)
    if n_groups < 2:
        raise ValueError(
            f"need at least 2 complete groups of size {r}; series has {len(series)} observations"
        )
    cum = []
    total = Fraction(0)
    for k in range(n_groups):
        group = series.deltas[k * r:(k + 1) * r]
        total += sum(Fraction(x) for x in group)
        cum.append(float(total))
    if cum[0] == 0:
        raise ValueError("first subgroup has zero total time")
    return GroupedSeries(order_r=r, cum_times=tuple(cum), dropped_tail=tail)


def _parse_value(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value: {token!r}", line)
    if value < 0:
        raise ParseError(f"negative inter-failure time: {token!r}", line)
    return value


def _parse_plain(text: str) -> list[float]:
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            values.append(_parse_value(body, lineno))
    return values


def _parse_csv(text: str) -> list[float]:
    values = []
    header_seen = False
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        cells = [c.strip() for c in row]
        if not any(cells):
            continue
        if not header_seen:
            if tuple(c.lower() for c in cells) != CSV_HEADER:
                raise ParseError(f"expected header 'fault,time', got {','.join(cells)!r}", lineno)
            header_seen = True
            continue
        if len(cells) != 2:
            raise ParseError(f"expected 2 columns, got {len(cells)}", lineno)
        values.append(_parse_value(cells[1], lineno))
    return values


def parse_failure_data(text: str, format: str = "plain", source_label: str = "") -> FailureSeries:
    """Parse inter-failure times from ``plain`` (one per line, ``#`` comments) or ``csv`` text."""
    if format == "plain":
        values = _parse_plain(text)
    elif format == "csv":
        values = _parse_csv(text)
    else:
        raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")
    if not values:
        raise ParseError("no observations")
    return FailureSeries(tuple(values), source_label=source_label)


def _format_number(x: float) -> str:
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def serialize_failure_data(series: FailureSeries, format: str = "plain") -> str:
    if format == "plain":
        return "".join(f"{_format_number(x)}\n" for x in series.deltas)
    if format == "csv":
        rows = [",".join(CSV_HEADER)]
        rows += [f"{i},{_format_number(x)}" for i, x in enumerate(series.deltas, start=1)]
        return "\n".join(rows) + "\n"
    raise ValueError(f"unknown format {format!r}; expected one of {FORMATS}")


# Musa (1975) inter-failure times, faults 1..136 in order.
_MUSA_1975 = (
    3, 30, 113, 81, 115, 9, 2, 91, 112, 15, 138, 50, 77, 24, 108, 88, 670,
    120, 26, 114, 325, 55, 242, 68, 422, 180, 10, 1146, 600, 15, 36, 4, 0, 8,
    227, 65, 176, 58, 457, 300, 97, 263, 452, 255, 197, 193, 6, 79, 816, 1351, 148,
    21, 233, 134, 357, 193, 236, 31, 369, 748, 0, 232, 330, 365, 1222, 543, 10, 16,
    529, 379, 44, 129, 810, 290, 300, 529, 281, 160, 828, 1011, 445, 296, 1755, 1064, 1783,
    860, 983, 707, 33, 868, 724, 2323, 2930, 1461, 843, 12, 261, 1800, 865, 1435, 30, 143,
    108, 0, 3110, 1247, 943, 700, 875, 245, 729, 1897, 447, 386, 446, 122, 990, 948, 1082,
    22, 75, 482, 5509, 100, 10, 1071, 371, 790, 6150, 3321, 1045, 648, 5485, 1160, 1864, 4116,
)


def musa_fixture() -> FailureSeries:
    return FailureSeries(tuple(float(x) for x in _MUSA_1975), source_label="musa")
