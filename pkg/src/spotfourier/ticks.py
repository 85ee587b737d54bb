"""Tick-data ingestion and affine mapping onto the analysis window.

Raw observations are (timestamp, log-price) pairs on an arbitrary interval
[t0, T].  Estimation runs on [-pi, pi], so times are rescaled affinely and
the caller is handed the factor (T - t0) / (2*pi) needed to convert the
estimated variance back to the original clock.  The factor is reported,
never silently applied.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ._csvio import fmt, read_rows, write_csv
from .fourier import TWO_PI, ObservedIncrements

logger = logging.getLogger(__name__)

_HEADER = ("t", "logprice")


@dataclass(frozen=True)
class TickSeries:
    """Strictly time-ordered log-price observations."""

    times: np.ndarray = field(repr=False)
    log_prices: np.ndarray = field(repr=False)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        prices = np.asarray(self.log_prices, dtype=float)
        if times.ndim != 1 or prices.ndim != 1 or times.size != prices.size:
            raise ValueError("times and log_prices must be 1-D with equal length")
        if times.size < 2:
            raise ValueError(f"need at least 2 ticks, got {times.size}")
        if not (np.isfinite(times).all() and np.isfinite(prices).all()):
            raise ValueError("tick data must be finite")
        if (np.diff(times) <= 0).any():
            raise ValueError("tick timestamps must be strictly increasing")
        object.__setattr__(self, "times", times.copy())
        object.__setattr__(self, "log_prices", prices.copy())
        self.times.setflags(write=False)
        self.log_prices.setflags(write=False)

    @property
    def count(self) -> int:
        return int(self.times.size)

    @property
    def span(self) -> tuple:
        return float(self.times[0]), float(self.times[-1])

    @property
    def volatility_rescale_factor(self) -> float:
        """Multiplier converting variance per [-pi, pi] time to original time.

        Spot variance estimated on the rescaled clock must be divided by
        this factor, (T - t0) / (2*pi), to refer to the original clock.
        """
        t0, t_end = self.span
        return (t_end - t0) / TWO_PI

    def rescaled_times(self) -> np.ndarray:
        """Affine image of the timestamps on [-pi, pi], endpoints exact."""
        t0, t_end = self.span
        out = (self.times - t0) / (t_end - t0) * TWO_PI - np.pi
        out[0] = -np.pi
        out[-1] = np.pi
        return out

    def to_observed_increments(self) -> ObservedIncrements:
        """Log-price increments on the rescaled clock.

        The final observation at +pi contributes only as the right endpoint
        of the last increment; observation times are the left endpoints.
        """
        rescaled = self.rescaled_times()
        return ObservedIncrements(rescaled[:-1], np.diff(self.log_prices))


def ingest_csv(path, has_header: bool = True) -> TickSeries:
    """Parse `t,logprice` rows into a TickSeries.

    Malformed rows (wrong arity, non-numeric fields, non-finite values)
    raise ValueError naming the offending line number.  Duplicate
    timestamps keep the last occurrence and log a warning; out-of-order
    rows after deduplication are an error.
    """
    times: list[float] = []
    prices: list[float] = []
    line_of: dict[float, int] = {}
    expected = _HEADER if has_header else None
    for lineno, row in read_rows(path, 2, header=expected):
        try:
            stamp = float(row[0])
            price = float(row[1])
        except ValueError:
            raise ValueError(
                f"{path}: line {lineno}: non-numeric field in row {row!r}"
            ) from None
        if not (np.isfinite(stamp) and np.isfinite(price)):
            raise ValueError(f"{path}: line {lineno}: non-finite value in row {row!r}")
        if stamp in line_of:
            logger.warning(
                "%s: line %d: duplicate timestamp %s, keeping the later row",
                path,
                lineno,
                fmt(stamp),
            )
            idx = times.index(stamp)
            times.pop(idx)
            prices.pop(idx)
        line_of[stamp] = lineno
        times.append(stamp)
        prices.append(price)
    if len(times) < 2:
        raise ValueError(f"{path}: need at least 2 ticks, got {len(times)}")
    bad = np.nonzero(np.diff(np.asarray(times)) <= 0)[0]
    if bad.size:
        stamp = times[int(bad[0]) + 1]
        raise ValueError(
            f"{path}: line {line_of[stamp]}: timestamp {fmt(stamp)} is out of order"
        )
    return TickSeries(np.asarray(times), np.asarray(prices))


def write_ticks_csv(series: TickSeries, dest) -> None:
    rows = ((fmt(t), fmt(p)) for t, p in zip(series.times, series.log_prices))
    write_csv(dest, _HEADER, rows)
