"""Trend estimation and removal."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ParameterError
from .ingest import TimeSeries

DEFAULT_MA_WINDOW_S = 2.5


@dataclass(frozen=True)
class TrendDecomposition:
    """A source series split as ``source = trend + ac``."""

    trend: NDArray[np.float64]
    ac: NDArray[np.float64]
    source_rate_hz: float

    def __post_init__(self) -> None:
        if self.trend.shape != self.ac.shape:
            raise ParameterError("trend and ac lengths differ", stage="trend")

    @property
    def source(self) -> NDArray[np.float64]:
        return self.trend + self.ac


def moving_average_length(window_s: float, sample_rate_hz: float) -> int:
    n = int(round(window_s * sample_rate_hz))
    return n if n % 2 else n + 1


def moving_average(ts: TimeSeries, window_s: float = DEFAULT_MA_WINDOW_S) -> NDArray[np.float64]:
    """Centered moving mean over an odd number of samples.

    The window is ``round(window_s * rate)`` samples, bumped up to the next odd
    count. Edges are padded by replication so the output has the input length.
    """
    if not window_s * ts.sample_rate_hz >= 2 - 1e-9:
        raise ParameterError(
            f"moving-average window {window_s:g} s is shorter than 2 samples", stage="trend"
        )
    n = moving_average_length(window_s, ts.sample_rate_hz)
    padded = np.pad(ts.samples, n // 2, mode="edge")
    out = np.convolve(padded, np.full(n, 1.0 / n), mode="valid")
    # the mean of a window never leaves the data range; clip float round-off
    return np.clip(out, ts.samples.min(), ts.samples.max())


def weighted_trend(ma: ArrayLike, x_target: float, w: float) -> NDArray[np.float64]:
    """Blend a fixed target value into a moving average: ``w*target + (1-w)*ma``."""
    if not 0.0 <= w <= 1.0 or math.isnan(w):
        raise ParameterError(f"trend weight must lie in [0, 1], got {w}", stage="trend")
    return w * x_target + (1.0 - w) * np.asarray(ma, dtype=np.float64)


def detrend(ts: TimeSeries, trend: ArrayLike) -> TrendDecomposition:
    trend = np.array(trend, dtype=np.float64)
    if trend.shape != ts.samples.shape:
        raise ParameterError(
            f"trend length {trend.size} does not match series length {len(ts)}", stage="trend"
        )
    return TrendDecomposition(trend=trend, ac=ts.samples - trend, source_rate_hz=ts.sample_rate_hz)


def decompose(
    ts: TimeSeries,
    window_s: float = DEFAULT_MA_WINDOW_S,
    x_target: float = 0.4,
    w: float = 0.2,
) -> TrendDecomposition:
    """Moving average, target weighting and trend removal in one step."""
    return detrend(ts, weighted_trend(moving_average(ts, window_s), x_target, w))
