"""Zero-crossing cutting points and per-segment statistics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import ConsistencyError
from .ingest import TimeSeries
from .trend import TrendDecomposition

Polarity = Literal["positive", "negative"]

# |ac| at or below this counts as an exact zero (sin(pi) is 1.2e-16, not 0)
ZERO_TOL = 1e-12
MIN_SEGMENT_SAMPLES = 2


@dataclass(frozen=True)
class Segment:
    index: int
    start_sample: int
    ac: NDArray[np.float64]
    raw: NDArray[np.float64]
    trend_at_start: float
    sample_rate_hz: float

    @property
    def count(self) -> int:
        return self.ac.size

    @property
    def start_time_s(self) -> float:
        return self.start_sample / self.sample_rate_hz

    @property
    def duration_s(self) -> float:
        return self.ac.size / self.sample_rate_hz

    @property
    def max_mag(self) -> float:
        return float(np.max(np.abs(self.ac)))

    @property
    def area(self) -> float:
        """Time integral of ``|ac|`` by the rectangle rule."""
        return float(np.sum(np.abs(self.ac)) / self.sample_rate_hz)

    @property
    def is_null(self) -> bool:
        """True when every ac sample is zero; polarity is then nominal."""
        return self.max_mag <= ZERO_TOL

    @property
    def polarity(self) -> Polarity:
        peak = self.ac[int(np.argmax(np.abs(self.ac)))]
        return "negative" if peak < -ZERO_TOL else "positive"


def _signs(ac: NDArray[np.float64], zero_tol: float) -> NDArray[np.int8]:
    s = np.zeros(ac.size, dtype=np.int8)
    s[ac > zero_tol] = 1
    s[ac < -zero_tol] = -1
    return s


def find_cutting_points(
    ac: ArrayLike, sample_rate_hz: float | None = None, zero_tol: float = ZERO_TOL
) -> list[int]:
    """Sample indices of segment boundaries, always starting at 0 and ending at N.

    A cut falls on the first sample of a new sign. A sample that is zero
    (within ``zero_tol``) after a nonzero one also starts a new segment; the
    rest of a zero run stays with it. ``sample_rate_hz`` is accepted for
    symmetry with the time-based API and does not affect the result.
    """
    ac = np.asarray(ac, dtype=np.float64)
    if ac.size < 2:
        raise ConsistencyError("need at least 2 samples to segment", stage="segmentation")
    s = _signs(ac, zero_tol)
    prev, cur = s[:-1], s[1:]
    flips = (prev != 0) & (cur != 0) & (prev != cur)
    zero_starts = (prev != 0) & (cur == 0)
    interior = np.flatnonzero(flips | zero_starts) + 1
    return [0, *interior.tolist(), int(ac.size)]


def _merge_short(bounds: list[int], min_len: int) -> list[int]:
    bounds = list(bounds)
    i = 0
    while len(bounds) > 2 and i < len(bounds) - 1:
        if bounds[i + 1] - bounds[i] >= min_len:
            i += 1
            continue
        if i + 1 < len(bounds) - 1:
            del bounds[i + 1]  # absorb into the following segment
        else:
            del bounds[i]  # last segment: absorb into the preceding one
            i = max(i - 1, 0)
    return bounds


def extract_segments(
    decomp: TrendDecomposition,
    raw: TimeSeries | ArrayLike,
    cuts: Sequence[int],
) -> list[Segment]:
    """Slice the decomposition at ``cuts`` into numbered segments.

    Slices shorter than two samples are merged into the following segment, or
    into the preceding one when they come last.
    """
    raw_values = raw.samples if isinstance(raw, TimeSeries) else np.asarray(raw, dtype=np.float64)
    n = decomp.ac.size
    cuts = [int(c) for c in cuts]
    if len(cuts) < 2 or cuts[0] != 0 or cuts[-1] != n:
        raise ConsistencyError(f"cuts must run from 0 to {n}", stage="segmentation")
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise ConsistencyError("cutting points are not strictly increasing", stage="segmentation")
    if raw_values.size != n:
        raise ConsistencyError("raw series and decomposition differ in length", stage="segmentation")

    bounds = _merge_short(cuts, MIN_SEGMENT_SAMPLES)
    return [
        Segment(
            index=i,
            start_sample=a,
            ac=decomp.ac[a:b],
            raw=raw_values[a:b],
            trend_at_start=float(decomp.trend[a]),
            sample_rate_hz=decomp.source_rate_hz,
        )
        for i, (a, b) in enumerate(zip(bounds, bounds[1:]), start=1)
    ]


def segment_series(ts: TimeSeries, decomp: TrendDecomposition) -> list[Segment]:
    return extract_segments(decomp, ts, find_cutting_points(decomp.ac, ts.sample_rate_hz))
