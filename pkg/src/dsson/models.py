"""Sonification models for exercise-machine revolution-rate data.

Three presets share one pipeline (smoothing, weighted trend, zero-crossing
segmentation) and differ in how each segment becomes a sonic event:

``basic``
    magnitude amplitude modulation, constant dilation equal to the
    compression factor, so events abut without overlapping.
``itr``
    individual target range: a segment is heard in full only if its peak
    deviation reaches ``theta``; stronger compression with overlapping events.
``adv``
    ``itr`` plus excursion handling. Segments leaving the ``limits`` band get
    a decaying envelope, area-dependent stretching and a harmonic (overshoot)
    or subharmonic (undershoot) timbre.

``audify`` plays every data point as a one-sample impulse.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Literal, Sequence

import numpy as np

from .errors import ParameterError
from .ingest import TimeSeries, bartlett_smooth, downsample
from .segmentation import Segment, segment_series
from .synth import (
    IDENTITY,
    PitchSpec,
    SonicEvent,
    TimbreSpec,
    am_envelope,
    am_gate,
    am_magnitude,
    dilation_for_segment,
    pitch_exponent,
    synthesize_event,
)
from .trend import TrendDecomposition, decompose, detrend

log = logging.getLogger(__name__)

ModelName = Literal["basic", "itr", "adv", "audify"]
MODELS: tuple[str, ...] = ("basic", "itr", "adv", "audify")
Classification = Literal["normal", "overshoot", "undershoot"]


@dataclass(frozen=True)
class SonificationParams:
    model: str = "basic"
    kappa: float = 5.0
    dilation_0: float = 5.0
    f_up: float = 400.0
    f_down: float = 300.0
    alpha: float = 2.0
    beta: float = 2.0
    gamma: float = 1.0
    theta: float = 0.1
    w: float = 0.2
    x_target: float = 0.4
    ma_window_s: float = 2.5
    limit_lo: float = 0.2
    limit_hi: float = 0.6
    timbre_j: int = 5
    timbre_nu: float = 2.0
    gain_over: float = 0.5
    gain_under: float = 0.7
    area_threshold: float = 1.0 / (8.0 * math.pi)
    sigma: float = 1.0
    tau_factor: float = 0.13
    audio_rate_hz: float = 44100.0
    peak_dbfs: float = -1.0
    # preprocessing; 0 disables the step
    preprocess_rate_hz: float = 100.0
    smooth_window: int = 9
    playback_rate_hz: float = 44100.0

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ParameterError(f"unknown model {self.model!r}; choose from {', '.join(MODELS)}")
        checks = [
            (self.kappa > 0, "kappa must be positive"),
            (self.dilation_0 > 0, "dilation_0 must be positive"),
            (self.gamma >= 1, "gamma must be >= 1"),
            (self.theta >= 0, "theta must be >= 0"),
            (0 <= self.w <= 1, "w must lie in [0, 1]"),
            (self.limit_lo < self.limit_hi, "limit_lo must be below limit_hi"),
            (self.timbre_j >= 1, "timbre_j must be >= 1"),
            (self.sigma >= 1, "sigma must be >= 1"),
            (self.area_threshold > 0, "area_threshold must be positive"),
            (self.tau_factor > 0, "tau_factor must be positive"),
            (self.audio_rate_hz > 0, "audio_rate_hz must be positive"),
            (self.peak_dbfs <= 0, "peak_dbfs must be <= 0"),
            (self.playback_rate_hz > 0, "playback_rate_hz must be positive"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ParameterError(msg)

    @property
    def pitch(self) -> PitchSpec:
        return PitchSpec(self.f_up, self.f_down, self.alpha, self.beta)

    @property
    def limits(self) -> tuple[float, float]:
        return (self.limit_lo, self.limit_hi)

    @property
    def overshoot_timbre(self) -> TimbreSpec:
        return TimbreSpec("harmonic", self.timbre_j, self.timbre_nu, self.gain_over)

    @property
    def undershoot_timbre(self) -> TimbreSpec:
        return TimbreSpec("subharmonic", self.timbre_j, self.timbre_nu, self.gain_under)

    def replace(self, **changes: Any) -> "SonificationParams":
        return dataclasses.replace(self, **changes)


PRESETS: dict[str, dict[str, Any]] = {
    "basic": dict(model="basic", kappa=5.0, dilation_0=5.0),
    "itr": dict(model="itr", kappa=15.0, dilation_0=5.0, theta=0.1),
    "adv": dict(
        model="adv",
        kappa=15.0,
        dilation_0=5.0,
        theta=0.1,
        timbre_j=5,
        timbre_nu=2.0,
        sigma=1.0,
        gain_over=0.5,
        gain_under=0.7,
        area_threshold=1.0 / (8.0 * math.pi),
        tau_factor=0.13,
    ),
    "audify": dict(model="audify", kappa=1.0),
}


def preset(name: str, **overrides: Any) -> SonificationParams:
    if name not in PRESETS:
        raise ParameterError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
    return SonificationParams(**{**PRESETS[name], **overrides})


def classify_segment(seg: Segment, limits: tuple[float, float] = (0.2, 0.6)) -> Classification:
    """Overshoot if the raw data rise above the upper limit, undershoot if
    they fall below the lower one."""
    lo, hi = limits
    if not lo < hi:
        raise ParameterError("lower limit must be below upper limit")
    over = float(seg.raw.max()) > hi
    under = float(seg.raw.min()) < lo
    if over and under:
        log.warning("segment %d crosses both limits; treating as overshoot", seg.index)
    if over:
        return "overshoot"
    if under:
        return "undershoot"
    return "normal"


def preprocess(ts: TimeSeries, params: SonificationParams) -> TimeSeries:
    """Block-average down to ``preprocess_rate_hz`` and apply triangular smoothing."""
    target = params.preprocess_rate_hz
    if target and ts.sample_rate_hz > target:
        ts = downsample(ts, target)
    if params.smooth_window and params.smooth_window > 1:
        ts = bartlett_smooth(ts, params.smooth_window)
    return ts


def analyze_segments(
    ts: TimeSeries, params: SonificationParams
) -> tuple[TimeSeries, TrendDecomposition, list[Segment]]:
    ts = preprocess(ts, params)
    decomp = decompose(ts, params.ma_window_s, params.x_target, params.w)
    return ts, decomp, segment_series(ts, decomp)


def sonify_segment(seg: Segment, params: SonificationParams) -> SonicEvent:
    """One sonic event for ``seg`` under ``params.model``."""
    rate = params.audio_rate_hz
    onset = seg.start_time_s / params.kappa
    dilation = params.dilation_0
    timbre = IDENTITY
    if params.model == "basic":
        am = am_magnitude(seg, dilation, params.gamma, rate)
    elif params.model == "itr":
        am = am_gate(seg, dilation, params.theta, rate)
    elif params.model == "adv":
        kind = classify_segment(seg, params.limits)
        if kind == "normal":
            am = am_gate(seg, dilation, params.theta, rate)
        else:
            dilation = dilation_for_segment(
                seg, params.dilation_0, params.sigma, params.area_threshold, is_excursion=True
            )
            am = am_envelope(seg, dilation, params.tau_factor, rate)
            timbre = params.overshoot_timbre if kind == "overshoot" else params.undershoot_timbre
    else:
        raise ParameterError(f"model {params.model!r} does not sonify segments")
    b = pitch_exponent(seg, dilation, params.pitch, rate)
    return synthesize_event(seg, am, b, params.pitch, timbre, rate, onset_s=onset)


def render_segments(
    segments: Sequence[Segment], params: SonificationParams, workers: int = 1
) -> list[SonicEvent]:
    if workers > 1 and len(segments) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(lambda s: sonify_segment(s, params), segments))
    return [sonify_segment(s, params) for s in segments]


def render_model(ts: TimeSeries, params: SonificationParams, workers: int = 1) -> list[SonicEvent]:
    """Full pipeline from raw series to an index-ordered list of sonic events.

    The audify model bypasses preprocessing so the data reach the output
    untouched.
    """
    if params.model == "audify":
        return render_audify(ts, params.playback_rate_hz)
    _, _, segments = analyze_segments(ts, params)
    return render_segments(segments, params, workers)


def render_audify(ts: TimeSeries, playback_rate_hz: float) -> list[SonicEvent]:
    """One single-sample impulse per data point, weighted by the signed value."""
    if not playback_rate_hz > 0:
        raise ParameterError("playback rate must be positive")
    return [
        SonicEvent(
            source_index=n + 1,
            onset_s=n / playback_rate_hz,
            audio=np.array([value]),
            audio_rate_hz=playback_rate_hz,
        )
        for n, value in enumerate(ts.samples.tolist())
    ]


def detect_flat_tops(
    ts: TimeSeries, min_duration_s: float = 0.5, max_range: float = 0.02
) -> list[tuple[float, float]]:
    """Stretches where every window of ``min_duration_s`` varies by at most
    ``max_range``.

    Qualifying windows are merged left to right into maximal runs, reported
    as ``(start_s, duration_s)``.
    """
    if not min_duration_s > 0:
        raise ParameterError("min_duration_s must be positive")
    width = int(math.ceil(min_duration_s * ts.sample_rate_hz - 1e-9))
    x = ts.samples
    if width > x.size:
        return []
    width = max(width, 1)
    windows = np.lib.stride_tricks.sliding_window_view(x, width)
    ok = np.flatnonzero(windows.max(axis=1) - windows.min(axis=1) <= max_range)

    tops: list[tuple[int, int]] = []
    for s in ok.tolist():
        if tops and s == tops[-1][1] - width + 1:
            tops[-1] = (tops[-1][0], s + width)
        else:
            tops.append((s, s + width))
    rate = ts.sample_rate_hz
    return [(a / rate, (b - a) / rate) for a, b in tops]


def excursion_rows(
    segments: Sequence[Segment],
    theta: float,
    limits: tuple[float, float] = (0.2, 0.6),
) -> list[tuple[float, float, str]]:
    rows = []
    for seg in segments:
        kind = classify_segment(seg, limits)
        if kind != "normal":
            rows.append((seg.start_time_s, seg.duration_s, kind))
        if seg.max_mag >= theta:
            rows.append((seg.start_time_s, seg.duration_s, "deviation"))
    return rows


def detect_excursions(
    ts: TimeSeries,
    trend: Sequence[float] | np.ndarray,
    theta: float,
    limits: tuple[float, float] = (0.2, 0.6),
) -> list[tuple[float, float, str]]:
    """Report rows ``(start_s, duration_s, kind)`` for limit crossings
    (``overshoot``/``undershoot``) and target-range breaches (``deviation``,
    peak deviation from the trend at or above ``theta``)."""
    decomp = detrend(ts, trend)
    return excursion_rows(segment_series(ts, decomp), theta, limits)
