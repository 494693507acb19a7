"""Per-segment sonic events: amplitude modulators, pitch mapping, timbre."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import AliasingError, ParameterError
from .segmentation import Segment

log = logging.getLogger(__name__)

DEFAULT_AUDIO_RATE = 44100.0
DEFAULT_TAU_FACTOR = 0.13
TAIL_FADE_S = 0.005

TimbreKind = Literal["identity", "harmonic", "subharmonic"]


@dataclass(frozen=True)
class PitchSpec:
    """Reference frequencies for positive/negative segments and pitch scales.

    ``alpha`` scales the segment's starting trend value and ``beta`` its AC
    samples, both in octaves per data unit.
    """

    f_up_hz: float = 400.0
    f_down_hz: float = 300.0
    alpha: float = 2.0
    beta: float = 2.0

    def __post_init__(self) -> None:
        if not (self.f_up_hz > 0 and self.f_down_hz > 0):
            raise ParameterError("reference frequencies must be positive", stage="synth")
        if self.alpha < 0 or self.beta < 0:
            raise ParameterError("pitch scales must be non-negative", stage="synth")

    def reference_for(self, seg: Segment) -> float:
        return self.f_up_hz if seg.polarity == "positive" else self.f_down_hz


@dataclass(frozen=True)
class TimbreSpec:
    kind: TimbreKind = "identity"
    partials: int = 1
    rolloff: float = 0.0
    gain: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in ("identity", "harmonic", "subharmonic"):
            raise ParameterError(f"unknown timbre kind {self.kind!r}", stage="synth")
        if self.partials < 1:
            raise ParameterError("need at least one partial", stage="synth")
        if self.rolloff < 0 or not self.gain > 0:
            raise ParameterError("rolloff must be >= 0 and gain > 0", stage="synth")

    @property
    def frequency_multiplier(self) -> float:
        """Highest partial relative to the fundamental."""
        return float(self.partials) if self.kind == "harmonic" else 1.0


IDENTITY = TimbreSpec()


@dataclass(frozen=True)
class SonicEvent:
    source_index: int
    onset_s: float
    audio: NDArray[np.float64]
    audio_rate_hz: float

    @property
    def duration_s(self) -> float:
        return self.audio.size / self.audio_rate_hz

    @property
    def is_silent(self) -> bool:
        return not np.any(self.audio)


def event_length(seg: Segment, dilation: float, audio_rate_hz: float) -> int:
    if not dilation > 0:
        raise ParameterError(f"dilation must be positive, got {dilation}", stage="synth")
    return int(round(seg.duration_s / dilation * audio_rate_hz))


def read_dilated(
    values: NDArray[np.float64],
    seg: Segment,
    dilation: float,
    audio_rate_hz: float,
) -> NDArray[np.float64]:
    """Evaluate segment data at data time ``dilation * k / audio_rate``.

    Values between data samples are linearly interpolated; past the last sample
    the last value is held.
    """
    n = event_length(seg, dilation, audio_rate_hz)
    position = np.arange(n) * (dilation * seg.sample_rate_hz / audio_rate_hz)
    return np.interp(position, np.arange(values.size), values)


def am_magnitude(
    seg: Segment, dilation: float, gamma: float = 1.0, audio_rate_hz: float = DEFAULT_AUDIO_RATE
) -> NDArray[np.float64]:
    """Instantaneous magnitude raised to ``gamma`` (``gamma = 1`` keeps it linear)."""
    if gamma < 1:
        raise ParameterError(f"power-law exponent must be >= 1, got {gamma}", stage="synth")
    mag = np.abs(read_dilated(seg.ac, seg, dilation, audio_rate_hz))
    return mag if gamma == 1 else mag**gamma


def halfwave_threshold(x: ArrayLike, theta: float) -> NDArray[np.float64]:
    """``x - theta`` where ``x >= theta``, zero elsewhere."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(x >= theta, x - theta, 0.0)


def am_halfwave_threshold(
    seg: Segment, dilation: float, theta: float, audio_rate_hz: float = DEFAULT_AUDIO_RATE
) -> NDArray[np.float64]:
    if theta < 0:
        raise ParameterError("threshold must be non-negative", stage="synth")
    return halfwave_threshold(np.abs(read_dilated(seg.ac, seg, dilation, audio_rate_hz)), theta)


def am_gate(
    seg: Segment, dilation: float, theta: float, audio_rate_hz: float = DEFAULT_AUDIO_RATE
) -> NDArray[np.float64]:
    """Whole-segment gate: the full magnitude if the segment ever reaches
    ``theta``, otherwise silence of the same length."""
    if theta < 0:
        raise ParameterError("threshold must be non-negative", stage="synth")
    mag = np.abs(read_dilated(seg.ac, seg, dilation, audio_rate_hz))
    if seg.max_mag >= theta:
        return mag
    return np.zeros_like(mag)


def raised_cosine_fade(n: int) -> NDArray[np.float64]:
    if n <= 1:
        return np.zeros(n)
    return 0.5 * (1.0 + np.cos(np.pi * np.arange(n) / (n - 1)))


def am_envelope(
    seg: Segment,
    dilation: float,
    tau_factor: float = DEFAULT_TAU_FACTOR,
    audio_rate_hz: float = DEFAULT_AUDIO_RATE,
    fade_s: float = TAIL_FADE_S,
) -> NDArray[np.float64]:
    """Sharp-attack decaying envelope scaled to the segment's peak magnitude.

    ``a = max_mag * u * exp(1 - u)`` with ``u = dilation * t / tau`` and
    ``tau = tau_factor * T_i``; the peak ``max_mag`` sits at ``u = 1``. The
    last ``fade_s`` seconds are shaped by a raised-cosine fade in place, so the
    event length is unchanged.
    """
    if not tau_factor > 0:
        raise ParameterError("tau_factor must be positive", stage="synth")
    n = event_length(seg, dilation, audio_rate_hz)
    tau = tau_factor * seg.duration_s
    u = dilation * np.arange(n) / audio_rate_hz / tau
    env = seg.max_mag * u * np.exp(1.0 - u)
    nfade = min(n, int(round(fade_s * audio_rate_hz)))
    if nfade > 0:
        env[n - nfade :] *= raised_cosine_fade(nfade)
    return env


def pitch_exponent(
    seg: Segment, dilation: float, spec: PitchSpec, audio_rate_hz: float = DEFAULT_AUDIO_RATE
) -> NDArray[np.float64]:
    """Octave offset per audio sample: ``alpha * trend_at_start + beta * ac``."""
    ac = read_dilated(seg.ac, seg, dilation, audio_rate_hz)
    return spec.alpha * seg.trend_at_start + spec.beta * ac


def accumulate_phase(freq_hz: NDArray[np.float64], audio_rate_hz: float) -> NDArray[np.float64]:
    """Running phase starting at zero; ``phi[k] = phi[k-1] + 2*pi*f[k]/rate``."""
    phase = np.empty_like(freq_hz)
    if phase.size:
        phase[0] = 0.0
        np.cumsum(freq_hz[1:] * (2.0 * np.pi / audio_rate_hz), out=phase[1:])
    return phase


def apply_timbre(phase: ArrayLike, timbre: TimbreSpec = IDENTITY) -> NDArray[np.float64]:
    phase = np.asarray(phase, dtype=np.float64)
    if timbre.kind == "identity":
        return np.sin(phase)
    out = np.zeros_like(phase)
    for j in range(1, timbre.partials + 1):
        weight = float(j) ** -timbre.rolloff
        arg = j * phase if timbre.kind == "harmonic" else phase / j
        out += weight * np.sin(arg)
    return timbre.gain * out


def synthesize_event(
    seg: Segment,
    am: ArrayLike,
    b: ArrayLike,
    spec: PitchSpec,
    timbre: TimbreSpec = IDENTITY,
    audio_rate_hz: float = DEFAULT_AUDIO_RATE,
    onset_s: float = 0.0,
) -> SonicEvent:
    """Amplitude- and pitch-modulated oscillator for one segment.

    The reference frequency is ``f_up`` for positive segments and ``f_down``
    for negative ones; the instantaneous frequency is ``f_ref * 2**b``.
    Raises :class:`AliasingError` if any audible sample (nonzero amplitude)
    would put its highest partial at or above Nyquist.
    """
    am = np.asarray(am, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if am.shape != b.shape:
        raise ParameterError(
            f"amplitude ({am.size}) and pitch ({b.size}) sequences differ in length",
            stage="synth",
            segment_index=seg.index,
        )
    freq = spec.reference_for(seg) * np.exp2(b)
    audible = am != 0
    if np.any(audible):
        peak = float(np.max(freq[audible])) * timbre.frequency_multiplier
        if peak >= audio_rate_hz / 2:
            raise AliasingError(seg.index, peak, audio_rate_hz / 2)
    audio = am * apply_timbre(accumulate_phase(freq, audio_rate_hz), timbre)
    return SonicEvent(
        source_index=seg.index, onset_s=onset_s, audio=audio, audio_rate_hz=audio_rate_hz
    )


def dilation_for_segment(
    seg: Segment,
    dilation_0: float,
    sigma: float = 1.0,
    area_threshold: float = 1.0 / (8.0 * np.pi),
    is_excursion: bool = True,
) -> float:
    """Area-dependent dilation for excursion segments.

    Segments with area at or above ``area_threshold`` get
    ``dilation_0 * area_threshold / (sigma * area)``, which makes the event
    length grow linearly with the area. Everything else keeps ``dilation_0``.
    """
    if sigma < 1:
        raise ParameterError("sigma must be >= 1", stage="synth")
    if not area_threshold > 0:
        raise ParameterError("area threshold must be positive", stage="synth")
    if not is_excursion:
        return dilation_0
    area = seg.area
    if area == 0:
        log.warning("segment %d flagged as excursion but has zero area", seg.index)
        return dilation_0
    if area < area_threshold:
        return dilation_0
    return area_threshold / (sigma * area) * dilation_0
