"""Overlap-add of sonic events, normalization and file output."""

from __future__ import annotations

import wave
from dataclasses import dataclass, field
from os import PathLike
from typing import Literal, Sequence

import numpy as np
from numpy.typing import NDArray
from PIL import Image
from scipy.io import wavfile
from scipy.signal import get_window

from .errors import ConsistencyError, RangeError
from .synth import SonicEvent

DEFAULT_PEAK_DBFS = -1.0
BitDepth = Literal["16", "32float"]


@dataclass(frozen=True)
class RenderedAudio:
    samples: NDArray[np.float64]
    audio_rate_hz: float
    applied_gain: float = 1.0
    offsets: tuple[int, ...] = field(default=(), compare=False)

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.audio_rate_hz


def schedule_and_sum(
    events: Sequence[SonicEvent], audio_rate_hz: float | None = None
) -> RenderedAudio:
    """Overlap-add events at ``round(onset_s * audio_rate)``.

    Events are accumulated in ascending ``source_index`` order whatever order
    they arrive in, so the float sums are reproducible.
    """
    if audio_rate_hz is None:
        if not events:
            raise ConsistencyError("cannot infer audio rate from an empty event list", stage="mixdown")
        audio_rate_hz = events[0].audio_rate_hz
    ordered = sorted(events, key=lambda e: e.source_index)
    offsets = []
    for ev in ordered:
        if ev.onset_s < 0:
            raise ConsistencyError(
                f"event {ev.source_index} has negative onset {ev.onset_s}",
                stage="mixdown",
                segment_index=ev.source_index,
            )
        if ev.audio_rate_hz != audio_rate_hz:
            raise ConsistencyError(
                f"event {ev.source_index} rendered at {ev.audio_rate_hz} Hz, mix at {audio_rate_hz} Hz",
                stage="mixdown",
                segment_index=ev.source_index,
            )
        offsets.append(int(round(ev.onset_s * audio_rate_hz)))

    length = max((o + ev.audio.size for o, ev in zip(offsets, ordered)), default=0)
    buf = np.zeros(length)
    for o, ev in zip(offsets, ordered):
        buf[o : o + ev.audio.size] += ev.audio
    return RenderedAudio(buf, float(audio_rate_hz), 1.0, tuple(offsets))


def normalize(audio: RenderedAudio, peak_dbfs: float = DEFAULT_PEAK_DBFS) -> RenderedAudio:
    """Scale so the absolute peak equals ``peak_dbfs``; silence passes through."""
    if peak_dbfs > 0:
        raise RangeError(f"peak level must be <= 0 dBFS, got {peak_dbfs}")
    peak = float(np.max(np.abs(audio.samples))) if audio.samples.size else 0.0
    if peak == 0.0:
        return RenderedAudio(audio.samples, audio.audio_rate_hz, 1.0, audio.offsets)
    gain = 10.0 ** (peak_dbfs / 20.0) / peak
    return RenderedAudio(audio.samples * gain, audio.audio_rate_hz, gain, audio.offsets)


def write_wav(audio: RenderedAudio, path: str | PathLike, bit_depth: BitDepth = "16") -> None:
    samples = audio.samples
    if samples.size and float(np.max(np.abs(samples))) > 1.0:
        raise RangeError("samples exceed [-1, 1]; normalize before writing")
    rate = int(round(audio.audio_rate_hz))
    if bit_depth == "32float":
        wavfile.write(str(path), rate, samples.astype(np.float32))
        return
    if bit_depth != "16":
        raise RangeError(f"unsupported bit depth {bit_depth!r}")
    ints = np.clip(np.rint(samples * 32768.0), -32767, 32767).astype("<i2")
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(ints.tobytes())


def read_wav(path: str | PathLike) -> RenderedAudio:
    """Read a mono WAV (PCM16 or float32) back to floats in [-1, 1]."""
    rate, data = wavfile.read(str(path))
    if data.ndim != 1:
        raise RangeError(f"{path}: expected mono audio")
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32:
        samples = data.astype(np.float64)
    else:
        raise RangeError(f"{path}: unsupported sample type {data.dtype}")
    return RenderedAudio(samples, float(rate))


def stft_magnitude(
    samples: NDArray[np.float64],
    audio_rate_hz: float,
    window_s: float = 0.023,
    overlap: float = 0.75,
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Hann-windowed magnitude STFT.

    Returns ``(freqs_hz, frame_times_s, magnitude)`` with magnitude shaped
    ``(n_freqs, n_frames)``.
    """
    nwin = max(2, int(round(window_s * audio_rate_hz)))
    hop = max(1, int(round(nwin * (1.0 - overlap))))
    x = np.asarray(samples, dtype=np.float64)
    if x.size < nwin:
        x = np.pad(x, (0, nwin - x.size))
    nframes = 1 + (x.size - nwin) // hop
    idx = np.arange(nwin)[None, :] + hop * np.arange(nframes)[:, None]
    frames = x[idx] * get_window("hann", nwin)
    mag = np.abs(np.fft.rfft(frames, axis=1)).T
    freqs = np.fft.rfftfreq(nwin, 1.0 / audio_rate_hz)
    times = (np.arange(nframes) * hop + nwin / 2) / audio_rate_hz
    return freqs, times, mag


def spectrogram_image(
    audio: RenderedAudio,
    window_s: float = 0.023,
    overlap: float = 0.75,
    max_freq_hz: float = 4000.0,
    dynamic_range_db: float = 80.0,
) -> NDArray[np.uint8]:
    """Log-magnitude grayscale image, low frequencies at the bottom row."""
    freqs, _, mag = stft_magnitude(audio.samples, audio.audio_rate_hz, window_s, overlap)
    mag = mag[freqs <= max_freq_hz]
    peak = float(mag.max()) if mag.size else 0.0
    if peak == 0.0:
        return np.zeros(mag.shape, dtype=np.uint8)
    db = 20.0 * np.log10(np.maximum(mag / peak, 10.0 ** (-dynamic_range_db / 20.0)))
    level = np.rint((db + dynamic_range_db) / dynamic_range_db * 255.0)
    return level.astype(np.uint8)[::-1]


def spectrogram_png(
    audio: RenderedAudio,
    path: str | PathLike,
    window_s: float = 0.023,
    overlap: float = 0.75,
    max_freq_hz: float = 4000.0,
) -> None:
    Image.fromarray(spectrogram_image(audio, window_s, overlap, max_freq_hz)).save(path)
