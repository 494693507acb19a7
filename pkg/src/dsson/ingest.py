"""Loading and preprocessing of raw data streams."""

from __future__ import annotations

import csv
import wave
from dataclasses import dataclass
from os import PathLike
from typing import Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import (
    DecodeError,
    EmptyInputError,
    FormatError,
    ParameterError,
    ParseError,
    UnsupportedFormatError,
)

DEFAULT_FULL_SCALE = 2.0
DEFAULT_SMOOTH_WINDOW = 9
SPACING_RTOL = 1e-6


@dataclass(frozen=True)
class TimeSeries:
    """Uniformly sampled real-valued signal."""

    samples: NDArray[np.float64]
    sample_rate_hz: float

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64).ravel()
        if not self.sample_rate_hz > 0:
            raise ParameterError(f"sample rate must be positive, got {self.sample_rate_hz}")
        if samples.size < 2:
            raise FormatError(f"need at least 2 samples, got {samples.size}")
        if not np.all(np.isfinite(samples)):
            bad = int(np.flatnonzero(~np.isfinite(samples))[0])
            raise FormatError(f"non-finite sample at index {bad}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate_hz", float(self.sample_rate_hz))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate_hz

    @property
    def times(self) -> NDArray[np.float64]:
        return np.arange(self.samples.size) / self.sample_rate_hz

    def with_samples(self, samples: ArrayLike) -> "TimeSeries":
        return TimeSeries(np.asarray(samples, dtype=np.float64), self.sample_rate_hz)


def _parse_rows(lines: Sequence[str]) -> list[tuple[int, list[float]]]:
    rows: list[tuple[int, list[float]]] = []
    reader = csv.reader(lines)
    seen_any = False
    for lineno, fields in enumerate(reader, start=1):
        fields = [f.strip() for f in fields]
        if not fields or all(f == "" for f in fields):
            continue
        first, seen_any = not seen_any, True
        try:
            values = [float(f) for f in fields]
        except ValueError:
            if first:
                continue  # header row
            raise ParseError(f"non-numeric value in row {fields!r}", line=lineno) from None
        rows.append((lineno, values))
    return rows


def load_csv(path: str | PathLike, sample_rate_hz: float | None = None) -> TimeSeries:
    """Read a one-column (value) or two-column (time_s, value) CSV file.

    A single column requires ``sample_rate_hz``. With a time column the rate is
    inferred from the spacing, which must be uniform to ``SPACING_RTOL``; an
    explicit rate must then agree with it.
    """
    with open(path, encoding="utf-8", newline="") as fh:
        lines = fh.read().splitlines()
    rows = _parse_rows(lines)
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")

    width = len(rows[0][1])
    for lineno, values in rows:
        if len(values) != width:
            raise ParseError(f"expected {width} columns, got {len(values)}", line=lineno)

    if width == 1:
        if sample_rate_hz is None:
            raise FormatError(f"{path}: single-column CSV needs an explicit sample rate")
        return TimeSeries(np.array([v[0] for _, v in rows]), sample_rate_hz)
    if width != 2:
        raise FormatError(f"{path}: expected 1 or 2 columns, got {width}")

    data = np.array([v for _, v in rows])
    times, values = data[:, 0], data[:, 1]
    if times.size < 2:
        raise FormatError(f"{path}: need at least 2 samples to infer the rate")
    steps = np.diff(times)
    if np.any(steps <= 0):
        raise FormatError(f"{path}: time column is not strictly increasing")
    mean_step = (times[-1] - times[0]) / (times.size - 1)
    if np.max(np.abs(steps - mean_step)) > SPACING_RTOL * mean_step:
        raise FormatError(f"{path}: non-uniform time spacing")
    rate = 1.0 / mean_step
    if sample_rate_hz is not None:
        if abs(rate - sample_rate_hz) > SPACING_RTOL * sample_rate_hz:
            raise FormatError(
                f"{path}: time column implies {rate:g} Hz, but {sample_rate_hz:g} Hz was given"
            )
        rate = sample_rate_hz
    return TimeSeries(values, rate)


def load_wav_pcm16(path: str | PathLike, full_scale_value: float = DEFAULT_FULL_SCALE) -> TimeSeries:
    """Read an audified data stream from a mono 16-bit PCM WAV file.

    Integer sample ``k`` maps to ``k / 32768 * full_scale_value``.
    """
    if not full_scale_value > 0:
        raise ParameterError("full_scale_value must be positive", stage="ingest")
    try:
        with wave.open(str(path), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            nframes = wf.getnframes()
            if channels != 1 or width != 2:
                raise UnsupportedFormatError(
                    f"{path}: need mono 16-bit PCM, got {channels} channel(s), {8 * width}-bit"
                )
            raw = wf.readframes(nframes)
    except (wave.Error, EOFError) as exc:
        raise DecodeError(f"{path}: {exc}") from exc
    if len(raw) != 2 * nframes:
        raise DecodeError(f"{path}: truncated data chunk ({len(raw)} of {2 * nframes} bytes)")
    ints = np.frombuffer(raw, dtype="<i2")
    return TimeSeries(ints.astype(np.float64) / 32768.0 * full_scale_value, rate)


def write_wav_pcm16(
    ts: TimeSeries, path: str | PathLike, full_scale_value: float = DEFAULT_FULL_SCALE
) -> None:
    """Audify a series into a mono PCM16 file (inverse of :func:`load_wav_pcm16`)."""
    ints = np.rint(ts.samples / full_scale_value * 32768.0)
    ints = np.clip(ints, -32768, 32767).astype("<i2")
    rate = int(round(ts.sample_rate_hz))
    with wave.open(str(path), "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(rate)
        wf.writeframes(ints.tobytes())


def downsample(ts: TimeSeries, target_rate_hz: float) -> TimeSeries:
    """Decimate by block averaging; a trailing partial block is dropped."""
    if not target_rate_hz > 0:
        raise ParameterError("target rate must be positive", stage="ingest")
    ratio = ts.sample_rate_hz / target_rate_hz
    factor = int(round(ratio))
    if factor < 1 or abs(ratio - factor) > 1e-9 * ratio:
        raise ParameterError(
            f"unsupported decimation ratio {ratio:g} ({ts.sample_rate_hz:g} -> {target_rate_hz:g} Hz)",
            stage="ingest",
        )
    if factor == 1:
        return ts
    nblocks = len(ts) // factor
    blocks = ts.samples[: nblocks * factor].reshape(nblocks, factor)
    return TimeSeries(blocks.mean(axis=1), target_rate_hz)


def triangular_kernel(length: int) -> NDArray[np.float64]:
    # odd-length triangle with nonzero end taps, e.g. 3 -> [1, 2, 1] / 4
    half = (length + 1) // 2
    ramp = np.arange(1, half + 1, dtype=np.float64)
    kernel = np.concatenate([ramp, ramp[-2::-1]])
    return kernel / kernel.sum()


def bartlett_smooth(ts: TimeSeries, window_len_samples: int = DEFAULT_SMOOTH_WINDOW) -> TimeSeries:
    """Triangular smoothing with unity DC gain and edge-replication padding."""
    n = window_len_samples
    if n < 3 or n % 2 == 0 or n > len(ts):
        raise ParameterError(
            f"smoothing window must be odd, >= 3 and <= {len(ts)}, got {n}", stage="ingest"
        )
    half = n // 2
    padded = np.pad(ts.samples, half, mode="edge")
    return ts.with_samples(np.convolve(padded, triangular_kernel(n), mode="valid"))
