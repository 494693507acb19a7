"""Independent measurement helpers used as test oracles.

Nothing here calls into the package, so these checks do not share code
paths with what they verify.
"""

from __future__ import annotations

import numpy as np


def zero_crossing_frequency(x: np.ndarray, rate: float) -> float:
    """Frequency from interpolated zero-crossing times."""
    x = np.asarray(x, dtype=float)
    idx = np.flatnonzero((x[:-1] < 0) & (x[1:] >= 0) | (x[:-1] > 0) & (x[1:] <= 0))
    # linear interpolation of each crossing instant
    times = (idx + x[idx] / (x[idx] - x[idx + 1])) / rate
    if times.size < 3:
        raise ValueError("too few crossings to measure")
    return (times.size - 1) / (2.0 * (times[-1] - times[0]))


def spectrum(x: np.ndarray, rate: float, pad: int = 8) -> tuple[np.ndarray, np.ndarray]:
    n = int(2 ** np.ceil(np.log2(x.size * pad)))
    mag = np.abs(np.fft.rfft(x, n))
    return np.fft.rfftfreq(n, 1.0 / rate), mag


def peak_near(freqs: np.ndarray, mag: np.ndarray, f: float, width_hz: float) -> tuple[float, float]:
    sel = np.flatnonzero(np.abs(freqs - f) <= width_hz)
    k = sel[np.argmax(mag[sel])]
    return float(freqs[k]), float(mag[k])


def stft_ridge(x: np.ndarray, rate: float, nwin: int, hop: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame peak frequency (parabolic interpolation) of a Hann STFT."""
    w = np.hanning(nwin)
    starts = range(0, x.size - nwin + 1, hop)
    centers, peaks = [], []
    for s in starts:
        m = np.abs(np.fft.rfft(x[s : s + nwin] * w, 4 * nwin))
        k = int(np.argmax(m))
        if 0 < k < m.size - 1:
            a, b, c = np.log(m[k - 1 : k + 2] + 1e-300)
            k = k + 0.5 * (a - c) / (a - 2 * b + c)
        centers.append((s + nwin / 2) / rate)
        peaks.append(k * rate / (4 * nwin))
    return np.array(centers), np.array(peaks)


def direct_convolution_edge(x: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Loop-based centered convolution with edge replication."""
    half = kernel.size // 2
    out = np.empty(x.size)
    for n in range(x.size):
        acc = 0.0
        for k in range(kernel.size):
            m = min(max(n + k - half, 0), x.size - 1)
            acc += kernel[k] * x[m]
        out[n] = acc
    return out
