"""Synthetic revolution-rate sessions with known features.

Each profile is a slow drift around 0.4 Hz plus a 0.8 Hz fluctuation (two
speed-ups and two slow-downs per revolution) and smooth noise. The ``poor``
and ``novice`` profiles additionally splice in overshoots and undershoots at
recorded times, so tests can check what the analysis finds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from os import PathLike
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .ingest import TimeSeries

PROFILES = ("steady", "poor", "novice")

OVERSHOOT_LEVEL = 0.78
UNDERSHOOT_LEVEL = 0.08


@dataclass
class Session:
    series: TimeSeries
    profile: str
    seed: int
    features: list[dict] = field(default_factory=list)

    def truth(self) -> dict:
        return {
            "profile": self.profile,
            "seed": self.seed,
            "sample_rate_hz": self.series.sample_rate_hz,
            "duration_s": self.series.duration_s,
            "features": self.features,
        }


def _plateau(t: np.ndarray, start: float, hold: float, ramp: float) -> np.ndarray:
    """0..1 window: raised-cosine ramps of length ``ramp`` around a flat ``hold``."""
    g = np.zeros_like(t)
    up = (t >= start) & (t < start + ramp)
    g[up] = 0.5 * (1 - np.cos(np.pi * (t[up] - start) / ramp))
    top = (t >= start + ramp) & (t <= start + ramp + hold)
    g[top] = 1.0
    down_start = start + ramp + hold
    down = (t > down_start) & (t < down_start + ramp)
    g[down] = 0.5 * (1 + np.cos(np.pi * (t[down] - down_start) / ramp))
    return g


def _smooth_noise(rng: np.random.Generator, n: int, std: float, width: int = 25) -> np.ndarray:
    white = rng.standard_normal(n + width - 1)
    smooth = np.convolve(white, np.ones(width) / width, mode="valid")
    return smooth * (std / max(float(smooth.std()), 1e-12))


def synthesize_session(
    profile: str, seed: int = 0, duration_s: float = 60.0, sample_rate_hz: float = 100.0
) -> Session:
    if profile not in PROFILES:
        raise ParameterError(f"unknown profile {profile!r}; choose from {', '.join(PROFILES)}")
    if duration_s < 10:
        raise ParameterError("sessions shorter than 10 s cannot hold the profile features")
    rng = np.random.default_rng(seed)
    n = int(round(duration_s * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz

    amp, drift_amp, drift_period, noise = {
        "steady": (0.04, 0.01, 30.0, 0.003),
        "poor": (0.09, 0.05, 20.0, 0.01),
        "novice": (0.07, 0.03, 25.0, 0.006),
    }[profile]
    phase = rng.uniform(0, 2 * np.pi)
    x = (
        0.4
        + drift_amp * np.sin(2 * np.pi * t / drift_period + rng.uniform(0, 2 * np.pi))
        + amp * np.sin(2 * np.pi * 0.8 * t + phase)
        + _smooth_noise(rng, n, noise)
    )

    # (kind, fraction of the session, hold seconds, ramp seconds)
    plan = {
        "steady": [],
        "poor": [
            ("overshoot", 0.10, 0.1, 0.25),
            ("undershoot", 0.18, 0.6, 0.2),
            ("overshoot", 0.25, 0.1, 0.25),
            ("undershoot", 0.45, 0.7, 0.2),
            ("overshoot", 0.62, 0.1, 0.25),
            ("undershoot", 0.80, 0.6, 0.2),
        ],
        "novice": [
            ("overshoot", 0.3, 0.1, 0.25),
            ("undershoot", 0.7, 0.6, 0.2),
        ],
    }[profile]

    features = []
    for kind, frac, hold, ramp in plan:
        start = round(frac * duration_s + rng.uniform(-0.5, 0.5), 2)
        level = OVERSHOOT_LEVEL if kind == "overshoot" else UNDERSHOOT_LEVEL
        g = _plateau(t, start, hold, ramp)
        x = x * (1 - g) + level * g
        features.append(
            {
                "kind": kind,
                "start_s": start,
                "peak_time_s": round(start + ramp + hold / 2, 6),
                "end_s": round(start + 2 * ramp + hold, 6),
                "level": level,
            }
        )
    return Session(TimeSeries(x, sample_rate_hz), profile, seed, features)


def write_session(session: Session, path: str | PathLike) -> Path:
    """Write ``time_s,value`` CSV plus a ``.truth.json`` sidecar; returns the sidecar path."""
    path = Path(path)
    ts = session.series
    lines = ["time_s,value"]
    lines += [f"{t:.6f},{v:.6f}" for t, v in zip(ts.times.tolist(), ts.samples.tolist())]
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sidecar = path.with_name(path.name + ".truth.json")
    sidecar.write_text(json.dumps(session.truth(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return sidecar
