import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dsson.ingest import TimeSeries
from dsson.segmentation import Segment


def make_segment(ac, rate=100.0, trend=0.4, raw=None, index=1, start_sample=0):
    ac = np.asarray(ac, dtype=float)
    raw = ac + trend if raw is None else np.asarray(raw, dtype=float)
    return Segment(index=index, start_sample=start_sample, ac=ac, raw=raw,
                   trend_at_start=trend, sample_rate_hz=rate)


@pytest.fixture
def segment_factory():
    return make_segment


@pytest.fixture
def fluctuation_series():
    """60 s at 100 Hz: 0.8 Hz fluctuation (4 crossings per 2.5 s revolution) on 0.4."""
    t = np.arange(6000) / 100.0
    return TimeSeries(0.4 + 0.05 * np.sin(2 * np.pi * 0.8 * t), 100.0)


def pytest_terminal_summary(terminalreporter):
    reports = [
        r
        for key in ("passed", "failed")
        for r in terminalreporter.stats.get(key, [])
        if getattr(r, "when", "") == "call" and "test_acceptance.py" in r.nodeid
    ]
    if not reports:
        return
    terminalreporter.section("acceptance criteria")
    for r in sorted(reports, key=lambda r: r.nodeid):
        name = r.nodeid.split("::")[-1]
        terminalreporter.write_line(f"{'PASS' if r.passed else 'FAIL'}  {name}")
