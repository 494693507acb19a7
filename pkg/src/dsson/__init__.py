"""Direct segmented sonification of one-dimensional time series.

A data stream is cut at the zero crossings of its trend-free part, each
segment becomes one sonic event, and events are laid out at their data onset
times divided by a compression factor.
"""

from .errors import DSSonError
from .ingest import TimeSeries, bartlett_smooth, downsample, load_csv, load_wav_pcm16
from .mixdown import RenderedAudio, normalize, schedule_and_sum, write_wav
from .models import SonificationParams, preset, render_audify, render_model
from .segmentation import Segment, extract_segments, find_cutting_points
from .synth import PitchSpec, SonicEvent, TimbreSpec
from .trend import TrendDecomposition, decompose, detrend, moving_average, weighted_trend

__all__ = [
    "DSSonError",
    "PitchSpec",
    "RenderedAudio",
    "Segment",
    "SonicEvent",
    "SonificationParams",
    "TimbreSpec",
    "TimeSeries",
    "TrendDecomposition",
    "bartlett_smooth",
    "decompose",
    "detrend",
    "downsample",
    "extract_segments",
    "find_cutting_points",
    "load_csv",
    "load_wav_pcm16",
    "moving_average",
    "normalize",
    "preset",
    "render_audify",
    "render_model",
    "schedule_and_sum",
    "weighted_trend",
    "write_wav",
]
