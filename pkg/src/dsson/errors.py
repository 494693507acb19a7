"""Exception hierarchy.

Every error carries the pipeline ``stage`` it originated from so the CLI can
report where a run failed.
"""

from __future__ import annotations


class DSSonError(Exception):
    stage = "pipeline"

    def __init__(
        self,
        message: str,
        *,
        segment_index: int | None = None,
        stage: str | None = None,
    ):
        super().__init__(message)
        self.segment_index = segment_index
        if stage is not None:
            self.stage = stage


class ParameterError(DSSonError, ValueError):
    """Invalid argument value (window length, weight, threshold, ...)."""


class IngestError(DSSonError):
    stage = "ingest"


class ParseError(IngestError):
    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(IngestError):
    pass


class EmptyInputError(IngestError):
    pass


class UnsupportedFormatError(IngestError):
    pass


class DecodeError(IngestError):
    pass


class ConsistencyError(DSSonError):
    """Internal invariant violated (unsorted cuts, negative onsets)."""


class AliasingError(DSSonError):
    stage = "synth"

    def __init__(self, segment_index: int, peak_hz: float, nyquist_hz: float):
        super().__init__(
            f"segment {segment_index}: peak frequency {peak_hz:.1f} Hz "
            f"reaches Nyquist ({nyquist_hz:.1f} Hz)",
            segment_index=segment_index,
        )
        self.peak_hz = peak_hz


class RangeError(DSSonError):
    stage = "mixdown"
