"""Batch command line front-end.

Parameter precedence: preset defaults, then the config file (``--config`` or
``$DSSON_CONFIG``), then command-line flags.

Exit codes: 0 success, 1 pipeline error, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import dataclasses
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Sequence

from .errors import DSSonError
from .ingest import DEFAULT_FULL_SCALE, TimeSeries, load_csv, load_wav_pcm16
from .mixdown import normalize, read_wav, schedule_and_sum, spectrogram_png, write_wav
from .models import (
    MODELS,
    SonificationParams,
    analyze_segments,
    classify_segment,
    detect_flat_tops,
    preset,
    render_model,
)
from .testdata import PROFILES, synthesize_session, write_session

log = logging.getLogger("dsson")

CONFIG_ENV = "DSSON_CONFIG"
PARAM_FIELDS = {f.name: f for f in dataclasses.fields(SonificationParams) if f.name != "model"}
_CASTS = {"float": float, "int": int, "str": str}
RUN_KEYS = {
    "input": str,
    "input_kind": str,
    "sample_rate_hz": float,
    "full_scale": float,
    "out": str,
    "png": str,
    "report": str,
    "bit_depth": str,
    "workers": int,
    "model": str,
}


class UsageError(Exception):
    def __init__(self, message: str, stage: str = "usage"):
        super().__init__(message)
        self.stage = stage


@dataclass
class RunConfig:
    params: SonificationParams
    input: Path | None = None
    input_kind: str | None = None
    sample_rate_hz: float | None = None
    full_scale: float = DEFAULT_FULL_SCALE
    out: Path | None = None
    png: Path | None = None
    report: Path | None = None
    bit_depth: str = "16"
    workers: int = 1


def read_config_file(path: str | os.PathLike) -> dict[str, Any]:
    """Parse ``key = value`` lines; ``#`` starts a comment, keys may use dashes."""
    values: dict[str, Any] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}", stage="config") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'", stage="config")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key in PARAM_FIELDS:
            cast = _CASTS[str(PARAM_FIELDS[key].type)]
        elif key in RUN_KEYS:
            cast = RUN_KEYS[key]
        else:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}", stage="config")
        try:
            values[key] = cast(raw)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value {raw!r} for {key}", stage="config") from None
    return values


def build_run_config(args: argparse.Namespace) -> RunConfig:
    config_path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    file_values = read_config_file(config_path) if config_path else {}
    flag_values = {k: v for k, v in vars(args).items() if v is not None}
    merged = {**file_values, **flag_values}

    model = merged.get("model", "basic")
    overrides = {k: merged[k] for k in PARAM_FIELDS if k in merged}
    params = preset(model, **overrides)

    def path(key: str) -> Path | None:
        return Path(merged[key]) if merged.get(key) else None

    return RunConfig(
        params=params,
        input=path("input"),
        input_kind=merged.get("input_kind"),
        sample_rate_hz=merged.get("sample_rate_hz"),
        full_scale=merged.get("full_scale", DEFAULT_FULL_SCALE),
        out=path("out"),
        png=path("png"),
        report=path("report"),
        bit_depth=merged.get("bit_depth", "16"),
        workers=merged.get("workers", 1),
    )


@contextlib.contextmanager
def stage(name: str) -> Iterator[None]:
    """Tag errors raised inside the block with the pipeline stage ``name``."""
    try:
        yield
    except DSSonError as exc:
        if exc.stage == "pipeline":
            exc.stage = name
        raise
    except OSError as exc:
        raise UsageError(str(exc), stage=name) from exc


def load_input(cfg: RunConfig) -> TimeSeries:
    if cfg.input is None:
        raise UsageError("no input file given (--input)", stage="ingest")
    with stage("ingest"):
        if not cfg.input.exists():
            raise UsageError(f"input file not found: {cfg.input}", stage="ingest")
        kind = cfg.input_kind or ("wav" if cfg.input.suffix.lower() == ".wav" else "csv")
        if kind == "wav":
            return load_wav_pcm16(cfg.input, cfg.full_scale)
        if kind == "csv":
            return load_csv(cfg.input, cfg.sample_rate_hz)
        raise UsageError(f"unknown input kind {kind!r}", stage="ingest")


def cmd_render(cfg: RunConfig) -> None:
    if cfg.out is None:
        raise UsageError("render needs an output path (--out)")
    ts = load_input(cfg)
    params = cfg.params
    with stage("synth"):
        events = render_model(ts, params, workers=cfg.workers)
    rate = params.playback_rate_hz if params.model == "audify" else params.audio_rate_hz
    with stage("mixdown"):
        mix = normalize(schedule_and_sum(events, rate), params.peak_dbfs)
        write_wav(mix, cfg.out, cfg.bit_depth)
        if cfg.png is not None:
            spectrogram_png(mix, cfg.png)
    log.info("wrote %s (%.3f s, %d events)", cfg.out, mix.duration_s, len(events))


REPORT_COLUMNS = [
    "record", "index", "start_time_s", "duration_s", "polarity",
    "max_mag", "area", "trend_at_start", "flag",
]


def analysis_rows(ts: TimeSeries, params: SonificationParams) -> list[list[str]]:
    """Segment table, then excursion rows, then flat tops."""
    ts, _, segments = analyze_segments(ts, params)

    def f(x: float) -> str:
        return f"{x:.6f}"

    rows = []
    for seg in segments:
        rows.append([
            "segment", str(seg.index), f(seg.start_time_s), f(seg.duration_s), seg.polarity,
            f(seg.max_mag), f(seg.area), f(seg.trend_at_start), "null" if seg.is_null else "",
        ])
    for seg in segments:
        kind = classify_segment(seg, params.limits)
        if kind != "normal":
            rows.append([kind, str(seg.index), f(seg.start_time_s), f(seg.duration_s),
                         seg.polarity, f(seg.max_mag), "", "", ""])
        if seg.max_mag >= params.theta:
            rows.append(["deviation", str(seg.index), f(seg.start_time_s), f(seg.duration_s),
                         seg.polarity, f(seg.max_mag), "", "", ""])
    for start, duration in detect_flat_tops(ts):
        rows.append(["flat_top", "", f(start), f(duration), "", "", "", "", ""])
    return rows


def cmd_analyze(cfg: RunConfig) -> None:
    ts = load_input(cfg)
    with stage("analyze"):
        rows = analysis_rows(ts, cfg.params)
    with stage("report"):
        if cfg.report is None:
            writer = csv.writer(sys.stdout, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            writer.writerows(rows)
            return
        with open(cfg.report, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(REPORT_COLUMNS)
            writer.writerows(rows)


def cmd_spectrogram(args: argparse.Namespace) -> None:
    with stage("ingest"):
        if not Path(args.input).exists():
            raise UsageError(f"input file not found: {args.input}", stage="ingest")
        audio = read_wav(args.input)
    with stage("spectrogram"):
        spectrogram_png(audio, args.out, args.window_s, args.overlap, args.max_freq_hz)


def cmd_synthesize_test_data(args: argparse.Namespace) -> None:
    with stage("synthesize"):
        session = synthesize_session(args.profile, args.seed, args.duration_s, args.sample_rate_hz)
        write_session(session, args.out)


def _add_param_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sonification parameters (override preset and config)")
    g.add_argument("--model", choices=MODELS, default=None, help="preset: %(choices)s")
    for name, fld in PARAM_FIELDS.items():
        g.add_argument(
            "--" + name.replace("_", "-"),
            dest=name,
            type=_CASTS[str(fld.type)],
            default=None,
            metavar=name.upper(),
        )


def _add_input_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help=f"key = value file (default ${CONFIG_ENV})")
    p.add_argument("--input", "-i", default=None)
    p.add_argument("--input-kind", choices=("csv", "wav"), default=None)
    p.add_argument("--sample-rate-hz", type=float, default=None,
                   help="rate of a single-column CSV")
    p.add_argument("--full-scale", type=float, default=None,
                   help=f"data value of WAV full scale (default {DEFAULT_FULL_SCALE})")
    p.add_argument("--workers", type=int, default=None, help="parallel synthesis threads")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dsson", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="sonify a data file to WAV")
    _add_input_flags(p)
    p.add_argument("--out", "-o", default=None)
    p.add_argument("--png", default=None, help="also write a spectrogram")
    p.add_argument("--bit-depth", choices=("16", "32float"), default=None)
    _add_param_flags(p)

    p = sub.add_parser("analyze", help="segment table, excursions and flat tops as CSV")
    _add_input_flags(p)
    p.add_argument("--report", "-o", default=None, help="CSV path (default stdout)")
    _add_param_flags(p)

    p = sub.add_parser("spectrogram", help="PNG spectrogram of a WAV file")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--out", "-o", required=True)
    p.add_argument("--window-s", type=float, default=0.023)
    p.add_argument("--overlap", type=float, default=0.75)
    p.add_argument("--max-freq-hz", type=float, default=4000.0)

    p = sub.add_parser("synthesize-test-data", help="write a synthetic session CSV")
    p.add_argument("--profile", choices=PROFILES, default="steady")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--duration-s", type=float, default=60.0)
    p.add_argument("--sample-rate-hz", type=float, default=100.0)
    p.add_argument("--out", "-o", required=True)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="dsson: %(message)s",
    )
    command = args.command
    try:
        if command == "spectrogram":
            cmd_spectrogram(args)
        elif command == "synthesize-test-data":
            cmd_synthesize_test_data(args)
        else:
            fields = {k: v for k, v in vars(args).items() if k not in ("command", "verbose")}
            with stage("config"):
                cfg = build_run_config(argparse.Namespace(**fields))
            if command == "render":
                cmd_render(cfg)
            else:
                cmd_analyze(cfg)
    except UsageError as exc:
        print(f"dsson: error in stage '{exc.stage}': {exc}", file=sys.stderr)
        return 2
    except DSSonError as exc:
        where = f"stage '{exc.stage}'"
        if exc.segment_index is not None:
            where += f", segment {exc.segment_index}"
        print(f"dsson: error in {where}: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
