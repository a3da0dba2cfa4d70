"""Measurement-window recovery from captured traces.

Relay-circuit traces read ~0 V while the circuit is idle, so windows are
maximal runs of above-threshold power; run-length filtering provides the
hysteresis.  Trigger-circuit traces carry the GPIO logic level on a second
channel, so windows are simply the high-runs of that channel.
Recovered windows can then be matched against the commanded toggle log to
classify each expected toggle as a hit or a miss.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instrument import GpioCommandLog
from .trace import MeasurementWindow, PowerTrace


class WrongModeError(ValueError):
    """Trace channel layout does not match the requested segmentation mode."""


class TraceTruncationWarning(UserWarning):
    """The trace ended while the trigger channel was still high."""


@dataclass(frozen=True)
class SegmentationParams:
    """Thresholds for window recovery.

    relay_threshold_w defaults to 5x the documented idle-noise bound so
    bounded noise can never cross it; min_window_samples provides run-length
    hysteresis for the relay mode.
    """

    relay_threshold_w: float = 0.005
    min_window_samples: int = 4
    trigger_logic_threshold_v: float = 0.9

    def __post_init__(self):
        if not self.relay_threshold_w > 0:
            raise ValueError(
                f"relay threshold must be positive, got {self.relay_threshold_w}"
            )
        if self.min_window_samples < 1:
            raise ValueError(
                f"min window length must be >= 1, got {self.min_window_samples}"
            )


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Maximal [start, end) runs of True in a boolean array."""
    padded = np.concatenate(([False], mask, [False]))
    edges = np.diff(padded.astype(np.int8))
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1)
    return list(zip(starts.tolist(), ends.tolist()))


def segment_relay(
    trace: PowerTrace, params: SegmentationParams | None = None
) -> list[MeasurementWindow]:
    """Windows of a relay-circuit (single-channel) trace.

    A window is a maximal run of samples with |power| >= relay_threshold_w;
    runs separated by fewer than min_window_samples of idle are merged, and
    runs shorter than min_window_samples are dropped.
    """
    params = params if params is not None else SegmentationParams()
    if trace.has_trigger:
        raise WrongModeError(
            "relay segmentation expects a single-channel trace; "
            "this trace has a trigger channel"
        )
    active = np.abs(trace.power_w()) >= params.relay_threshold_w
    runs = _runs(active)
    merged: list[tuple[int, int]] = []
    for start, end in runs:
        if merged and start - merged[-1][1] < params.min_window_samples:
            merged[-1] = (merged[-1][0], end)
        else:
            merged.append((start, end))
    return [
        MeasurementWindow(start, end)
        for start, end in merged
        if end - start >= params.min_window_samples
    ]


def segment_trigger(
    trace: PowerTrace, params: SegmentationParams | None = None
) -> list[MeasurementWindow]:
    """Windows of a trigger-circuit (two-channel) trace.

    The trigger channel is binarized at trigger_logic_threshold_v; every
    maximal high-run becomes one window.  A trace ending mid-high-run emits
    a TraceTruncationWarning and the window is closed at the trace end.
    """
    params = params if params is not None else SegmentationParams()
    if not trace.has_trigger:
        raise WrongModeError(
            "trigger segmentation expects a two-channel trace; "
            "this trace has no trigger channel"
        )
    high = trace.trig >= params.trigger_logic_threshold_v
    if len(high) and high[-1]:
        warnings.warn(
            "trace ends mid-window; final window truncated at trace end",
            TraceTruncationWarning,
            stacklevel=2,
        )
    return [MeasurementWindow(start, end) for start, end in _runs(high)]


@dataclass(frozen=True)
class ToggleVerdict:
    """One commanded toggle pair and the window (if any) it matched."""

    port: int
    begin_s: float
    end_s: float
    hit: bool
    window_index: int | None

    def to_json_dict(self) -> dict:
        return {
            "port": self.port,
            "begin_s": self.begin_s,
            "end_s": self.end_s,
            "hit": self.hit,
            "window_index": self.window_index,
        }


@dataclass(frozen=True)
class HitMissReport:
    expected: int
    hits: int
    misses: int
    verdicts: tuple[ToggleVerdict, ...]

    def to_json_dict(self) -> dict:
        return {
            "expected": self.expected,
            "hits": self.hits,
            "misses": self.misses,
            "verdicts": [v.to_json_dict() for v in self.verdicts],
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")


def match_toggles(
    intended: GpioCommandLog,
    found: list[MeasurementWindow],
    rate_hz: float,
    tolerance_s: float = 1e-3,
) -> HitMissReport:
    """Greedy in-order matching of commanded toggles to recovered windows.

    Each commanded pair matches the earliest unmatched window whose start
    lies within tolerance_s of the commanded start (the default covers
    twice the relay actuation latency).  Unmatched pairs are misses.
    """
    pairs = intended.windows()
    taken = [False] * len(found)
    verdicts: list[ToggleVerdict] = []
    for t_on, t_off, port in pairs:
        matched = None
        for i, w in enumerate(found):
            if taken[i]:
                continue
            if abs(w.begin / rate_hz - t_on) <= tolerance_s:
                matched = i
                taken[i] = True
                break
        verdicts.append(
            ToggleVerdict(
                port=port,
                begin_s=t_on,
                end_s=t_off,
                hit=matched is not None,
                window_index=matched,
            )
        )
    hits = sum(1 for v in verdicts if v.hit)
    return HitMissReport(
        expected=len(pairs),
        hits=hits,
        misses=len(pairs) - hits,
        verdicts=tuple(verdicts),
    )


def write_windows_csv(
    windows: list[MeasurementWindow], rate_hz: float, path: str | Path
) -> None:
    """Serialize windows as `begin_idx,end_idx,begin_s,end_s` rows."""
    path = Path(path)
    with path.open("w", newline="\n") as f:
        f.write("begin_idx,end_idx,begin_s,end_s\n")
        for w in windows:
            f.write(
                f"{w.begin},{w.end},{w.begin / rate_hz!r},{w.end / rate_hz!r}\n"
            )
