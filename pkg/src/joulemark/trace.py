"""Trace data model, unit conversions, and trace CSV I/O.

A trace is a uniformly sampled record of the voltage drop across a shunt
resistor, optionally paired with a trigger-channel voltage.  Sample times
are implicit: sample i of a trace sampled at ``rate_hz`` occurred at
``i / rate_hz`` seconds.  Instantaneous power follows from Ohm's law,

    P = vf * vs / rs

where ``vf`` is the (constant) supply voltage, ``rs`` the shunt resistance
and ``vs`` the measured drop across the shunt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import numpy as np

# Writers emit t_s = i / rate_hz; readers re-derive it and must agree to
# within this many seconds.
TIME_GRID_TOLERANCE_S = 1e-9


class TraceFormatError(ValueError):
    """Malformed trace CSV.  ``line`` is the 1-based offending line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class ShuntConfig:
    """Supply voltage (volts) and shunt resistance (ohms) of the circuit.

    Defaults model a 12 V supply fed through a 0.1 ohm shunt.
    """

    vf: float = 12.0
    rs: float = 0.1

    def __post_init__(self):
        if not (math.isfinite(self.vf) and self.vf > 0.0):
            raise ValueError(f"source voltage must be positive, got {self.vf}")
        if not (math.isfinite(self.rs) and self.rs > 0.0):
            raise ValueError(f"shunt resistance must be positive, got {self.rs}")


@dataclass(frozen=True)
class PowerSample:
    """One sample: ordinal index, shunt voltage, optional trigger voltage."""

    index: int
    vs: float
    trig: float | None = None


@dataclass(frozen=True)
class MeasurementWindow:
    """Half-open sample-index interval [begin, end) of active measurement."""

    begin: int
    end: int

    def __post_init__(self):
        if self.begin < 0 or self.end <= self.begin:
            raise ValueError(
                f"window must satisfy 0 <= begin < end, got [{self.begin}, {self.end})"
            )

    def __len__(self) -> int:
        return self.end - self.begin

    def duration_s(self, rate_hz: float) -> float:
        return (self.end - self.begin) / rate_hz


@dataclass(frozen=True, eq=False)
class PowerTrace:
    """Uniformly sampled shunt-voltage (and optional trigger) time series.

    Arrays are normalized to read-only float64 on construction.  Structural
    invariants (positive rate, finite values, matching channel lengths) are
    checked by :func:`validate_trace`, not at construction, so that invalid
    traces can be represented and reported on.
    """

    rate_hz: float
    vs: np.ndarray
    trig: np.ndarray | None = None
    shunt: ShuntConfig = field(default_factory=ShuntConfig)

    def __post_init__(self):
        vs = np.array(self.vs, dtype=np.float64, copy=True).reshape(-1)
        vs.flags.writeable = False
        object.__setattr__(self, "vs", vs)
        if self.trig is not None:
            trig = np.array(self.trig, dtype=np.float64, copy=True).reshape(-1)
            trig.flags.writeable = False
            object.__setattr__(self, "trig", trig)

    @property
    def has_trigger(self) -> bool:
        return self.trig is not None

    @property
    def channels(self) -> int:
        return 2 if self.trig is not None else 1

    def __len__(self) -> int:
        return int(self.vs.shape[0])

    def times_s(self) -> np.ndarray:
        """Sample times in seconds, t_i = i / rate_hz."""
        return np.arange(len(self)) / self.rate_hz

    def power_w(self) -> np.ndarray:
        """Instantaneous power per sample, in watts."""
        return sample_to_power(self.vs, self.shunt)

    def sample(self, i: int) -> PowerSample:
        trig = float(self.trig[i]) if self.trig is not None else None
        return PowerSample(index=i, vs=float(self.vs[i]), trig=trig)

    def itersamples(self) -> Iterator[PowerSample]:
        for i in range(len(self)):
            yield self.sample(i)


def sample_to_power(vs, shunt: ShuntConfig):
    """Convert shunt voltage(s) to watts: P = vf * vs / rs.

    Accepts a scalar or an ndarray and returns the same shape.
    """
    return shunt.vf * vs / shunt.rs


def power_to_shunt_volts(power_w, shunt: ShuntConfig):
    """Inverse of :func:`sample_to_power`: vs = P * rs / vf."""
    return power_w * shunt.rs / shunt.vf


def index_at_or_after(t_s: float, rate_hz: float) -> int:
    """First sample index whose time is >= t_s, robust to float grid noise."""
    return max(0, math.ceil(t_s * rate_hz - 1e-9))


@dataclass(frozen=True)
class TraceViolation:
    message: str
    index: int | None = None

    def __str__(self) -> str:
        if self.index is None:
            return self.message
        return f"sample {self.index}: {self.message}"


@dataclass(frozen=True)
class TraceValidation:
    violations: tuple[TraceViolation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_trace(trace: PowerTrace) -> TraceValidation:
    """Check trace invariants; returns violations instead of raising.

    Checks: non-empty, positive finite rate, finite voltages, and matching
    channel lengths when a trigger channel is present.
    """
    violations: list[TraceViolation] = []
    if len(trace) == 0:
        violations.append(TraceViolation("empty trace"))
    if not (math.isfinite(trace.rate_hz) and trace.rate_hz > 0):
        violations.append(TraceViolation(f"non-positive rate: {trace.rate_hz}"))
    for idx in np.flatnonzero(~np.isfinite(trace.vs)):
        violations.append(TraceViolation("non-finite shunt voltage", index=int(idx)))
    if trace.trig is not None:
        if trace.trig.shape[0] != trace.vs.shape[0]:
            violations.append(
                TraceViolation(
                    f"trigger channel has {trace.trig.shape[0]} samples, "
                    f"shunt channel has {trace.vs.shape[0]}"
                )
            )
        for idx in np.flatnonzero(~np.isfinite(trace.trig)):
            violations.append(
                TraceViolation("non-finite trigger voltage", index=int(idx))
            )
    return TraceValidation(tuple(violations))


def downsample(trace: PowerTrace, factor: int) -> PowerTrace:
    """Keep every factor-th sample starting at index 0; rate divides by factor.

    Pure decimation: no anti-alias filtering is applied.
    """
    if factor < 1:
        raise ValueError(f"decimation factor must be >= 1, got {factor}")
    if factor > len(trace):
        raise ValueError(
            f"decimation factor {factor} exceeds trace length {len(trace)}"
        )
    if factor == 1:
        return trace
    trig = trace.trig[::factor] if trace.trig is not None else None
    return PowerTrace(
        rate_hz=trace.rate_hz / factor,
        vs=trace.vs[::factor],
        trig=trig,
        shunt=trace.shunt,
    )


# --- trace CSV format -------------------------------------------------------
#
# A comment preamble of `# key=value` lines carries rate_hz, vf and rs, then
# a header line `t_s,vs_v` (single channel) or `t_s,vs_v,trig_v` (with
# trigger channel), then one row per sample.  t_s of row i must equal
# i / rate_hz within TIME_GRID_TOLERANCE_S.

_HEADER_1CH = "t_s,vs_v"
_HEADER_2CH = "t_s,vs_v,trig_v"


def write_trace_csv(trace: PowerTrace, path: str | Path) -> None:
    """Write a trace in the canonical CSV format (deterministic bytes)."""
    path = Path(path)
    rate = trace.rate_hz
    with path.open("w", newline="\n") as f:
        f.write(f"# rate_hz={rate!r}\n")
        f.write(f"# vf={trace.shunt.vf!r}\n")
        f.write(f"# rs={trace.shunt.rs!r}\n")
        if trace.trig is not None:
            f.write(_HEADER_2CH + "\n")
            vs, trig = trace.vs.tolist(), trace.trig.tolist()
            for i in range(len(vs)):
                f.write(f"{i / rate!r},{vs[i]!r},{trig[i]!r}\n")
        else:
            f.write(_HEADER_1CH + "\n")
            vs = trace.vs.tolist()
            for i in range(len(vs)):
                f.write(f"{i / rate!r},{vs[i]!r}\n")


def _parse_float(text: str, what: str, line: int) -> float:
    try:
        return float(text)
    except ValueError:
        raise TraceFormatError(f"{what} is not a number: {text!r}", line) from None


def read_trace_csv(path: str | Path) -> PowerTrace:
    """Parse a trace CSV, verifying the preamble, header and time grid."""
    path = Path(path)
    meta: dict[str, float] = {}
    header: str | None = None
    vs: list[float] = []
    trig: list[float] = []
    ncols = 0
    rate = None
    row = 0
    with path.open("r") as f:
        for lineno, raw in enumerate(f, start=1):
            text = raw.rstrip("\n")
            if header is None:
                if text.startswith("#"):
                    body = text[1:].strip()
                    if "=" not in body:
                        raise TraceFormatError(
                            f"preamble line is not 'key=value': {text!r}", lineno
                        )
                    key, value = body.split("=", 1)
                    meta[key.strip()] = _parse_float(
                        value.strip(), f"preamble {key.strip()!r}", lineno
                    )
                    continue
                if text == _HEADER_1CH:
                    ncols = 2
                elif text == _HEADER_2CH:
                    ncols = 3
                else:
                    raise TraceFormatError(f"unrecognized header: {text!r}", lineno)
                for key in ("rate_hz", "vf", "rs"):
                    if key not in meta:
                        raise TraceFormatError(
                            f"preamble is missing '# {key}=...'", lineno
                        )
                rate = meta["rate_hz"]
                if not rate > 0:
                    raise TraceFormatError(f"non-positive rate_hz: {rate}", lineno)
                header = text
                continue
            if not text:
                continue
            parts = text.split(",")
            if len(parts) != ncols:
                raise TraceFormatError(
                    f"expected {ncols} columns, got {len(parts)}", lineno
                )
            t = _parse_float(parts[0], "t_s", lineno)
            expected_t = row / rate
            if abs(t - expected_t) > TIME_GRID_TOLERANCE_S:
                raise TraceFormatError(
                    f"t_s={t!r} deviates from uniform grid value {expected_t!r}",
                    lineno,
                )
            vs.append(_parse_float(parts[1], "vs_v", lineno))
            if ncols == 3:
                trig.append(_parse_float(parts[2], "trig_v", lineno))
            row += 1
    if header is None:
        raise TraceFormatError("file has no header line")
    shunt = ShuntConfig(vf=meta["vf"], rs=meta["rs"])
    return PowerTrace(
        rate_hz=rate,
        vs=np.asarray(vs, dtype=np.float64),
        trig=np.asarray(trig, dtype=np.float64) if ncols == 3 else None,
        shunt=shunt,
    )
