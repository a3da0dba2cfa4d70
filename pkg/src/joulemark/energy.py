"""Energy integration of shunt-voltage traces.

Energy over a window is

    E = (vf / rs) * integral of vs(t) dt

evaluated with the trapezoidal rule over the window's samples, which is
exact whenever vs is affine in t.  A window [begin, end) integrates the
closed sample span begin..end-1, i.e. end-begin-1 trapezoids; adjacent
windows that share a boundary sample therefore telescope exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .trace import MeasurementWindow, PowerTrace, ShuntConfig, downsample


class DegenerateWindowError(ValueError):
    """Window holds fewer than two samples, so no trapezoid exists."""


@dataclass(frozen=True)
class EnergyResult:
    """Energy of one measurement window plus its summary quantities."""

    joules: float
    mean_watts: float
    duration_s: float
    window: MeasurementWindow
    rate_hz: float

    @property
    def begin_s(self) -> float:
        return self.window.begin / self.rate_hz

    @property
    def end_s(self) -> float:
        return self.window.end / self.rate_hz

    def to_json_dict(self) -> dict:
        return {
            "begin_s": self.begin_s,
            "end_s": self.end_s,
            "joules": self.joules,
            "mean_watts": self.mean_watts,
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")


def integrate_energy(
    trace: PowerTrace,
    window: MeasurementWindow,
    shunt: ShuntConfig | None = None,
) -> EnergyResult:
    """Trapezoidal energy of one window; negative samples integrate as-is."""
    if window.end > len(trace):
        raise ValueError(
            f"window [{window.begin}, {window.end}) exceeds trace length {len(trace)}"
        )
    if window.end - window.begin < 2:
        raise DegenerateWindowError(
            f"window [{window.begin}, {window.end}) has fewer than 2 samples"
        )
    shunt = shunt if shunt is not None else trace.shunt
    dt = 1.0 / trace.rate_hz
    segment = trace.vs[window.begin : window.end]
    joules = (shunt.vf / shunt.rs) * float(np.trapezoid(segment, dx=dt))
    duration = window.duration_s(trace.rate_hz)
    return EnergyResult(
        joules=joules,
        mean_watts=joules / duration,
        duration_s=duration,
        window=window,
        rate_hz=trace.rate_hz,
    )


def integrate_full(
    trace: PowerTrace, shunt: ShuntConfig | None = None
) -> EnergyResult:
    """Energy of the whole trace.

    With the relay circuit this relies on idle noise being zero-mean: the
    idle stretches integrate to ~0, so the full-trace integral converges to
    the energy of the active windows alone.
    """
    if len(trace) < 2:
        raise DegenerateWindowError(
            f"trace has {len(trace)} samples; need at least 2"
        )
    return integrate_energy(trace, MeasurementWindow(0, len(trace)), shunt)


@dataclass(frozen=True)
class ResolutionComparison:
    """Energy agreement between a trace and its decimated counterpart."""

    e_hi: float
    e_lo: float
    rel_diff: float
    factor: int

    def to_json_dict(self) -> dict:
        return {
            "e_hi": self.e_hi,
            "e_lo": self.e_lo,
            "rel_diff": self.rel_diff,
            "factor": self.factor,
        }


def compare_resolution(
    hi_res: PowerTrace,
    factor: int,
    window: MeasurementWindow | None = None,
    shunt: ShuntConfig | None = None,
) -> ResolutionComparison:
    """Integrate a window at full rate and after decimation by `factor`.

    Models reading the same signal with a fast and a slow acquisition
    device.  The window is given in hi-res sample indices and must land on
    the decimation grid (begin and end-1 divisible by factor) so both
    devices integrate the same time span.
    """
    if factor < 2:
        raise ValueError(f"decimation factor must be >= 2, got {factor}")
    if window is None:
        window = MeasurementWindow(0, len(hi_res))
    if window.begin % factor != 0 or (window.end - 1) % factor != 0:
        raise ValueError(
            f"window [{window.begin}, {window.end}) is not aligned to the "
            f"decimation grid of factor {factor}"
        )
    lo_window = MeasurementWindow(
        window.begin // factor, (window.end - 1) // factor + 1
    )
    if len(lo_window) < 2:
        raise DegenerateWindowError(
            f"window collapses to {len(lo_window)} sample(s) after decimation"
        )
    lo_res = downsample(hi_res, factor)
    e_hi = integrate_energy(hi_res, window, shunt).joules
    e_lo = integrate_energy(lo_res, lo_window, shunt).joules
    if e_hi == 0.0:
        rel = 0.0 if e_lo == 0.0 else float("inf")
    else:
        rel = abs(e_hi - e_lo) / abs(e_hi)
    return ResolutionComparison(e_hi=e_hi, e_lo=e_lo, rel_diff=rel, factor=factor)
