"""Hardware-in-the-loop session synthesis.

Given a GPIO command log and a piecewise workload power profile, build the
trace the acquisition device would have captured under either measurement
circuit, together with per-toggle ground truth: the realized sample window
(or a miss), and the analytic energy of the commanded interval.

Two circuits are modeled.  The relay circuit connects the meter probes
across the shunt only while a measurement is active, so the trace shows
the true shunt voltage inside realized windows and idle noise elsewhere;
actuating the relay costs a fixed latency, and events shorter than the
relay's full-confidence duration are captured only probabilistically.  The
trigger circuit samples the shunt continuously on one channel and the GPIO
logic level on a second channel, halving the per-channel rate but
responding with no actuation delay.

Whether a commanded toggle is captured at all is a Bernoulli draw with
probability given by :func:`hit_probability`: a configurable floor for
near-instant events, rising linearly to certainty at the switching model's
full-confidence duration.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .acquisition import AcquisitionConfig, channel_rate
from .instrument import (
    ACTIVATE,
    DEACTIVATE,
    AlternationError,
    DanglingWindowError,
    GpioCommand,
    GpioCommandLog,
)
from .trace import (
    MeasurementWindow,
    PowerTrace,
    ShuntConfig,
    index_at_or_after,
    power_to_shunt_volts,
)

RELAY = "relay"
TRIGGER = "trigger"
_CIRCUITS = (RELAY, TRIGGER)

# Target CPU max clock; the tight counting loop used for calibration runs
# 3 instructions per iteration at up to one instruction per cycle.
DEFAULT_CLOCK_HZ = 2.3e9
INSTRUCTIONS_PER_LOOP_ITERATION = 3

# Event durations at which each circuit captures every toggle: the relay
# needs ~0.42 ms (975K instructions at 2.3 GHz, matching its ~0.5 ms
# actuation time); the trigger wiring needs only 225K instructions.
RELAY_FULL_CONFIDENCE_INSTRUCTIONS = 975_000
TRIGGER_FULL_CONFIDENCE_INSTRUCTIONS = 225_000

DEFAULT_LOGIC_HIGH_V = 1.8


class ScenarioError(ValueError):
    pass


def instructions_to_duration(
    iterations: float,
    instr_per_iter: float = INSTRUCTIONS_PER_LOOP_ITERATION,
    clock_hz: float = DEFAULT_CLOCK_HZ,
) -> float:
    """Wall time of a counted loop, assuming one instruction per cycle."""
    if not clock_hz > 0:
        raise ValueError(f"clock must be positive, got {clock_hz}")
    return iterations * instr_per_iter / clock_hz


def trigger_hit_threshold(
    instructions: float = TRIGGER_FULL_CONFIDENCE_INSTRUCTIONS,
    clock_hz: float = DEFAULT_CLOCK_HZ,
) -> float:
    """Event duration above which the trigger circuit never misses."""
    if instructions < 0:
        raise ValueError(f"instruction count must be >= 0, got {instructions}")
    if not clock_hz > 0:
        raise ValueError(f"clock must be positive, got {clock_hz}")
    return instructions / clock_hz


RELAY_FULL_CONFIDENCE_S = (
    RELAY_FULL_CONFIDENCE_INSTRUCTIONS / DEFAULT_CLOCK_HZ
)


@dataclass(frozen=True)
class SwitchingModel:
    """Capture behavior of the measurement switch.

    ``floor_hit_prob`` is the capture probability of a near-instant toggle;
    probability rises linearly with event duration and reaches exactly 1.0
    at ``full_confidence_s``.  ``nominal_latency_s`` shifts realized windows
    relative to commanded times (both edges, engage and disengage).
    """

    nominal_latency_s: float = 5.0e-4
    full_confidence_s: float = RELAY_FULL_CONFIDENCE_S
    floor_hit_prob: float = 0.3

    def __post_init__(self):
        if not 0.0 <= self.floor_hit_prob <= 1.0:
            raise ValueError(
                f"floor hit probability must be in [0, 1], got {self.floor_hit_prob}"
            )
        if not self.full_confidence_s > 0:
            raise ValueError(
                f"full-confidence duration must be positive, got {self.full_confidence_s}"
            )
        if self.nominal_latency_s < 0:
            raise ValueError(
                f"latency must be >= 0, got {self.nominal_latency_s}"
            )

    @classmethod
    def relay_default(cls) -> "SwitchingModel":
        return cls()

    @classmethod
    def trigger_default(cls) -> "SwitchingModel":
        # Floor 0.7 reproduces the observed 8/10 capture rate at one third
        # of the trigger's full-confidence duration under the linear model.
        return cls(
            nominal_latency_s=0.0,
            full_confidence_s=trigger_hit_threshold(),
            floor_hit_prob=0.7,
        )

    @classmethod
    def for_circuit(cls, circuit: str) -> "SwitchingModel":
        return cls.relay_default() if circuit == RELAY else cls.trigger_default()


def hit_probability(event_duration_s: float, model: SwitchingModel) -> float:
    """Probability that a toggle of the given duration is captured.

    Deterministic; randomness is applied only inside simulate_session.
    """
    if event_duration_s < 0:
        raise ValueError(f"event duration must be >= 0, got {event_duration_s}")
    if event_duration_s >= model.full_confidence_s:
        return 1.0
    return model.floor_hit_prob + (1.0 - model.floor_hit_prob) * (
        event_duration_s / model.full_confidence_s
    )


@dataclass(frozen=True)
class NoiseModel:
    """Zero-mean idle power noise, uniform on [-bound, +bound] watts."""

    idle_power_bound_w: float = 0.001

    def __post_init__(self):
        if self.idle_power_bound_w < 0:
            raise ValueError(
                f"noise bound must be >= 0, got {self.idle_power_bound_w}"
            )

    def draw_power(self, rng: np.random.Generator, n: int) -> np.ndarray:
        b = self.idle_power_bound_w
        return rng.uniform(-b, b, size=n)

    def integral_standard_error(self, rate_hz: float, n_samples: int) -> float:
        """Analytic standard error of the trapezoidal integral of n noise samples."""
        dt = 1.0 / rate_hz
        sigma = self.idle_power_bound_w / math.sqrt(3.0)
        # endpoint samples carry weight dt/2, interior samples weight dt
        return dt * sigma * math.sqrt(max(n_samples - 1.5, 0.0))


# --- workload profiles ------------------------------------------------------


@dataclass(frozen=True)
class ConstantPower:
    watts: float

    def __post_init__(self):
        if self.watts < 0:
            raise ValueError(f"power must be >= 0, got {self.watts}")

    def power(self, t: np.ndarray, duration: float) -> np.ndarray:
        return np.full_like(t, self.watts)

    def integral(self, a: float, b: float, duration: float) -> float:
        return self.watts * (b - a)


@dataclass(frozen=True)
class RampPower:
    """Linear sweep from w0 at segment start to w1 at segment end."""

    w0: float
    w1: float

    def __post_init__(self):
        if self.w0 < 0 or self.w1 < 0:
            raise ValueError(f"power must be >= 0, got ({self.w0}, {self.w1})")

    def power(self, t: np.ndarray, duration: float) -> np.ndarray:
        return self.w0 + (self.w1 - self.w0) * (t / duration)

    def integral(self, a: float, b: float, duration: float) -> float:
        slope = (self.w1 - self.w0) / duration
        return self.w0 * (b - a) + 0.5 * slope * (b * b - a * a)


@dataclass(frozen=True)
class SpikyPower:
    """Oscillation between base_w and peak_w with the given period.

    P(t) = base_w + (peak_w - base_w) * sin^2(pi t / period); spectral
    content sits at 1/period hertz.
    """

    base_w: float
    peak_w: float
    period_s: float

    def __post_init__(self):
        if not 0 <= self.base_w <= self.peak_w:
            raise ValueError(
                f"need 0 <= base <= peak, got ({self.base_w}, {self.peak_w})"
            )
        if not self.period_s > 0:
            raise ValueError(f"period must be positive, got {self.period_s}")

    def power(self, t: np.ndarray, duration: float) -> np.ndarray:
        amp = self.peak_w - self.base_w
        return self.base_w + amp * np.sin(np.pi * t / self.period_s) ** 2

    def integral(self, a: float, b: float, duration: float) -> float:
        amp = self.peak_w - self.base_w
        T = self.period_s
        osc = (b - a) / 2.0 - (T / (4.0 * math.pi)) * (
            math.sin(2.0 * math.pi * b / T) - math.sin(2.0 * math.pi * a / T)
        )
        return self.base_w * (b - a) + amp * osc


PowerShape = ConstantPower | RampPower | SpikyPower


@dataclass(frozen=True)
class WorkloadSegment:
    start_s: float
    end_s: float
    shape: PowerShape

    def __post_init__(self):
        if not self.end_s > self.start_s >= 0:
            raise ValueError(
                f"segment must satisfy 0 <= start < end, "
                f"got [{self.start_s}, {self.end_s}]"
            )


@dataclass(frozen=True)
class WorkloadProfile:
    """Piecewise power profile; zero watts outside all segments."""

    segments: tuple[WorkloadSegment, ...] = ()

    def __post_init__(self):
        ordered = tuple(sorted(self.segments, key=lambda s: s.start_s))
        for prev, cur in zip(ordered, ordered[1:]):
            if cur.start_s < prev.end_s:
                raise ValueError(
                    f"workload segments overlap: [{prev.start_s}, {prev.end_s}] "
                    f"and [{cur.start_s}, {cur.end_s}]"
                )
        object.__setattr__(self, "segments", ordered)

    @classmethod
    def constant(cls, watts: float, start_s: float, end_s: float) -> "WorkloadProfile":
        return cls((WorkloadSegment(start_s, end_s, ConstantPower(watts)),))

    def power_at(self, t: np.ndarray) -> np.ndarray:
        """Vectorized instantaneous power; segments are half-open [start, end)."""
        t = np.asarray(t, dtype=np.float64)
        out = np.zeros_like(t)
        for seg in self.segments:
            mask = (t >= seg.start_s) & (t < seg.end_s)
            if mask.any():
                out[mask] = seg.shape.power(
                    t[mask] - seg.start_s, seg.end_s - seg.start_s
                )
        return out

    def integral(self, a: float, b: float) -> float:
        """Exact integral of the profile over [a, b], in joules."""
        if b < a:
            raise ValueError(f"need a <= b, got [{a}, {b}]")
        total = 0.0
        for seg in self.segments:
            lo = max(a, seg.start_s)
            hi = min(b, seg.end_s)
            if hi > lo:
                total += seg.shape.integral(
                    lo - seg.start_s, hi - seg.start_s, seg.end_s - seg.start_s
                )
        return total


# --- scenario ---------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    duration_s: float
    circuit: str
    config: AcquisitionConfig
    workload: WorkloadProfile
    gpio: GpioCommandLog
    shunt: ShuntConfig = field(default_factory=ShuntConfig)
    switching: SwitchingModel = field(default_factory=SwitchingModel)
    noise: NoiseModel = field(default_factory=NoiseModel)
    logic_high_v: float = DEFAULT_LOGIC_HIGH_V
    seed: int = 0

    @classmethod
    def create(
        cls,
        duration_s: float,
        circuit: str,
        workload: WorkloadProfile,
        gpio: GpioCommandLog,
        *,
        aggregate_rate_hz: float = 40_000.0,
        shunt: ShuntConfig | None = None,
        switching: SwitchingModel | None = None,
        noise: NoiseModel | None = None,
        logic_high_v: float = DEFAULT_LOGIC_HIGH_V,
        seed: int = 0,
    ) -> "Scenario":
        """Build a scenario with the channel layout implied by the circuit."""
        if circuit not in _CIRCUITS:
            raise ScenarioError(f"circuit must be one of {_CIRCUITS}, got {circuit!r}")
        config = AcquisitionConfig(
            aggregate_rate_hz=aggregate_rate_hz,
            channels=1 if circuit == RELAY else 2,
        )
        return cls(
            duration_s=duration_s,
            circuit=circuit,
            config=config,
            workload=workload,
            gpio=gpio,
            shunt=shunt if shunt is not None else ShuntConfig(),
            switching=(
                switching
                if switching is not None
                else SwitchingModel.for_circuit(circuit)
            ),
            noise=noise if noise is not None else NoiseModel(),
            logic_high_v=logic_high_v,
            seed=seed,
        )

    def validate(self) -> None:
        if self.circuit not in _CIRCUITS:
            raise ScenarioError(
                f"circuit must be one of {_CIRCUITS}, got {self.circuit!r}"
            )
        if not self.duration_s > 0:
            raise ScenarioError(f"duration must be positive, got {self.duration_s}")
        expected_channels = 1 if self.circuit == RELAY else 2
        if self.config.channels != expected_channels:
            raise ScenarioError(
                f"{self.circuit} circuit requires {expected_channels} channel(s), "
                f"config has {self.config.channels}"
            )
        for i, cmd in enumerate(self.gpio.entries):
            if not 0.0 <= cmd.t_s <= self.duration_s:
                raise ScenarioError(
                    f"gpio entry {i} ({cmd.action} port {cmd.port} at "
                    f"t={cmd.t_s}s) lies outside [0, {self.duration_s}]s"
                )
        pairs = self.gpio.windows()
        for (a_on, a_off, a_port), (b_on, b_off, b_port) in zip(pairs, pairs[1:]):
            if b_on < a_off:
                raise ScenarioError(
                    f"measurement windows overlap: port {a_port} "
                    f"[{a_on}, {a_off}]s and port {b_port} [{b_on}, {b_off}]s "
                    f"(one circuit cannot serve overlapping windows)"
                )
        for seg in self.workload.segments:
            if seg.end_s > self.duration_s:
                raise ScenarioError(
                    f"workload segment [{seg.start_s}, {seg.end_s}]s extends "
                    f"past the {self.duration_s}s session"
                )
        if self.seed < 0:
            raise ScenarioError(f"seed must be >= 0, got {self.seed}")

    def with_seed(self, seed: int) -> "Scenario":
        return replace(self, seed=seed)


@dataclass(frozen=True)
class GroundTruthEntry:
    """What one commanded toggle pair actually did."""

    port: int
    begin_s: float
    end_s: float
    hit: bool
    realized: MeasurementWindow | None
    true_joules: float

    def to_json_dict(self) -> dict:
        return {
            "port": self.port,
            "begin_s": self.begin_s,
            "end_s": self.end_s,
            "hit": self.hit,
            "realized": (
                [self.realized.begin, self.realized.end] if self.realized else None
            ),
            "true_joules": self.true_joules,
        }


@dataclass(frozen=True)
class GroundTruth:
    rate_hz: float
    seed: int
    entries: tuple[GroundTruthEntry, ...]

    @property
    def hits(self) -> int:
        return sum(1 for e in self.entries if e.hit)

    @property
    def misses(self) -> int:
        return len(self.entries) - self.hits

    def realized_windows(self) -> list[MeasurementWindow]:
        return [e.realized for e in self.entries if e.realized is not None]

    def to_json_dict(self) -> dict:
        return {
            "rate_hz": self.rate_hz,
            "seed": self.seed,
            "entries": [e.to_json_dict() for e in self.entries],
        }

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), indent=2) + "\n")


def simulate_session(scenario: Scenario) -> tuple[PowerTrace, GroundTruth]:
    """Synthesize the acquired trace and per-toggle ground truth.

    Deterministic for a given scenario (the RNG is seeded from it); draw
    order is fixed: one hit draw per toggle pair in time order, then the
    idle-noise array for relay sessions.
    """
    scenario.validate()
    rate = channel_rate(scenario.config)
    n = int(round(scenario.duration_s * rate))
    if n < 1:
        raise ScenarioError(
            f"session of {scenario.duration_s}s at {rate}Hz has no samples"
        )
    rng = np.random.default_rng(scenario.seed)
    t = np.arange(n) / rate
    power_true = scenario.workload.power_at(t)
    vs_true = power_to_shunt_volts(power_true, scenario.shunt)

    latency = scenario.switching.nominal_latency_s
    entries: list[GroundTruthEntry] = []
    for t_on, t_off, port in scenario.gpio.windows():
        p_hit = hit_probability(t_off - t_on, scenario.switching)
        hit = bool(rng.random() < p_hit)
        realized = None
        if hit:
            b = index_at_or_after(t_on + latency, rate)
            e = min(index_at_or_after(t_off + latency, rate), n)
            if e - b >= 1:
                realized = MeasurementWindow(b, e)
        entries.append(
            GroundTruthEntry(
                port=port,
                begin_s=t_on,
                end_s=t_off,
                hit=hit,
                realized=realized,
                true_joules=scenario.workload.integral(t_on, t_off),
            )
        )

    realized_windows = [e.realized for e in entries if e.realized is not None]
    if scenario.circuit == RELAY:
        # idle: probes read the same node, so only noise reaches the DAQ
        vs = power_to_shunt_volts(
            scenario.noise.draw_power(rng, n), scenario.shunt
        )
        for w in realized_windows:
            vs[w.begin : w.end] = vs_true[w.begin : w.end]
        trace = PowerTrace(rate_hz=rate, vs=vs, trig=None, shunt=scenario.shunt)
    else:
        trig = np.zeros(n)
        for w in realized_windows:
            trig[w.begin : w.end] = scenario.logic_high_v
        trace = PowerTrace(
            rate_hz=rate, vs=vs_true, trig=trig, shunt=scenario.shunt
        )
    truth = GroundTruth(rate_hz=rate, seed=scenario.seed, entries=tuple(entries))
    return trace, truth


def repeated_toggle_scenario(
    event_duration_s: float,
    tries: int,
    circuit: str,
    *,
    gap_s: float = 2e-3,
    power_w: float = 12.0,
    aggregate_rate_hz: float = 40_000.0,
    port: int = 40,
    switching: SwitchingModel | None = None,
    noise: NoiseModel | None = None,
    seed: int = 0,
) -> Scenario:
    """Scenario toggling one port `tries` times with equal event durations.

    Used for capture-rate experiments: a constant workload runs for the
    whole session and each activate/deactivate pair brackets an event of
    ``event_duration_s``.
    """
    if tries < 1:
        raise ValueError(f"tries must be >= 1, got {tries}")
    if event_duration_s < 0:
        raise ValueError(f"event duration must be >= 0, got {event_duration_s}")
    cmds: list[GpioCommand] = []
    cursor = gap_s
    for _ in range(tries):
        cmds.append(GpioCommand(cursor, port, ACTIVATE))
        cmds.append(GpioCommand(cursor + event_duration_s, port, DEACTIVATE))
        cursor += event_duration_s + gap_s
    duration = cursor + gap_s
    return Scenario.create(
        duration_s=duration,
        circuit=circuit,
        workload=WorkloadProfile.constant(power_w, 0.0, duration),
        gpio=GpioCommandLog(tuple(cmds)),
        aggregate_rate_hz=aggregate_rate_hz,
        switching=switching,
        noise=noise,
        seed=seed,
    )


# --- scenario JSON ----------------------------------------------------------


def _field(obj: dict, key: str, path: str, required: bool = True, default=None):
    if key not in obj:
        if required:
            raise ScenarioError(f"{path}.{key}: missing required field")
        return default
    return obj[key]


def _number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ScenarioError(f"{path}: expected a number, got {value!r}")
    return float(value)


def _integer(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(f"{path}: expected an integer, got {value!r}")
    return value


def _parse_shape(obj: dict, path: str) -> PowerShape:
    kind = _field(obj, "shape", path)
    try:
        if kind == "constant":
            return ConstantPower(watts=_number(_field(obj, "watts", path), f"{path}.watts"))
        if kind == "ramp":
            return RampPower(
                w0=_number(_field(obj, "w0", path), f"{path}.w0"),
                w1=_number(_field(obj, "w1", path), f"{path}.w1"),
            )
        if kind == "spiky":
            return SpikyPower(
                base_w=_number(_field(obj, "base_w", path), f"{path}.base_w"),
                peak_w=_number(_field(obj, "peak_w", path), f"{path}.peak_w"),
                period_s=_number(_field(obj, "period_s", path), f"{path}.period_s"),
            )
    except ValueError as exc:
        raise ScenarioError(f"{path}: {exc}") from None
    raise ScenarioError(
        f"{path}.shape: expected constant|ramp|spiky, got {kind!r}"
    )


def scenario_from_dict(obj: dict, path: str = "$") -> Scenario:
    if not isinstance(obj, dict):
        raise ScenarioError(f"{path}: expected an object")
    duration = _number(_field(obj, "duration_s", path), f"{path}.duration_s")
    circuit = _field(obj, "circuit", path)
    if circuit not in _CIRCUITS:
        raise ScenarioError(
            f"{path}.circuit: expected relay|trigger, got {circuit!r}"
        )
    rate = _number(
        _field(obj, "aggregate_rate_hz", path, required=False, default=40_000.0),
        f"{path}.aggregate_rate_hz",
    )
    shunt_obj = _field(obj, "shunt", path, required=False, default={})
    if not isinstance(shunt_obj, dict):
        raise ScenarioError(f"{path}.shunt: expected an object")
    try:
        shunt = ShuntConfig(
            vf=_number(shunt_obj.get("vf", 12.0), f"{path}.shunt.vf"),
            rs=_number(shunt_obj.get("rs", 0.1), f"{path}.shunt.rs"),
        )
    except ValueError as exc:
        raise ScenarioError(f"{path}.shunt: {exc}") from None

    workload_obj = _field(obj, "workload", path, required=False, default=[])
    if not isinstance(workload_obj, list):
        raise ScenarioError(f"{path}.workload: expected an array")
    segments = []
    for i, seg in enumerate(workload_obj):
        seg_path = f"{path}.workload[{i}]"
        if not isinstance(seg, dict):
            raise ScenarioError(f"{seg_path}: expected an object")
        try:
            segments.append(
                WorkloadSegment(
                    start_s=_number(_field(seg, "start_s", seg_path), f"{seg_path}.start_s"),
                    end_s=_number(_field(seg, "end_s", seg_path), f"{seg_path}.end_s"),
                    shape=_parse_shape(seg, seg_path),
                )
            )
        except ValueError as exc:
            raise ScenarioError(f"{seg_path}: {exc}") from None
    try:
        workload = WorkloadProfile(tuple(segments))
    except ValueError as exc:
        raise ScenarioError(f"{path}.workload: {exc}") from None

    gpio_obj = _field(obj, "gpio", path, required=False, default=[])
    if not isinstance(gpio_obj, list):
        raise ScenarioError(f"{path}.gpio: expected an array")
    cmds = []
    for i, entry in enumerate(gpio_obj):
        cmd_path = f"{path}.gpio[{i}]"
        if not isinstance(entry, dict):
            raise ScenarioError(f"{cmd_path}: expected an object")
        action = _field(entry, "action", cmd_path)
        if action not in (ACTIVATE, DEACTIVATE):
            raise ScenarioError(
                f"{cmd_path}.action: expected activate|deactivate, got {action!r}"
            )
        try:
            cmds.append(
                GpioCommand(
                    t_s=_number(_field(entry, "t_s", cmd_path), f"{cmd_path}.t_s"),
                    port=_integer(_field(entry, "port", cmd_path), f"{cmd_path}.port"),
                    action=action,
                )
            )
        except ValueError as exc:
            raise ScenarioError(f"{cmd_path}: {exc}") from None

    switching = None
    sw = _field(obj, "switching", path, required=False)
    if sw is not None:
        if not isinstance(sw, dict):
            raise ScenarioError(f"{path}.switching: expected an object")
        defaults = SwitchingModel.for_circuit(circuit)
        try:
            switching = SwitchingModel(
                nominal_latency_s=_number(
                    sw.get("nominal_latency_s", defaults.nominal_latency_s),
                    f"{path}.switching.nominal_latency_s",
                ),
                full_confidence_s=_number(
                    sw.get("full_confidence_s", defaults.full_confidence_s),
                    f"{path}.switching.full_confidence_s",
                ),
                floor_hit_prob=_number(
                    sw.get("floor_hit_prob", defaults.floor_hit_prob),
                    f"{path}.switching.floor_hit_prob",
                ),
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}.switching: {exc}") from None

    noise = None
    nz = _field(obj, "noise", path, required=False)
    if nz is not None:
        if not isinstance(nz, dict):
            raise ScenarioError(f"{path}.noise: expected an object")
        try:
            noise = NoiseModel(
                idle_power_bound_w=_number(
                    _field(nz, "idle_power_bound_w", f"{path}.noise"),
                    f"{path}.noise.idle_power_bound_w",
                )
            )
        except ValueError as exc:
            raise ScenarioError(f"{path}.noise: {exc}") from None

    scenario = Scenario.create(
        duration_s=duration,
        circuit=circuit,
        workload=workload,
        gpio=GpioCommandLog(tuple(cmds)),
        aggregate_rate_hz=rate,
        shunt=shunt,
        switching=switching,
        noise=noise,
        logic_high_v=_number(
            _field(obj, "logic_high_v", path, required=False, default=DEFAULT_LOGIC_HIGH_V),
            f"{path}.logic_high_v",
        ),
        seed=_integer(_field(obj, "seed", path), f"{path}.seed"),
    )
    try:
        scenario.validate()
    except (AlternationError, DanglingWindowError) as exc:
        raise ScenarioError(f"{path}.gpio: {exc}") from None
    return scenario


def scenario_to_dict(scenario: Scenario) -> dict:
    def shape_dict(shape: PowerShape) -> dict:
        if isinstance(shape, ConstantPower):
            return {"shape": "constant", "watts": shape.watts}
        if isinstance(shape, RampPower):
            return {"shape": "ramp", "w0": shape.w0, "w1": shape.w1}
        return {
            "shape": "spiky",
            "base_w": shape.base_w,
            "peak_w": shape.peak_w,
            "period_s": shape.period_s,
        }

    return {
        "duration_s": scenario.duration_s,
        "circuit": scenario.circuit,
        "aggregate_rate_hz": scenario.config.aggregate_rate_hz,
        "shunt": {"vf": scenario.shunt.vf, "rs": scenario.shunt.rs},
        "workload": [
            {"start_s": seg.start_s, "end_s": seg.end_s, **shape_dict(seg.shape)}
            for seg in scenario.workload.segments
        ],
        "gpio": [
            {"t_s": c.t_s, "port": c.port, "action": c.action}
            for c in scenario.gpio.entries
        ],
        "switching": {
            "nominal_latency_s": scenario.switching.nominal_latency_s,
            "full_confidence_s": scenario.switching.full_confidence_s,
            "floor_hit_prob": scenario.switching.floor_hit_prob,
        },
        "noise": {"idle_power_bound_w": scenario.noise.idle_power_bound_w},
        "logic_high_v": scenario.logic_high_v,
        "seed": scenario.seed,
    }


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: not valid JSON: {exc}") from None
    return scenario_from_dict(obj)


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")
