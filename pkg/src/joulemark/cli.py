"""Command-line front end: simulate sessions, analyze traces, run repeated
campaigns, summarize joule lists, and lint inputs.

Exit codes: 0 success (including analyses that find no windows), 1 usage
error, 2 data or validation error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from .energy import EnergyResult, integrate_energy
from .instrument import DanglingWindowError, GpioCommandLog
from .segment import (
    HitMissReport,
    SegmentationParams,
    TraceTruncationWarning,
    match_toggles,
    segment_relay,
    segment_trigger,
)
from .simulate import RELAY, TRIGGER, load_scenario, simulate_session
from .stats import CampaignSummary, summarize_campaign
from .trace import PowerTrace, ShuntConfig, read_trace_csv, validate_trace, write_trace_csv


@dataclass
class SessionReport:
    """Everything one analysis produced, self-describing enough to rerun."""

    mode: str
    rate_hz: float
    shunt: ShuntConfig
    params: SegmentationParams
    match_tolerance_s: float
    results: list[EnergyResult] = field(default_factory=list)
    hit_miss: HitMissReport | None = None
    campaign: CampaignSummary | None = None
    warnings: list[str] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "rate_hz": self.rate_hz,
            "shunt": {"vf": self.shunt.vf, "rs": self.shunt.rs},
            "params": {
                "relay_threshold_w": self.params.relay_threshold_w,
                "min_window_samples": self.params.min_window_samples,
                "trigger_logic_threshold_v": self.params.trigger_logic_threshold_v,
                "match_tolerance_s": self.match_tolerance_s,
            },
            "results": [
                {
                    "window": {"begin_idx": r.window.begin, "end_idx": r.window.end},
                    "energy": r.to_json_dict(),
                }
                for r in self.results
            ],
            "total_joules": sum(r.joules for r in self.results),
            "hit_miss": self.hit_miss.to_json_dict() if self.hit_miss else None,
            "campaign": self.campaign.to_json_dict() if self.campaign else None,
            "warnings": self.warnings,
        }


def _write_skyline_csv(trace: PowerTrace, path: Path) -> None:
    rate = trace.rate_hz
    power = trace.power_w().tolist()
    with path.open("w", newline="\n") as f:
        f.write("t_s,watts\n")
        for i, watts in enumerate(power):
            f.write(f"{i / rate!r},{watts!r}\n")


def _analyze_trace(
    trace: PowerTrace,
    mode: str,
    params: SegmentationParams,
    match_tolerance_s: float,
    expected: GpioCommandLog | None,
) -> SessionReport:
    report = SessionReport(
        mode=mode,
        rate_hz=trace.rate_hz,
        shunt=trace.shunt,
        params=params,
        match_tolerance_s=match_tolerance_s,
    )
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", TraceTruncationWarning)
        if mode == RELAY:
            windows = segment_relay(trace, params)
        else:
            windows = segment_trigger(trace, params)
    report.warnings.extend(str(w.message) for w in caught)
    report.results = [integrate_energy(trace, w) for w in windows]
    if not windows:
        report.warnings.append("no measurement windows found")
    if expected is not None:
        report.hit_miss = match_toggles(
            expected, windows, trace.rate_hz, match_tolerance_s
        )
    return report


def _cmd_simulate(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    trace, truth = simulate_session(scenario)
    write_trace_csv(trace, args.out_trace)
    truth.write_json(args.out_truth)
    print(f"wrote {args.out_trace} ({len(trace)} samples) and {args.out_truth}")
    return 0


def _cmd_analyze(args) -> int:
    trace = read_trace_csv(args.trace)
    validation = validate_trace(trace)
    if not validation.ok:
        for v in validation.violations:
            print(f"error: {v}", file=sys.stderr)
        return 2
    if args.rate is not None:
        trace = PowerTrace(
            rate_hz=args.rate, vs=trace.vs, trig=trace.trig, shunt=trace.shunt
        )
    if args.vf is not None or args.shunt_r is not None:
        shunt = ShuntConfig(
            vf=args.vf if args.vf is not None else trace.shunt.vf,
            rs=args.shunt_r if args.shunt_r is not None else trace.shunt.rs,
        )
        trace = PowerTrace(
            rate_hz=trace.rate_hz, vs=trace.vs, trig=trace.trig, shunt=shunt
        )
    params = SegmentationParams(
        relay_threshold_w=args.threshold_w,
        min_window_samples=args.min_window,
        trigger_logic_threshold_v=args.trigger_threshold_v,
    )
    expected = GpioCommandLog.read_csv(args.expected) if args.expected else None
    report = _analyze_trace(
        trace, args.mode, params, args.match_tolerance_s, expected
    )
    out = Path(args.out)
    out.write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
    skyline = Path(args.skyline) if args.skyline else out.with_suffix(".skyline.csv")
    _write_skyline_csv(trace, skyline)
    for message in report.warnings:
        print(f"warning: {message}", file=sys.stderr)
    print(
        f"wrote {out} ({len(report.results)} window(s)) and skyline {skyline}"
    )
    return 0


def _cmd_campaign(args) -> int:
    scenario = load_scenario(args.scenario)
    if args.seed is not None:
        scenario = scenario.with_seed(args.seed)
    params = SegmentationParams()
    joules: list[float] = []
    report = None
    for run in range(args.runs):
        run_scenario = scenario.with_seed(scenario.seed + run)
        trace, _ = simulate_session(run_scenario)
        mode = RELAY if run_scenario.circuit == RELAY else TRIGGER
        report = _analyze_trace(trace, mode, params, 1e-3, expected=None)
        joules.append(sum(r.joules for r in report.results))
    summary = summarize_campaign(joules, args.confidence)
    out = Path(args.out)
    with out.open("w", newline="\n") as f:
        f.write("# run_1..run_n,mean,me\n")
        f.write(summary.to_csv_row() + "\n")
    # stdout carries the final run's analysis with the all-runs summary
    report.campaign = summary
    print(json.dumps(report.to_json_dict(), indent=2))
    return 0


def _read_joules(path_arg: str) -> list[float]:
    if path_arg == "-":
        text = sys.stdin.read()
    else:
        text = Path(path_arg).read_text()
    return [float(tok) for tok in text.replace(",", " ").split()]


def _cmd_stats(args) -> int:
    summary = summarize_campaign(_read_joules(args.values), args.confidence)
    payload = json.dumps(summary.to_json_dict(), indent=2)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    print(payload)
    return 0


def _cmd_validate(args) -> int:
    path = Path(args.path)
    if path.suffix == ".json":
        load_scenario(path)  # raises ScenarioError on any defect
        print(f"{path}: scenario ok")
        return 0
    trace = read_trace_csv(path)
    validation = validate_trace(trace)
    if not validation.ok:
        for v in validation.violations:
            print(f"{path}: {v}", file=sys.stderr)
        return 2
    print(f"{path}: trace ok ({len(trace)} samples at {trace.rate_hz} Hz)")
    return 0


class _Parser(argparse.ArgumentParser):
    # usage errors exit 1; data errors exit 2 (argparse default is 2 for both)
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="joulemark",
        description=(
            "Simulate shunt-based energy measurement sessions, recover "
            "measurement windows from traces, and integrate them to joules."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("simulate", help="run a scenario; write trace CSV and ground-truth JSON")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--out-trace", required=True, help="output trace CSV path")
    p.add_argument("--out-truth", required=True, help="output ground-truth JSON path")
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="segment a trace and integrate each window")
    p.add_argument("trace", help="trace CSV file")
    p.add_argument("--mode", required=True, choices=[RELAY, TRIGGER])
    p.add_argument("--out", required=True, help="output report JSON path")
    p.add_argument("--skyline", default=None, help="skyline CSV path (default: derived from --out)")
    p.add_argument("--expected", default=None, help="GPIO command log CSV for hit/miss matching")
    p.add_argument("--threshold-w", type=float, default=0.005, help="relay power threshold, watts")
    p.add_argument("--min-window", type=int, default=4, help="minimum window length, samples")
    p.add_argument("--trigger-threshold-v", type=float, default=0.9, help="trigger logic threshold, volts")
    p.add_argument("--match-tolerance-s", type=float, default=1e-3, help="hit/miss start-time tolerance, seconds")
    p.add_argument("--shunt-r", type=float, default=None, help="override shunt resistance, ohms")
    p.add_argument("--vf", type=float, default=None, help="override source voltage, volts")
    p.add_argument("--rate", type=float, default=None, help="override sampling rate, hertz")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("campaign", help="simulate+analyze a scenario n times; summarize joules")
    p.add_argument("scenario", help="scenario JSON file")
    p.add_argument("--runs", type=int, required=True, help="number of repeated runs (>= 2)")
    p.add_argument("--out", required=True, help="output CSV path (samples..., mean, me)")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--seed", type=int, default=None, help="override the scenario base seed")
    p.set_defaults(func=_cmd_campaign)

    p = sub.add_parser("stats", help="summarize an existing list of joules")
    p.add_argument("values", help="file of whitespace/comma-separated joules, or - for stdin")
    p.add_argument("--confidence", type=float, default=0.95)
    p.add_argument("--out", default=None, help="also write the JSON summary here")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("validate", help="lint a trace CSV or scenario JSON")
    p.add_argument("path")
    p.set_defaults(func=_cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        if exc.code is None:
            return 0
        return exc.code if isinstance(exc.code, int) else 1
    try:
        return args.func(args)
    except (ValueError, OSError, DanglingWindowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
