"""Instrument a 'program', export its toggle log, and measure it.

The port registry enforces single ownership and per-port alternation, so
exported logs are valid simulator input by construction.  This script
plays a fake workload, replays its log through the trigger circuit, and
prints one energy report per instrumented region.
"""

from joulemark import (
    PortRegistry,
    Scenario,
    WorkloadProfile,
    integrate_energy,
    match_toggles,
    segment_trigger,
    simulate_session,
)


class ScriptedClock:
    """Session clock that steps through pre-planned instants."""

    def __init__(self, instants):
        self._it = iter(instants)

    def __call__(self):
        return next(self._it)


# token issued at 0.0; regions [0.2, 1.0] and [1.4, 2.1]
registry = PortRegistry(clock=ScriptedClock([0.0, 0.2, 1.0, 1.4, 2.1, 2.2]))
token = registry.acquire(40, owner="main-thread")
token.activate()   # ... first region of interest runs here ...
token.deactivate()
token.activate()   # ... second region ...
token.deactivate()
token.release()

log = registry.export_log()
print("exported commands:")
for cmd in log.entries:
    print(f"  t={cmd.t_s:4.1f}s  port {cmd.port}  {cmd.action}")

scenario = Scenario.create(
    duration_s=2.5,
    circuit="trigger",
    workload=WorkloadProfile.constant(9.0, 0.0, 2.5),
    gpio=log,
    seed=4,
)
trace, _ = simulate_session(scenario)
windows = segment_trigger(trace)
report = match_toggles(log, windows, trace.rate_hz)
print(f"recovered {len(windows)} windows; {report.hits}/{report.expected} toggles hit")
for window in windows:
    result = integrate_energy(trace, window)
    print(
        f"  [{result.begin_s:.2f}, {result.end_s:.2f}] s -> "
        f"{result.joules:.3f} J ({result.mean_watts:.2f} W mean)"
    )
