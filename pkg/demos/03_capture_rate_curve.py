"""Sweep toggle-event length and count captured measurements per circuit.

Mirrors the accuracy calibration: 10 toggles per interval, interval sizes
in loop iterations (3 instructions each at 2.3 GHz).  The relay reaches
10/10 from 325K iterations, the trigger design already at 75K.
"""

from joulemark import instructions_to_duration, repeated_toggle_scenario, simulate_session

intervals = [5_000] + list(range(25_000, 450_001, 25_000))

print("iterations  event_us  relay_hits  trigger_hits   (out of 10)")
for iterations in intervals:
    d = instructions_to_duration(iterations)
    hits = {}
    for circuit in ("relay", "trigger"):
        scenario = repeated_toggle_scenario(d, 10, circuit, seed=iterations)
        _, truth = simulate_session(scenario)
        hits[circuit] = truth.hits
    print(
        f"{iterations:10d}  {d * 1e6:8.1f}  {hits['relay']:10d}  {hits['trigger']:12d}"
    )
