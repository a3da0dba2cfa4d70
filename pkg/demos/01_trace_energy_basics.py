"""Build a power trace by hand and integrate it to joules.

A trace stores the voltage drop across the shunt; power follows from
P = vf * vs / rs.  The trapezoidal rule is exact for constant and ramp
signals, so the printed energies match the closed forms to machine
precision.
"""

import numpy as np

from joulemark import MeasurementWindow, PowerTrace, ShuntConfig, integrate_energy

shunt = ShuntConfig()  # 12 V supply, 0.1 ohm shunt
rate = 40_000.0
n = int(rate) + 1  # samples 0..40000 span exactly one second

# constant 0.1 V across the shunt = 1 A = 12 W, for one second
trace = PowerTrace(rate_hz=rate, vs=np.full(n, 0.1), shunt=shunt)
result = integrate_energy(trace, MeasurementWindow(0, n))
print(f"constant 12 W for 1 s  -> {result.joules:.6f} J (expect 12)")

# a linear ramp 0 -> 0.1 V integrates to half the plateau energy
trace = PowerTrace(rate_hz=rate, vs=np.linspace(0.0, 0.1, n), shunt=shunt)
result = integrate_energy(trace, MeasurementWindow(0, n))
print(f"ramp 0 -> 12 W over 1 s -> {result.joules:.6f} J (expect 6)")

# sub-windows: integrate just the middle half second
half = MeasurementWindow(n // 4, n // 4 + n // 2 + 1)
result = integrate_energy(trace, half)
print(
    f"middle window [{half.begin / rate:.3f}, {half.end / rate:.3f}] s "
    f"-> {result.joules:.6f} J at mean {result.mean_watts:.3f} W"
)
