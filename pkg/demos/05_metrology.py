"""From spectrum-analyzer readings to a shot-noise-normalised variance.

The electronic floor is removed from the signal and from the shot-noise
reference in linear power before taking their ratio. A +/-0.3 dB
uncertainty becomes an asymmetric linear interval.
"""

from polent import error_bar_propagation, lin_to_db, subtract_electronic_noise
from polent.metrology import CalibratedTrace, PowerReading

trace = CalibratedTrace(PowerReading(-64.0), PowerReading(-60.0), PowerReading(-85.5))
raw = 10 ** ((-64.0 + 60.0) / 10)
corrected = subtract_electronic_noise(trace)
print(f"uncorrected {raw:.5f} ({lin_to_db(raw):.3f} dB), corrected {corrected:.5f} ({lin_to_db(corrected):.3f} dB)")

for v in (0.39, 0.55):
    lo, hi = error_bar_propagation(v, 0.3)
    print(f"{v} +/- 0.3 dB -> [{lo:.3f}, {hi:.3f}]")
