"""Coverage probability of one air-to-ground link and the resulting user classes.

Run with ``python demos/01_channel_and_classes.py``.  Prints the conditional
coverage of LoS and NLoS links over distance, the LoS-averaged coverage for a
UAV at 20 m, and where the C1/C2/C3 boundaries fall for both classification
modes.
"""

import numpy as np

from uavplace.channel import ChannelParams, LinkState, average_snr, conditional_coverage, coverage_probability
from uavplace.classify import ClassificationConfig, class_boundaries
from uavplace.losmodel import LosModelParams

params = ChannelParams.default()
model = LosModelParams.empirical()
h = 20.0

print("distance [m]  SNR LoS [dB]  P(cov|LoS)  P(cov|NLoS)  P(cov) at h=20 m")
for r in (20.0, 50.0, 126.0, 300.0, 1000.0, 3000.0):
    snr_db = 10 * np.log10(average_snr(params, LinkState.LOS, r))
    print(f"{r:11.0f}  {snr_db:12.1f}  {conditional_coverage(params, LinkState.LOS, r):10.4f}"
          f"  {conditional_coverage(params, LinkState.NLOS, r):11.4f}  {coverage_probability(params, model, h, r):.4f}")

for mode in ("non-terrain", "terrain"):
    r_min, r_max = class_boundaries(params, model, ClassificationConfig(0.1, mode), h)
    print(f"{mode:12s} C1 up to {r_min:8.2f} m, C3 beyond {r_max:8.2f} m")
