"""Random suburban terrain, LoS sampling by elevation angle, and the curve fits.

Run with ``python demos/02_terrain_and_los_fit.py``.  A UAV flying over the
terrain measures the fraction of LoS links per elevation angle; the three
model families are then fitted to those fractions and compared with the
published suburban parameters.
"""

import numpy as np

from uavplace.losmodel import Family, LosModelParams, collect_samples, fit, model_mse, p_los
from uavplace.sim import BuildingConfig, feasible_thetas, generate_scenario, outdoor_points
from uavplace.terrain import Area

scenario = generate_scenario(Area(0, 0, 300, 300), 0.0, BuildingConfig(), seed=7)
terrain = scenario.terrain
heights = [b.height for b in terrain.buildings]
print(f"{len(heights)} buildings, tallest {max(heights):.1f} m, h_min = {scenario.h_min:.1f} m")

rng = np.random.default_rng(7)
h_range = (scenario.h_min, 4 * scenario.h_min)
samples = collect_samples(terrain, outdoor_points(terrain, 50, rng), h_range,
                          feasible_thetas(terrain.area, h_range[0]), 400, rng)

fits = {f: fit(samples, f, 0.0, 0.0) for f in Family}
fits["sigmoid, regularised"] = fit(samples, Family.SIGMOID, 0.01, 0.01)
empirical = LosModelParams.empirical()

print("theta  measured  " + "  ".join(f"{str(getattr(k, 'value', k)):>8.8s}" for k in fits) + "  empirical")
for s in samples:
    row = "  ".join(f"{p_los(res.params, s.theta):8.3f}" for res in fits.values())
    print(f"{s.theta:5.0f}  {s.t:8.3f}  {row}  {p_los(empirical, s.theta):9.3f}")
for name, res in fits.items():
    label = getattr(name, "value", name)
    print(f"{label:22s} a={res.params.a:8.4f} b={res.params.b:8.4f} MSE={res.mse:.5f}")
print(f"{'empirical (4.88, 0.43)':22s} MSE={model_mse(empirical, samples):.5f}")
