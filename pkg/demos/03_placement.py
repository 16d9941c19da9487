"""All placement algorithms on one generated scenario.

Run with ``python demos/03_placement.py``.  Fits the LoS model on the
terrain, places one UAV with each algorithm and evaluates the real coverage
(link states come from the buildings, not from the model).
"""

import numpy as np

from uavplace.sim import ALGORITHMS, CampaignConfig, evaluate_deployment, fit_round_model, generate_scenario, place, round_seed

cfg = CampaignConfig()
scenario_seed, los_seed = round_seed(cfg.seed, 3).spawn(2)
scenario = generate_scenario(cfg.area_obj, cfg.users_per_scenario / cfg.area_obj.size, cfg.buildings, scenario_seed)
print(f"{len(scenario.users)} users, {len(scenario.terrain.buildings)} buildings, h_min = {scenario.h_min:.1f} m")

h_range = (scenario.h_min, cfg.ceiling(scenario.h_min))
model = fit_round_model(cfg, scenario, los_seed, h_range)
print(f"fitted LoS model: a={model.a:.3f} b={model.b:.3f}")

for algo in ALGORITHMS:
    res = place(algo, cfg, scenario, scenario.users, scenario.terrain.area, model)
    x, y, z = res.uav_position
    length = res.trajectory.total_length if res.trajectory is not None else 0.0
    coverage = evaluate_deployment(scenario, [res.uav_position])
    print(f"{algo:6s} UAV at ({x:6.1f}, {y:6.1f}, {z:5.1f})  coverage {coverage:.4f}  search {length:6.1f} m")
