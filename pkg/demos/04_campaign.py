"""A small Monte-Carlo comparison, then the multi-UAV extension.

Run with ``python demos/04_campaign.py`` (about a minute).  The same seeded
rounds are shared by every algorithm, so the differences between means are
paired comparisons.  The full-size experiments are ``uavplace simulate`` and
``uavplace sweep``.
"""

import numpy as np

from uavplace.sim import CampaignConfig, run_campaign

cfg = CampaignConfig(rounds=40, seed=1)
reports = run_campaign(cfg)
print("algorithm  mean coverage  10th percentile  mean search length")
for algo, rep in reports.items():
    print(f"{algo:9s}  {rep.mean:13.4f}  {np.percentile(rep.coverage, 10):15.4f}  "
          f"{rep.length_stats()['mean']:16.1f} m")

print("\nmultiple-blockage model, SCPA")
for n in (1, 2, 4):
    rep = run_campaign(CampaignConfig(rounds=40, seed=1, algorithms=("scpa",), blockage_mode="multiple",
                                      n_uavs=n))["scpa"]
    print(f"{n} UAV(s): mean coverage {rep.mean:.4f}")
