"""Exhaustive grid search on the true (terrain-aware) objective."""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..channel import BlockageMode, ChannelParams
from ..errors import ConfigError
from ..terrain import TerrainMap
from .result import DeploymentResult
from .scpa import grid_axis


def brute_force(terrain: TerrainMap, users, params: ChannelParams, delta: float = 1.0, h_range=None,
                mode: BlockageMode | str = BlockageMode.BASIC, area=None) -> DeploymentResult:
    """Best grid node for the mean conditional coverage under the actual link states.

    The grid covers ``area`` (the terrain area by default) at step ``delta``
    horizontally and ``h_range`` (default ``h_min`` to ``4 * h_min``)
    vertically.  Ties go to the lowest altitude, then lowest x, then y.
    """
    users = np.asarray(users, dtype=float)
    if len(users) == 0:
        raise ValueError("brute force needs at least one user")
    area = terrain.area if area is None else area
    if h_range is None:
        h_min = terrain.default_h_min()
        h_range = (h_min, 4.0 * h_min)
    xs = grid_axis(area.x_min, area.x_max, delta)
    ys = grid_axis(area.y_min, area.y_max, delta)
    hs = grid_axis(float(h_range[0]), float(h_range[1]), delta)
    if len(hs) == 0:
        raise ConfigError("brute-force altitude range is empty")
    top2 = terrain.critical_top2(users, xs, ys)
    st = (params.los, params.nlos)
    coef = np.array([params.gamma * params.sigma2 / (s.eta * params.zeta) for s in st])
    alpha = np.array([s.alpha for s in st])
    m = np.array([s.m for s in st], dtype=np.int64)
    multiple = BlockageMode(mode) is BlockageMode.MULTIPLE
    obj, i, j, ih = _kernels.best_grid_node(np.ascontiguousarray(users[:, :2]), xs, ys, hs, top2,
                                            coef, alpha, m, multiple)
    pos = np.array([xs[i], ys[j], hs[ih]])
    return DeploymentResult(pos, "brute", objective=float(obj),
                            info={"grid": [len(xs), len(ys), len(hs)], "mode": BlockageMode(mode).value})
