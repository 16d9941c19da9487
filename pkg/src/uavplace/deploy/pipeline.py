"""Multi-user real-time search pipelines (MRSA without prior terrain data, HDA with it).

Both run the same three stages: a classification center, C1/C2/C3
classification around it, and a LoS search serving the C2 users.
"""

from __future__ import annotations

import numpy as np

from ..channel import ChannelParams
from ..classify import ClassificationConfig, Mode, UserClass, class_boundaries, classify_users
from ..terrain import TerrainMap
from .bia import bia
from .density import DensityKind, MassDensity
from .geometry import farthest_pair, min_enclosing_circle
from .result import DeploymentResult, SearchTrajectory
from .scpa import scpa
from .search import PlaneFrame, actual_min_snr, ground_points, plane_search, two_user_search


def serve_probable_users(terrain: TerrainMap, params: ChannelParams, users, classes, center,
                         delta: float, h_min: float, rho_cap: float | None, algorithm: str) -> DeploymentResult:
    """Place the UAV for the C2 users given a classification around ``center``."""
    users = ground_points(users)
    classes = np.asarray(classes)
    c2 = users[classes == int(UserClass.C2)]
    start = (max(float(center[2]), h_min), 0.0)
    if rho_cap is None:
        rho_cap = 4.0 * h_min
    info = {"center": [float(v) for v in center], "n_c2": int(len(c2))}
    if len(c2) <= 1:
        xy = c2[0, :2] if len(c2) == 1 else np.asarray(center, dtype=float)[:2]
        pos = np.array([xy[0], xy[1], h_min])
        gamma = actual_min_snr(terrain, params, pos, c2) if len(c2) else None
        return DeploymentResult(pos, algorithm, SearchTrajectory.empty(), gamma, classes, info=info)
    if len(c2) == 2:
        res = two_user_search(terrain, params, c2[0], c2[1], start, delta, h_min, rho_cap)
        info["pair_distance"] = float(np.hypot(*(c2[1, :2] - c2[0, :2])))
    else:
        circle_center, radius = min_enclosing_circle(c2[:, :2])
        i, j = farthest_pair(c2[:, :2])
        frame = PlaneFrame(circle_center, c2[j, :2] - c2[i, :2])
        res = plane_search(terrain, params, c2, frame, start, delta, h_min, rho_cap, algorithm)
        info["pair_distance"] = float(np.hypot(*(c2[j, :2] - c2[i, :2])))
        info["circle"] = {"center": [float(v) for v in circle_center], "radius": radius}
    gamma = actual_min_snr(terrain, params, res.uav_position, c2)
    info.update(res.info)
    return DeploymentResult(res.uav_position, algorithm, res.trajectory, gamma, classes, info=info)


def mrsa(terrain: TerrainMap, users, params: ChannelParams, density: DensityKind | str = DensityKind.TRIANGULAR,
         cfg: ClassificationConfig = ClassificationConfig(), h: float | None = None, delta: float = 1.0,
         h_min: float | None = None, max_iter: int = 100, rho_cap: float | None = None) -> DeploymentResult:
    """Real-time search without prior terrain statistics.

    The classification center comes from the barycenter iteration at height
    ``h`` (default ``h_min``) and users are classified without terrain data.
    """
    users = ground_points(users)
    if h_min is None:
        h_min = terrain.default_h_min()
    h = h_min if h is None else h
    nt = ClassificationConfig(cfg.epsilon, Mode.NON_TERRAIN)
    r_min, r_max = class_boundaries(params, None, nt, h)
    center = bia(users, MassDensity(density, r_min, r_max, h), h, max_iter, delta).uav_position
    r = np.linalg.norm(users - center, axis=1)
    classes = classify_users(params, None, nt, h, r)
    return serve_probable_users(terrain, params, users, classes, center, delta, h_min, rho_cap, "mrsa")


def hda(terrain: TerrainMap, users, params: ChannelParams, los_model, cfg: ClassificationConfig = ClassificationConfig(),
        h_range=None, delta: float = 1.0, h_min: float | None = None, window: float = 30.0,
        rho_cap: float | None = None, center_hint=None) -> DeploymentResult:
    """Real-time search using the fitted LoS model for the center and classification."""
    users = ground_points(users)
    if h_min is None:
        h_min = terrain.default_h_min()
    if h_range is None:
        h_range = (h_min, 4.0 * h_min)
    center = scpa(users, params, los_model, h_range, center_hint, window, delta, terrain.area).uav_position
    tc = ClassificationConfig(cfg.epsilon, Mode.TERRAIN)
    r = np.linalg.norm(users - center, axis=1)
    classes = classify_users(params, los_model, tc, center[2], r)
    return serve_probable_users(terrain, params, users, classes, center, delta, h_min, rho_cap, "hda")


