"""Real-time LoS search in a vertical plane.

The frame is cylindrical: the axis is horizontal and runs along the user
pair, the UAV moves in the vertical plane through ``origin`` perpendicular to
that axis, ``rho`` is the distance from the axis and ``theta`` is measured
from the vertical, so the altitude is ``rho * cos(theta)``.
"""

from __future__ import annotations

import math

import numpy as np

from ..channel import ChannelParams, LinkState, average_snr
from ..errors import DomainError
from ..terrain import TerrainMap
from .result import DeploymentResult, Outcome, SearchTrajectory

TOL = 1e-9


class PlaneFrame:
    def __init__(self, origin_xy, axis_xy):
        self.origin = np.asarray(origin_xy, dtype=float)[:2]
        axis = np.asarray(axis_xy, dtype=float)[:2]
        norm = float(np.hypot(*axis))
        if norm == 0:
            raise DomainError("search axis has zero length")
        self.axis = axis / norm
        self.normal = np.array([-self.axis[1], self.axis[0]])

    def position(self, rho: float, theta: float) -> np.ndarray:
        xy = self.origin + rho * math.sin(theta) * self.normal
        return np.array([xy[0], xy[1], rho * math.cos(theta)])


def _append_line(waypoints: list, target: np.ndarray, delta: float) -> None:
    # straight flight, split so consecutive waypoints stay within delta
    start = waypoints[-1]
    dist = float(np.linalg.norm(target - start))
    if dist <= TOL:
        return
    n = int(math.ceil(dist / delta - 1e-9))
    for i in range(1, n + 1):
        waypoints.append(start + (target - start) * (i / n))


def ground_points(points) -> np.ndarray:
    p = np.asarray(points, dtype=float).reshape(len(points), -1)
    out = np.zeros((len(p), 3))
    out[:, :2] = p[:, :2]
    return out


def min_snr(params: ChannelParams, state: LinkState, position, targets) -> float:
    r = np.linalg.norm(np.asarray(targets, dtype=float) - position, axis=1)
    return float(np.min(average_snr(params, state, r)))


def actual_min_snr(terrain: TerrainMap, params: ChannelParams, position, targets) -> float:
    """Smallest average SNR over ``targets`` using each link's real LoS state."""
    targets = np.asarray(targets, dtype=float)
    r = np.linalg.norm(targets - position, axis=1)
    los = np.asarray(terrain.is_los(targets, position), dtype=bool)
    snr = np.where(los, average_snr(params, LinkState.LOS, r), average_snr(params, LinkState.NLOS, r))
    return float(np.min(snr))


def plane_search(terrain: TerrainMap, params: ChannelParams, targets, frame: PlaneFrame,
                 start: tuple[float, float], delta: float, h_min: float, rho_cap: float | None = None,
                 algorithm: str = "two-user") -> DeploymentResult:
    """Expand until every target is in LoS, then follow the shadow boundary down.

    ``B`` (blocked) is true while any target's link is obstructed.  Steps:
    expand ``rho`` by ``delta`` until ``B`` clears (or ``rho_cap`` is hit);
    descend on the left branch, shrinking ``rho`` while in LoS and rotating
    ``theta`` by a chord of length ``delta`` while blocked; repeat on the
    right branch from the best LoS point; finally compare that point with the
    NLoS hover position at ``h_min`` above the origin by minimum average SNR.
    """
    targets = ground_points(targets)
    rho, theta = float(start[0]), float(start[1])
    if rho * math.cos(theta) < h_min - TOL:
        raise DomainError(f"search start altitude {rho * math.cos(theta):.3f} m is below h_min={h_min}")

    def blocked(rho_, theta_):
        return not bool(np.all(terrain.is_los(targets, frame.position(rho_, theta_))))

    way = [frame.position(rho, theta)]
    b = blocked(rho, theta)
    while b:
        rho += delta
        if rho_cap is not None and rho > rho_cap:
            out = frame.position(h_min / math.cos(theta), theta)
            _append_line(way, out, delta)
            traj = SearchTrajectory.from_waypoints(way, Outcome.ALTITUDE_CAPPED)
            return DeploymentResult(out, algorithm, traj, actual_min_snr(terrain, params, out, targets),
                                    info={"rho": h_min / math.cos(theta), "theta": theta})
        way.append(frame.position(rho, theta))
        b = blocked(rho, theta)

    best = (rho, theta)
    rotation_capped = False
    for sign in (-1.0, 1.0):
        if (rho, theta) != best:
            _append_line(way, frame.position(*best), delta)
            rho, theta = best
            b = False
        turned = 0.0
        while rho * math.cos(theta) > h_min + TOL:
            if not b:
                best = (rho, theta)
                rho = max(rho - delta, h_min / math.cos(theta))
            else:
                step = 2.0 * math.asin(min(1.0, delta / (2.0 * rho)))
                theta += sign * step
                turned += step
                if turned > 2.0 * math.pi:
                    rotation_capped = True
                    break
                # a rotation that dips below the floor lands on the floor instead
                if rho * math.cos(theta) < h_min and math.cos(theta) > 0:
                    rho = h_min / math.cos(theta)
            way.append(frame.position(rho, theta))
            b = blocked(rho, theta)
        # a descent step that lands exactly on the floor is still a valid position
        if not b and rho * math.cos(theta) >= h_min - TOL and rho < best[0]:
            best = (rho, theta)

    best_pos = frame.position(*best)
    nadir = frame.position(h_min, 0.0)
    snr_los = min_snr(params, LinkState.LOS, best_pos, targets)
    snr_nlos = min_snr(params, LinkState.NLOS, nadir, targets)
    if snr_nlos > snr_los:
        out, gamma, outcome, rho_out, theta_out = nadir, snr_nlos, Outcome.FALLBACK_NADIR, h_min, 0.0
    else:
        out, gamma, outcome, (rho_out, theta_out) = best_pos, snr_los, Outcome.LOS_FOUND, best
    _append_line(way, out, delta)
    traj = SearchTrajectory.from_waypoints(way, outcome, rotation_capped)
    return DeploymentResult(out, algorithm, traj, gamma,
                            info={"rho": rho_out, "theta": theta_out, "max_altitude": float(traj.waypoints[:, 2].max())})


def two_user_search(terrain: TerrainMap, params: ChannelParams, u1, u2, start: tuple[float, float],
                    delta: float = 1.0, h_min: float | None = None, rho_cap: float | None = None) -> DeploymentResult:
    """Search for a position with LoS to both users in their perpendicular bisector plane.

    ``start`` is ``(rho, theta)`` in the frame centred on the users' midpoint.
    ``rho_cap`` defaults to ``4 * h_min``.
    """
    u1 = np.asarray(u1, dtype=float)
    u2 = np.asarray(u2, dtype=float)
    if h_min is None:
        h_min = terrain.default_h_min()
    if float(np.hypot(*(u2[:2] - u1[:2]))) <= 0:
        raise DomainError("the two users coincide")
    if rho_cap is None:
        rho_cap = 4.0 * h_min
    frame = PlaneFrame(0.5 * (u1[:2] + u2[:2]), u2[:2] - u1[:2])
    targets = ground_points([u1[:2], u2[:2]])
    return plane_search(terrain, params, targets, frame, start, delta, h_min, rho_cap, "two-user")
