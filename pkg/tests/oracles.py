"""Independent reference implementations used only by the tests."""

import math

import numpy as np
from numba import njit


def polygon_arrays(terrain):
    """Pad all footprints into (B, V, 2) vertex arrays plus counts and heights."""
    nb = len(terrain.buildings)
    vmax = max((len(b.footprint) for b in terrain.buildings), default=1)
    verts = np.zeros((nb, vmax, 2))
    counts = np.zeros(nb, dtype=np.int64)
    heights = np.zeros(nb)
    for i, b in enumerate(terrain.buildings):
        fp = np.array(b.footprint)
        verts[i, : len(fp)] = fp
        counts[i] = len(fp)
        heights[i] = b.height
    return verts, counts, heights


@njit(cache=True)
def _inside(x, y, verts, n):
    # even-odd ray casting
    inside = False
    j = n - 1
    for i in range(n):
        xi, yi = verts[i, 0], verts[i, 1]
        xj, yj = verts[j, 0], verts[j, 1]
        if (yi > y) != (yj > y):
            xc = xi + (y - yi) * (xj - xi) / (yj - yi)
            if x < xc:
                inside = not inside
        j = i
    return inside


@njit(cache=True)
def _bbox_interval(px, py, dx, dy, x0, y0, x1, y1):
    # parameter range where p + t d lies in the closed box (slab method)
    lo, hi = 0.0, 1.0
    for p, d, a, b in ((px, dx, x0, x1), (py, dy, y0, y1)):
        if d == 0.0:
            if p < a or p > b:
                return 1.0, 0.0
        else:
            t1, t2 = (a - p) / d, (b - p) / d
            if t1 > t2:
                t1, t2 = t2, t1
            lo, hi = max(lo, t1), min(hi, t2)
    return lo, hi


@njit(cache=True)
def sampled_counts(users, uavs, verts, counts, heights, n_samples, reverse):
    """Blockage counts by dense sampling of the open segment: a building counts
    when any sample lies strictly inside its prism.  Samples are placed only on
    the stretch of segment above the footprint's bounding box.  With
    ``reverse`` the segment is walked from the UAV down to the user."""
    out = np.zeros(users.shape[0], dtype=np.int64)
    for k in range(users.shape[0]):
        if reverse:
            px, py, pz = uavs[k, 0], uavs[k, 1], uavs[k, 2]
            dx, dy, dz = users[k, 0] - px, users[k, 1] - py, -pz
        else:
            px, py, pz = users[k, 0], users[k, 1], 0.0
            dx, dy, dz = uavs[k, 0] - px, uavs[k, 1] - py, uavs[k, 2]
        c = 0
        for b in range(heights.shape[0]):
            n = counts[b]
            lo, hi = _bbox_interval(px, py, dx, dy, verts[b, :n, 0].min(), verts[b, :n, 1].min(),
                                    verts[b, :n, 0].max(), verts[b, :n, 1].max())
            if hi <= lo:
                continue
            for s in range(n_samples):
                t = lo + (s + 0.5) / n_samples * (hi - lo)
                z = pz + t * dz
                if z >= heights[b] or z <= 0.0:
                    continue
                if _inside(px + t * dx, py + t * dy, verts[b], n):
                    c += 1
                    break
        out[k] = c
    return out


def oracle_counts(terrain, users, uavs, n_samples=20_000, reverse=False, refine=None):
    """Sampling oracle; links listed in ``refine`` (a boolean mask) are redone with 100x the samples."""
    verts, counts, heights = polygon_arrays(terrain)
    users = np.ascontiguousarray(np.asarray(users, dtype=float).reshape(-1, np.shape(users)[-1])[:, :2])
    uavs = np.ascontiguousarray(np.asarray(uavs, dtype=float).reshape(-1, 3))
    out = sampled_counts(users, uavs, verts, counts, heights, n_samples, reverse)
    if refine is not None and np.any(refine):
        idx = np.flatnonzero(refine)
        out[idx] = sampled_counts(np.ascontiguousarray(users[idx]), np.ascontiguousarray(uavs[idx]),
                                  verts, counts, heights, 100 * n_samples, reverse)
    return out


def naive_coverage(params, state_los, r):
    """P[G * snr > gamma] for G ~ Gamma(m, 1/m), by Simpson integration of the density."""
    st = params.los if state_los else params.nlos
    g0 = params.gamma * params.sigma2 * r ** st.alpha / (st.eta * params.zeta)
    m = st.m
    if m == 1:
        return math.exp(-g0)
    # integrate the pdf m^m g^(m-1) e^(-m g) / (m-1)! over [0, g0] and take the complement
    n = 20_000
    xs = np.linspace(0.0, g0, n + 1)
    pdf = m ** m * xs ** (m - 1) * np.exp(-m * xs) / math.factorial(m - 1)
    w = np.ones(n + 1)
    w[1:-1:2], w[2:-1:2] = 4, 2
    return max(0.0, 1.0 - float(np.sum(w * pdf)) * g0 / (3 * n))


def tail_coverage(params, state_los, r):
    """Same probability in closed form: the Gamma(m) upper tail at m * mu."""
    st = params.los if state_los else params.nlos
    x = st.m * params.gamma * params.sigma2 * r ** st.alpha / (st.eta * params.zeta)
    return math.exp(-x) * sum(x ** n / math.factorial(n) for n in range(st.m))


def naive_brute(terrain, users, params, xs, ys, hs, multiple=False):
    """Triple loop over the grid with per-link blockage counts from the terrain."""
    best = (-1.0, None)
    for h in hs:
        for x in xs:
            for y in ys:
                uav = np.array([x, y, h])
                total = 0.0
                for u in users:
                    n = terrain.blockage_count(np.array([u[0], u[1], 0.0]), uav)
                    r = math.dist((u[0], u[1], 0.0), (x, y, h))
                    if multiple and n >= 2:
                        continue
                    total += tail_coverage(params, n == 0, r)
                obj = total / len(users)
                if obj > best[0]:
                    best = (obj, (x, y, h))
    return best
