"""Compiled segment/prism intersection kernels.

Every building is stored as one or more convex pieces, each a set of
half-planes ``n . p - offset < 0`` with unit outward normals.  For a ground
segment from a user ``A`` to the horizontal UAV position ``A + D`` the
kernels compute the entry parameter ``t0`` of the open interior interval and
turn it into a critical altitude ``height / t0``: the building blocks the 3-D
link exactly when the UAV altitude is strictly below that value.
"""

import numpy as np
from numba import njit

INF = np.inf


@njit(cache=True)
def _piece_entry(ax, ay, dx, dy, dnorm, normals, offsets, p, ne, eps):
    t_lo = 0.0
    t_hi = 1.0
    for e in range(ne):
        nx = normals[p, e, 0]
        ny = normals[p, e, 1]
        c = nx * ax + ny * ay - offsets[p, e]
        g = nx * dx + ny * dy
        if g == 0.0:
            if c >= -eps:
                return INF
        elif g < 0.0:
            t = -c / g
            if t > t_lo:
                t_lo = t
        else:
            t = -c / g
            if t < t_hi:
                t_hi = t
    if dnorm > 0.0:
        if (t_hi - t_lo) * dnorm <= eps:
            return INF
    elif t_hi <= t_lo:
        return INF
    return t_lo


@njit(cache=True)
def _pair_crit(ax, ay, bx, by, normals, offsets, n_edges, bbox, owner, heights, eps, out):
    # out[b] <- max critical altitude of building b for segment (a, b); 0 means never blocks
    dx = bx - ax
    dy = by - ay
    dnorm = np.sqrt(dx * dx + dy * dy)
    if dnorm <= eps:
        # below the geometric tolerance the segment is vertical
        dx = 0.0
        dy = 0.0
        dnorm = 0.0
    sx0 = min(ax, bx) - eps
    sx1 = max(ax, bx) + eps
    sy0 = min(ay, by) - eps
    sy1 = max(ay, by) + eps
    for b in range(out.shape[0]):
        out[b] = 0.0
    for p in range(owner.shape[0]):
        if bbox[p, 0] > sx1 or bbox[p, 2] < sx0 or bbox[p, 1] > sy1 or bbox[p, 3] < sy0:
            continue
        t = _piece_entry(ax, ay, dx, dy, dnorm, normals, offsets, p, n_edges[p], eps)
        if t <= 1.0:
            b = owner[p]
            zc = heights[b] / t if t > 0.0 else INF
            if zc > out[b]:
                out[b] = zc


@njit(cache=True)
def crit_matrix(users, uavs, normals, offsets, n_edges, bbox, owner, heights, eps):
    """Critical altitude of every building for each (user, uav) pair; shape (N, B)."""
    n = users.shape[0]
    out = np.zeros((n, heights.shape[0]))
    for i in range(n):
        _pair_crit(users[i, 0], users[i, 1], uavs[i, 0], uavs[i, 1],
                   normals, offsets, n_edges, bbox, owner, heights, eps, out[i])
    return out


@njit(cache=True)
def crit_top2_grid(users, xs, ys, normals, offsets, n_edges, bbox, owner, heights, eps):
    """Largest and second-largest critical altitude per (user, x, y); shape (K, nx, ny, 2)."""
    k = users.shape[0]
    out = np.zeros((k, xs.shape[0], ys.shape[0], 2))
    buf = np.zeros(heights.shape[0])
    for u in range(k):
        for i in range(xs.shape[0]):
            for j in range(ys.shape[0]):
                _pair_crit(users[u, 0], users[u, 1], xs[i], ys[j],
                           normals, offsets, n_edges, bbox, owner, heights, eps, buf)
                first = 0.0
                second = 0.0
                for b in range(buf.shape[0]):
                    v = buf[b]
                    if v > first:
                        second = first
                        first = v
                    elif v > second:
                        second = v
                out[u, i, j, 0] = first
                out[u, i, j, 1] = second
    return out


@njit(cache=True)
def _coverage(coef, alpha, m, s, r):
    # Gamma(m) upper tail at m * mu for unit-mean Nakagami gain
    mu = m[s] * coef[s] * r ** alpha[s]
    term = 1.0
    total = 1.0
    for n in range(1, m[s]):
        term *= mu / n
        total += term
    return np.exp(-mu) * total


@njit(cache=True)
def best_grid_node(users, xs, ys, hs, top2, coef, alpha, m, multiple):
    """Exact argmax of the mean conditional coverage over the grid ``xs x ys x hs``.

    ``top2[k, i, j]`` holds the two largest critical altitudes of user ``k``
    at column ``(i, j)``.  Inside one column the link states only change at
    those altitudes and coverage falls with distance in between, so only the
    lowest grid altitude at or above each critical altitude (plus ``hs[0]``)
    can be optimal.  Ties go to the lowest altitude, then lowest x, then y.
    Returns ``(objective, i, j, h_index)``.
    """
    k = users.shape[0]
    nh = hs.shape[0]
    cand = np.empty(2 * k + 1, dtype=np.int64)
    best = -1.0
    bi = 0
    bj = 0
    bh = 0
    for i in range(xs.shape[0]):
        for j in range(ys.shape[0]):
            n = 1
            cand[0] = 0
            for u in range(k):
                for q in range(2):
                    c = top2[u, i, j, q]
                    if c > hs[0]:
                        idx = np.searchsorted(hs, c)
                        if idx < nh:
                            cand[n] = idx
                            n += 1
            cs = np.unique(cand[:n])
            for ci in range(cs.shape[0]):
                hi = cs[ci]
                h = hs[hi]
                total = 0.0
                for u in range(k):
                    dx = xs[i] - users[u, 0]
                    dy = ys[j] - users[u, 1]
                    r = np.sqrt(dx * dx + dy * dy + h * h)
                    blocked = 0
                    if h < top2[u, i, j, 0]:
                        blocked += 1
                    if h < top2[u, i, j, 1]:
                        blocked += 1
                    if blocked >= 2 and multiple:
                        continue
                    total += _coverage(coef, alpha, m, 1 if blocked else 0, r)
                obj = total / k
                if obj > best or (obj == best and hi < bh):
                    best = obj
                    bi = i
                    bj = j
                    bh = hi
    return best, bi, bj, bh
