"""Planar location primitives: geometric median and minimum enclosing circle."""

from __future__ import annotations

import itertools

import numpy as np


def fermat_weber(points, tol: float = 1e-9, max_iter: int = 10_000) -> np.ndarray:
    """Point minimising the sum of Euclidean distances (Weiszfeld iteration).

    Input points are first tested with the subgradient condition, since
    Weiszfeld converges only sublinearly towards an optimal input point.
    Otherwise the iteration starts from the centroid; when an iterate lands
    on an input point the modified (Vardi-Zhang) step moves off it.  For two
    points every point of the segment is optimal and the midpoint is returned.
    """
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(p) == 0:
        raise ValueError("fermat_weber needs at least one point")
    x = p.mean(axis=0)
    if len(p) <= 2:
        return x
    for q in np.unique(p, axis=0):
        diff = p - q
        dist = np.hypot(diff[:, 0], diff[:, 1])
        at = dist <= tol
        pull = (diff[~at] / dist[~at, None]).sum(axis=0)
        if float(np.hypot(*pull)) <= at.sum():
            return q.copy()
    for _ in range(max_iter):
        diff = p - x
        dist = np.hypot(diff[:, 0], diff[:, 1])
        at = dist <= tol
        far = ~at
        w = 1.0 / dist[far]
        t = (w @ p[far]) / w.sum()
        if np.any(at):
            pull = (w[:, None] * diff[far]).sum(axis=0)
            norm = float(np.hypot(*pull))
            multiplicity = int(at.sum())
            if norm <= multiplicity:
                return p[at][0].copy()
            gamma = min(1.0, multiplicity / norm)
            new = (1.0 - gamma) * t + gamma * x
        else:
            new = t
        if float(np.hypot(*(new - x))) <= tol:
            return new
        x = new
    return x


def _circle_two(a, b):
    c = 0.5 * (a + b)
    return c, float(np.hypot(*(a - c)))


def _circle_three(a, b, c):
    ax, ay = a
    bx, by = b
    cx, cy = c
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if abs(d) < 1e-18:
        return None
    a2, b2, c2 = ax * ax + ay * ay, bx * bx + by * by, cx * cx + cy * cy
    ux = (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d
    uy = (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d
    center = np.array([ux, uy])
    return center, float(np.hypot(*(a - center)))


def _inside(circle, p, rel: float = 1e-12) -> bool:
    c, r = circle
    return float(np.hypot(*(p - c))) <= r * (1.0 + rel) + 1e-12


def min_enclosing_circle(points, seed: int = 0) -> tuple[np.ndarray, float]:
    """Exact smallest enclosing circle (randomised incremental construction).

    The input order is shuffled with a fixed seed, so results are deterministic.
    """
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(p) == 0:
        raise ValueError("min_enclosing_circle needs at least one point")
    pts = p[np.random.default_rng(seed).permutation(len(p))]
    circle = (pts[0].copy(), 0.0)
    for i in range(1, len(pts)):
        if _inside(circle, pts[i]):
            continue
        circle = (pts[i].copy(), 0.0)
        for j in range(i):
            if _inside(circle, pts[j]):
                continue
            circle = _circle_two(pts[i], pts[j])
            for k in range(j):
                if _inside(circle, pts[k]):
                    continue
                three = _circle_three(pts[i], pts[j], pts[k])
                if three is None:
                    # collinear: the farthest pair spans the circle
                    trio = (pts[i], pts[j], pts[k])
                    a, b = max(itertools.combinations(trio, 2), key=lambda ab: np.hypot(*(ab[0] - ab[1])))
                    three = _circle_two(a, b)
                circle = three
    return circle[0], circle[1]


def farthest_pair(points) -> tuple[int, int]:
    """Indices of the two points at maximum distance (lowest indices on ties)."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    d = np.hypot(p[:, None, 0] - p[None, :, 0], p[:, None, 1] - p[None, :, 1])
    i, j = np.unravel_index(int(np.argmax(d)), d.shape)
    return (int(min(i, j)), int(max(i, j)))


def enclosing_radius(center, points) -> float:
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    return float(np.max(np.hypot(p[:, 0] - center[0], p[:, 1] - center[1]))) if len(p) else 0.0



