"""Stochastic-channel positioning: local brute force on expected coverage."""

from __future__ import annotations

import numpy as np

from ..channel import ChannelParams, coverage_probability
from ..errors import ConfigError
from .result import DeploymentResult


def grid_axis(lo: float, hi: float, delta: float) -> np.ndarray:
    """``lo, lo + delta, ...`` up to and including ``hi`` (within 1e-9)."""
    n = int(np.floor((hi - lo) / delta + 1e-9))
    return lo + delta * np.arange(n + 1)


def scpa(users, params: ChannelParams, los_model, h_range, center_hint=None, window: float = 30.0,
         delta: float = 1.0, area=None) -> DeploymentResult:
    """Maximise the summed expected coverage over a window around ``center_hint``.

    The search grid spans ``window`` meters in x and y around the initial
    point (the user centroid unless a previous position is given) and every
    altitude of ``h_range`` at step ``delta``.  Grid points outside ``area``
    are dropped.  Ties go to the lowest altitude, then lowest x, then y.
    """
    users = np.asarray(users, dtype=float)
    if len(users) == 0:
        raise ValueError("scpa needs at least one user")
    if window < delta:
        raise ConfigError("window must be at least delta")
    cx, cy = (users[:, :2].mean(axis=0) if center_hint is None else np.asarray(center_hint, dtype=float)[:2])
    half = np.floor(window / 2.0 / delta + 1e-9) * delta
    offs = grid_axis(-half, half, delta)
    xs, ys = cx + offs, cy + offs
    if area is not None:
        xs = xs[(xs >= area.x_min) & (xs <= area.x_max)]
        ys = ys[(ys >= area.y_min) & (ys <= area.y_max)]
    hs = grid_axis(float(h_range[0]), float(h_range[1]), delta)
    if len(xs) == 0 or len(ys) == 0 or len(hs) == 0:
        raise ConfigError("scpa search grid is empty")
    d2 = ((xs[:, None, None] - users[None, None, :, 0]) ** 2
          + (ys[None, :, None] - users[None, None, :, 1]) ** 2)  # (X, Y, K)
    obj = np.empty((len(hs), len(xs), len(ys)))
    for i, h in enumerate(hs):
        r = np.sqrt(d2 + h * h)
        obj[i] = np.sum(coverage_probability(params, los_model, h, r), axis=-1)
    flat = int(np.argmax(obj))
    ih, ix, iy = np.unravel_index(flat, obj.shape)
    pos = np.array([xs[ix], ys[iy], hs[ih]])
    return DeploymentResult(pos, "scpa", objective=float(obj[ih, ix, iy]) / len(users),
                            info={"center": [float(cx), float(cy)], "grid": list(obj.shape)})
