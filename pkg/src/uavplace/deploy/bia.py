"""Barycenter-inspired placement: iterated distance-weighted user centroid."""

from __future__ import annotations

import numpy as np

from .density import MassDensity, mass_density
from .result import DeploymentResult


def bia(users, md: MassDensity, h: float, max_iter: int = 100, delta: float = 1.0) -> DeploymentResult:
    """Horizontal placement at fixed altitude ``h``.

    Starts at the user centroid and moves to the ``md``-weighted barycenter
    until ``max_iter`` iterations or a move of at most ``delta``.  If every
    weight vanishes the UAV holds its position.
    """
    xy = np.asarray(users, dtype=float)[:, :2]
    if len(xy) == 0:
        raise ValueError("bia needs at least one user")
    pos = xy.mean(axis=0)
    n = 1
    held = False
    while True:
        r = np.sqrt(np.sum((xy - pos) ** 2, axis=1) + h * h)
        w = np.broadcast_to(mass_density(md, r), r.shape)
        total = float(np.sum(w))
        if total <= 0.0:
            held = True
            break
        new = (w @ xy) / total
        n += 1
        move = float(np.hypot(*(new - pos)))
        pos = new
        if n >= max_iter or move <= delta:
            break
    return DeploymentResult(np.array([pos[0], pos[1], h]), "bia",
                            info={"iterations": n, "held": held, "density": md.kind.value})
