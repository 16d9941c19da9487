"""Distance-dependent user weights for the barycenter iteration."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError


class DensityKind(str, enum.Enum):
    UNIFORM = "uniform"
    ASCENDING = "asc"
    DESCENDING = "desc"
    TRIANGULAR = "tri"


@dataclass(frozen=True)
class MassDensity:
    kind: DensityKind
    r_min: float
    r_max: float
    h: float

    def __post_init__(self):
        object.__setattr__(self, "kind", DensityKind(self.kind))
        if self.kind is not DensityKind.UNIFORM:
            if not (math.isfinite(self.r_max) and self.r_min < self.r_max):
                raise ConfigError(f"mass density needs finite r_min < r_max, got {self.r_min}, {self.r_max}")

    @property
    def breakpoint(self) -> float:
        return 0.5 * math.sqrt(self.r_max ** 2 + 3.0 * self.h ** 2)


def mass_density(md: MassDensity, r):
    """Piecewise weight of a user at 3-D distance ``r``.

    Zero inside ``max(h, r_min)`` and beyond ``r_max``; between them the
    ascending form grows with the horizontal distance, the descending form
    shrinks, and the triangular form does both around ``breakpoint``.
    """
    r = np.asarray(r, dtype=float)
    if md.kind is DensityKind.UNIFORM:
        w = np.ones_like(r)
        return float(w) if w.ndim == 0 else w
    h = md.h
    ground = np.sqrt(np.maximum(r * r - h * h, 0.0))
    full = math.sqrt(max(md.r_max ** 2 - h * h, 0.0))
    inner = (r > max(h, md.r_min)) & (r <= md.breakpoint)
    outer = (r > md.breakpoint) & (r <= md.r_max)
    rising = ground
    falling = full - ground
    half = 0.5 * full
    if md.kind is DensityKind.ASCENDING:
        w = np.where(inner, rising, np.where(outer, half, 0.0))
    elif md.kind is DensityKind.DESCENDING:
        w = np.where(inner, half, np.where(outer, falling, 0.0))
    else:
        w = np.where(inner, rising, np.where(outer, falling, 0.0))
    return float(w) if w.ndim == 0 else w
