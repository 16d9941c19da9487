"""User classification by coverage probability: C1 / C2 / C3."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .channel import ChannelParams, LinkState, conditional_coverage, coverage_probability
from .errors import ConfigError


class UserClass(enum.IntEnum):
    C1 = 1  # definitely covered
    C2 = 2  # probably covered
    C3 = 3  # cannot be covered


class Mode(str, enum.Enum):
    NON_TERRAIN = "non-terrain"
    TERRAIN = "terrain"


@dataclass(frozen=True)
class ClassificationConfig:
    epsilon: float = 0.1
    mode: Mode = Mode.NON_TERRAIN

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if not 0 < self.epsilon < 0.5:
            raise ConfigError(f"epsilon must lie in (0, 0.5), got {self.epsilon}")


def _upper_lower(params: ChannelParams, los_model, cfg: ClassificationConfig, h, r):
    """Curves compared against 1 - eps (for C1) and eps (for C3)."""
    if cfg.mode is Mode.NON_TERRAIN:
        return (conditional_coverage(params, LinkState.NLOS, r),
                conditional_coverage(params, LinkState.LOS, r))
    pc = coverage_probability(params, los_model, h, r)
    return pc, pc


def classify_users(params: ChannelParams, los_model, cfg: ClassificationConfig, h, r) -> np.ndarray:
    """Vectorised classification; returns an int array of :class:`UserClass` values."""
    hi, lo = _upper_lower(params, los_model, cfg, h, r)
    hi = np.asarray(hi)
    lo = np.asarray(lo)
    out = np.full(np.broadcast(hi, lo).shape, int(UserClass.C2))
    out = np.where(lo < cfg.epsilon, int(UserClass.C3), out)
    out = np.where(hi > 1.0 - cfg.epsilon, int(UserClass.C1), out)
    return out


def classify_user(params: ChannelParams, los_model, cfg: ClassificationConfig, h: float, r: float) -> UserClass:
    return UserClass(int(classify_users(params, los_model, cfg, h, r)))


def _bisect(fn, lo: float, hi: float, tol: float) -> float:
    # fn(lo) True, fn(hi) False
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fn(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def class_boundaries(params: ChannelParams, los_model, cfg: ClassificationConfig, h: float,
                     r_limit: float = 1e6, tol: float = 0.01) -> tuple[float, float]:
    """Distances of the C1/C2 and C2/C3 boundaries at UAV height ``h``.

    Coverage is assumed to decrease with distance.  ``math.inf`` marks a
    boundary beyond ``r_limit`` (the inner class extends over everything);
    ``h`` marks a class that is already empty directly under the UAV.
    """
    def is_c1(r):
        return bool(_upper_lower(params, los_model, cfg, h, r)[0] > 1.0 - cfg.epsilon)

    def not_c3(r):
        return bool(_upper_lower(params, los_model, cfg, h, r)[1] >= cfg.epsilon)

    def boundary(pred):
        if not pred(h):
            return float(h)
        if pred(r_limit):
            return math.inf
        return _bisect(pred, h, r_limit, tol)

    return boundary(is_c1), boundary(not_c3)
