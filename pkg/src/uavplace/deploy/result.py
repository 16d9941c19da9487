"""Result containers shared by the placement algorithms."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class Outcome(str, enum.Enum):
    LOS_FOUND = "los-found"
    FALLBACK_NADIR = "fallback-nadir"
    ALTITUDE_CAPPED = "altitude-capped"


@dataclass(frozen=True)
class SearchTrajectory:
    waypoints: np.ndarray  # (n, 3)
    total_length: float
    outcome: Outcome
    rotation_capped: bool = False

    @classmethod
    def from_waypoints(cls, waypoints, outcome: Outcome, rotation_capped: bool = False) -> "SearchTrajectory":
        w = np.asarray(waypoints, dtype=float).reshape(-1, 3)
        length = float(np.sum(np.linalg.norm(np.diff(w, axis=0), axis=1))) if len(w) > 1 else 0.0
        return cls(w, length, outcome, rotation_capped)

    @classmethod
    def empty(cls, outcome: Outcome = Outcome.FALLBACK_NADIR) -> "SearchTrajectory":
        return cls(np.zeros((0, 3)), 0.0, outcome)

    def to_dict(self) -> dict:
        return {"waypoints": self.waypoints.tolist(), "total_length": self.total_length,
                "outcome": self.outcome.value, "rotation_capped": self.rotation_capped}


@dataclass(frozen=True)
class DeploymentResult:
    uav_position: np.ndarray  # (3,)
    algorithm: str
    trajectory: SearchTrajectory | None = None
    gamma_achieved: float | None = None
    classes: np.ndarray | None = None
    objective: float | None = None
    info: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "uav_position": [float(v) for v in self.uav_position],
            "objective": self.objective,
            "gamma_achieved": self.gamma_achieved,
            "classes": None if self.classes is None else [int(c) for c in self.classes],
            "trajectory": None if self.trajectory is None else self.trajectory.to_dict(),
            "info": self.info,
        }
