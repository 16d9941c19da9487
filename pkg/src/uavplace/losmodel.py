"""Elevation-angle LoS probability: model families, data collection and fitting."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, SamplingError
from .terrain import TerrainMap

# empirical suburban parameters used as the regularisation anchor and start point
EMPIRICAL_SUBURBAN = (4.88, 0.43)
DEFAULT_THETAS = tuple(float(t) for t in range(5, 90, 5))
REGULARIZATION_PRESETS = {
    "none": (0.0, 0.0),
    "reg1": (0.001, 0.1),
    "reg2": (0.01, 0.01),
}


class Family(str, enum.Enum):
    SIGMOID = "sigmoid"
    TANH = "tanh"
    RELU = "relu"


# start points for families other than the sigmoid, whose empirical
# parameters have no meaning for them
FAMILY_START = {
    Family.SIGMOID: EMPIRICAL_SUBURBAN,
    Family.TANH: (1.0, 0.03),
    Family.RELU: (1.0 / 90.0, 0.0),
}


@dataclass(frozen=True)
class LosModelParams:
    family: Family
    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        if self.family is Family.SIGMOID and not (self.a > 0 and self.b > 0):
            raise DomainError(f"sigmoid parameters must be positive, got a={self.a}, b={self.b}")

    @classmethod
    def empirical(cls) -> "LosModelParams":
        return cls(Family.SIGMOID, *EMPIRICAL_SUBURBAN)

    def to_dict(self) -> dict:
        return {"family": self.family.value, "a": self.a, "b": self.b}


@dataclass(frozen=True)
class ElevationSample:
    theta: float  # degrees
    t: float      # LoS fraction
    n: int


@dataclass(frozen=True)
class FitResult:
    params: LosModelParams
    mse: float
    converged: bool
    iterations: int
    objective_trace: tuple[float, ...] = ()

    def to_dict(self) -> dict:
        return {"family": self.params.family.value, "a": self.params.a, "b": self.params.b,
                "mse": self.mse, "converged": self.converged}


def elevation_angle(h, r):
    """Elevation angle in degrees of a UAV at height ``h`` and 3-D distance ``r``."""
    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    if np.any(~(h > 0)) or np.any(h > r * (1 + 1e-12)):
        raise DomainError("elevation angle needs 0 < h <= r")
    ground = np.sqrt(np.maximum(r * r - h * h, 0.0))
    theta = np.degrees(np.arctan2(h, ground))
    return float(theta) if theta.ndim == 0 else theta


def _raw(family: Family, a, b, theta):
    if family is Family.SIGMOID:
        return 1.0 / (1.0 + a * np.exp(-b * (theta - a)))
    if family is Family.TANH:
        return a * np.tanh(b * theta)
    return np.maximum(0.0, a * theta + b)


def p_los(model: LosModelParams, theta):
    """LoS probability at elevation ``theta`` (degrees), clamped to [0, 1]."""
    theta = np.asarray(theta, dtype=float)
    with np.errstate(over="ignore"):
        p = np.clip(_raw(model.family, model.a, model.b, theta), 0.0, 1.0)
    return float(p) if p.ndim == 0 else p


def jacobian(family: Family, a: float, b: float, theta) -> np.ndarray:
    """d model / d(a, b) of the clamped model; shape (len(theta), 2)."""
    theta = np.asarray(theta, dtype=float)
    raw = _raw(family, a, b, theta)
    if family is Family.SIGMOID:
        e = np.exp(-b * (theta - a))
        p = 1.0 / (1.0 + a * e)
        # p = 1/(1+u), u = a e; du/da = e + a e b, du/db = -a e (theta - a)
        da = -(p ** 2) * (e + a * b * e)
        db = (p ** 2) * a * e * (theta - a)
    elif family is Family.TANH:
        th = np.tanh(b * theta)
        da = th
        db = a * theta * (1.0 - th ** 2)
    else:
        da = np.where(raw > 0, theta, 0.0)
        db = np.where(raw > 0, 1.0, 0.0)
    active = (raw > 0.0) & (raw < 1.0)
    if family is Family.SIGMOID:
        active = np.ones_like(active)
    return np.stack([np.where(active, da, 0.0), np.where(active, db, 0.0)], axis=-1)


def smooth_samples(samples: list[ElevationSample]) -> list[ElevationSample]:
    """Three-point moving average of ``t`` over theta-sorted samples."""
    s = sorted(samples, key=lambda e: e.theta)
    t = np.array([e.t for e in s])
    if len(t) < 3:
        return s
    sm = t.copy()
    sm[1:-1] = (t[:-2] + t[1:-1] + t[2:]) / 3.0
    return [ElevationSample(e.theta, float(v), e.n) for e, v in zip(s, sm)]


def fit(samples, family=Family.SIGMOID, lambda1: float = 0.01, lambda2: float = 0.01,
        a_hat: float | None = None, b_hat: float | None = None, *,
        max_iter: int = 200, step_tol: float = 1e-10, smooth: bool = False) -> FitResult:
    """Regularised nonlinear least squares for the LoS curve.

    Minimises ``sum_i (t_i - f(theta_i))**2 + lambda1 (a - a_hat)**2 + lambda2 (b - b_hat)**2``
    with a Levenberg-damped Gauss-Newton iteration started at ``(a_hat, b_hat)``.
    For the sigmoid the iterate is kept inside ``a, b > 0``.

    Returns the final parameters with the *unregularised* mean squared residual.
    """
    family = Family(family)
    if a_hat is None or b_hat is None:
        a_hat, b_hat = FAMILY_START[family]
    if lambda1 < 0 or lambda2 < 0:
        raise ValueError("regularisation weights must be nonnegative")
    if smooth:
        samples = smooth_samples(list(samples))
    theta = np.array([s.theta for s in samples], dtype=float)
    t = np.array([s.t for s in samples], dtype=float)
    if len(np.unique(theta)) < 2:
        raise ValueError("fitting needs at least two distinct elevation angles")
    anchor = np.array([a_hat, b_hat], dtype=float)
    w = np.array([lambda1, lambda2], dtype=float)
    positive = family is Family.SIGMOID
    floor = 1e-12

    def objective(x):
        with np.errstate(over="ignore"):
            res = t - np.clip(_raw(family, x[0], x[1], theta), 0.0, 1.0)
        return float(res @ res + w @ (x - anchor) ** 2)

    x = anchor.copy()
    if positive:
        x = np.maximum(x, floor)
    f = objective(x)
    trace = [f]
    damping = 1e-3
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        with np.errstate(over="ignore"):
            res = t - np.clip(_raw(family, x[0], x[1], theta), 0.0, 1.0)
            jac = jacobian(family, x[0], x[1], theta)
        grad = -jac.T @ res + w * (x - anchor)
        hess = jac.T @ jac + np.diag(w)
        accepted = False
        while damping < 1e16:
            lhs = hess + damping * np.diag(np.maximum(np.diag(hess), 1e-12))
            try:
                step = np.linalg.solve(lhs, -grad)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            x_new = x + step
            if positive:
                x_new = np.maximum(x_new, floor)
            f_new = objective(x_new)
            if f_new <= f:
                accepted = True
                break
            damping *= 10.0
        if not accepted:
            converged = True  # no descent direction left at machine precision
            break
        moved = np.linalg.norm(x_new - x)
        x, f_old, f = x_new, f, f_new
        trace.append(f)
        damping = max(damping / 10.0, 1e-15)
        if moved <= step_tol * (1.0 + np.linalg.norm(x)) or (f_old - f) <= 1e-15 * max(f_old, 1e-300):
            converged = True
            break
    params = LosModelParams(family, float(x[0]), float(x[1]))
    return FitResult(params, model_mse(params, samples), converged, it, tuple(trace))


def model_mse(model: LosModelParams, samples) -> float:
    theta = np.array([s.theta for s in samples], dtype=float)
    t = np.array([s.t for s in samples], dtype=float)
    return float(np.mean((t - p_los(model, theta)) ** 2))


def collect_samples(terrain: TerrainMap, users, h_range, thetas=DEFAULT_THETAS, per_theta_count: int = 200,
                    rng: np.random.Generator | int | None = None, max_attempts: int = 1000) -> list[ElevationSample]:
    """Empirical LoS fraction at fixed elevation angles.

    For every angle, ``per_theta_count`` links are drawn: a random user, a
    random UAV altitude in ``h_range`` and a random azimuth, with the UAV at
    the horizontal distance giving exactly that elevation.  Positions outside
    the area are redrawn.
    """
    rng = np.random.default_rng(rng)
    users = np.asarray(users, dtype=float)[:, :2]
    if len(users) == 0:
        raise SamplingError("no ground points to sample from")
    h_lo, h_hi = float(h_range[0]), float(h_range[1])
    out = []
    for theta in thetas:
        if not (0 < theta <= 90):
            raise DomainError(f"elevation angle must be in (0, 90], got {theta}")
        tan = math.tan(math.radians(theta))
        ground_pts = np.empty((per_theta_count, 2))
        uav_pts = np.empty((per_theta_count, 3))
        filled = 0
        attempts = 0
        while filled < per_theta_count:
            attempts += 1
            if attempts > max_attempts:
                raise SamplingError(f"could not place the UAV inside the area for theta={theta}")
            need = per_theta_count - filled
            u = users[rng.integers(len(users), size=need)]
            h = rng.uniform(h_lo, h_hi, size=need)
            rho = h / tan if theta < 90 else np.zeros(need)
            phi = rng.uniform(0.0, 2 * math.pi, size=need)
            pos = u + rho[:, None] * np.stack([np.cos(phi), np.sin(phi)], axis=1)
            ok = np.asarray(terrain.area.contains(pos))
            k = int(ok.sum())
            ground_pts[filled:filled + k] = u[ok]
            uav_pts[filled:filled + k, :2] = pos[ok]
            uav_pts[filled:filled + k, 2] = h[ok]
            filled += k
        los = np.asarray(terrain.is_los(ground_pts, uav_pts))
        out.append(ElevationSample(float(theta), float(los.mean()), per_theta_count))
    return out


def write_samples_csv(samples, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["theta_deg", "t", "n"])
        for s in samples:
            w.writerow([repr(s.theta), repr(s.t), s.n])


def read_samples_csv(path) -> list[ElevationSample]:
    path = Path(path)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"theta_deg", "t", "n"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing column(s) {sorted(missing)}")
        out = []
        for line, row in enumerate(reader, start=2):
            try:
                out.append(ElevationSample(float(row["theta_deg"]), float(row["t"]), int(row["n"])))
            except (TypeError, ValueError) as exc:
                raise ValueError(f"{path}:{line}: {exc}") from exc
    return out
