"""2.5-D terrain: vertical prism buildings on flat ground.

Line-of-sight queries are exact.  The ground projection of a user-UAV link
does not depend on the UAV altitude, so each building reduces to a *critical
altitude*: the link is blocked by that building iff the UAV flies strictly
below it.  Raising the UAV therefore never creates blockage.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import GenerationError, InvalidTerrainError, TerrainParseError

EPS = 1e-9  # absolute 2-D tolerance in meters


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float = 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass(frozen=True)
class Area:
    """Axis-aligned rectangle on the ground plane."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        vals = (self.x_min, self.y_min, self.x_max, self.y_max)
        if not all(math.isfinite(v) for v in vals):
            raise InvalidTerrainError(f"area bounds must be finite, got {vals}")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise InvalidTerrainError(f"area must have positive extent, got {vals}")

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def depth(self) -> float:
        return self.y_max - self.y_min

    @property
    def size(self) -> float:
        return self.width * self.depth

    @property
    def center(self) -> tuple[float, float]:
        return (0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def contains(self, xy, tol: float = EPS) -> np.ndarray | bool:
        xy = np.asarray(xy, dtype=float)
        inside = ((xy[..., 0] >= self.x_min - tol) & (xy[..., 0] <= self.x_max + tol)
                  & (xy[..., 1] >= self.y_min - tol) & (xy[..., 1] <= self.y_max + tol))
        return bool(inside) if inside.ndim == 0 else inside

    def to_dict(self) -> dict:
        return {"x_min": self.x_min, "y_min": self.y_min, "x_max": self.x_max, "y_max": self.y_max}


def _signed_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segments_intersect(p1, p2, q1, q2) -> bool:
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
        return True

    def on_seg(a, b, c):
        return (min(a[0], b[0]) <= c[0] <= max(a[0], b[0])
                and min(a[1], b[1]) <= c[1] <= max(a[1], b[1]))

    return ((d1 == 0 and on_seg(q1, q2, p1)) or (d2 == 0 and on_seg(q1, q2, p2))
            or (d3 == 0 and on_seg(p1, p2, q1)) or (d4 == 0 and on_seg(p1, p2, q2)))


def _is_simple(poly: np.ndarray) -> bool:
    n = len(poly)
    for i in range(n):
        a1, a2 = poly[i], poly[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            if _segments_intersect(a1, a2, poly[j], poly[(j + 1) % n]):
                return False
    return True


def _is_convex(poly: np.ndarray) -> bool:
    n = len(poly)
    return all(_cross(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) >= 0 for i in range(n))


def _drop_collinear(poly: np.ndarray) -> np.ndarray:
    # vertices in the middle of a straight edge do not change the region
    keep = [i for i in range(len(poly))
            if abs(_cross(poly[i - 1], poly[i], poly[(i + 1) % len(poly)])) > EPS * EPS]
    return poly[keep]


def _ear_clip(poly: np.ndarray) -> list[np.ndarray]:
    """Triangulate a simple CCW polygon."""
    idx = list(range(len(poly)))
    tris = []
    guard = 0
    while len(idx) > 3 and guard < 10 * len(poly) ** 2:
        guard += 1
        n = len(idx)
        for k in range(n):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % n]
            a, b, c = poly[i0], poly[i1], poly[i2]
            if _cross(a, b, c) <= 0:
                continue
            ear = True
            for m in idx:
                if m in (i0, i1, i2):
                    continue
                p = poly[m]
                if _cross(a, b, p) >= 0 and _cross(b, c, p) >= 0 and _cross(c, a, p) >= 0:
                    ear = False
                    break
            if ear:
                tris.append(np.array([a, b, c]))
                del idx[k]
                break
        else:
            raise InvalidTerrainError("polygon triangulation failed")
    tris.append(poly[idx])
    return tris


@dataclass(frozen=True)
class Building:
    """Vertical prism: simple polygon footprint extruded from the ground to ``height``."""

    footprint: tuple[tuple[float, float], ...]
    height: float

    def __post_init__(self):
        fp = tuple((float(x), float(y)) for x, y in self.footprint)
        object.__setattr__(self, "footprint", fp)
        object.__setattr__(self, "height", float(self.height))
        if len(fp) < 3:
            raise InvalidTerrainError(f"footprint needs at least 3 vertices, got {len(fp)}")
        arr = np.array(fp)
        if not np.all(np.isfinite(arr)):
            raise InvalidTerrainError("footprint coordinates must be finite")
        if not (math.isfinite(self.height) and self.height > 0):
            raise InvalidTerrainError(f"building height must be positive and finite, got {self.height}")
        if abs(_signed_area(arr)) <= EPS:
            raise InvalidTerrainError("footprint has zero area")
        if not _is_simple(arr):
            raise InvalidTerrainError("footprint is self-intersecting")

    @classmethod
    def rectangle(cls, cx: float, cy: float, width: float, depth: float, height: float) -> "Building":
        hx, hy = 0.5 * width, 0.5 * depth
        return cls(((cx - hx, cy - hy), (cx + hx, cy - hy), (cx + hx, cy + hy), (cx - hx, cy + hy)), height)

    def ccw(self) -> np.ndarray:
        arr = np.array(self.footprint)
        return arr if _signed_area(arr) > 0 else arr[::-1].copy()

    def convex_pieces(self) -> list[np.ndarray]:
        poly = _drop_collinear(self.ccw())
        return [poly] if _is_convex(poly) else _ear_clip(poly)

    def contains(self, xy) -> np.ndarray:
        """Strict point-in-footprint test (boundary points are outside)."""
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        inside = np.zeros(len(xy), dtype=bool)
        for piece in self.convex_pieces():
            ok = np.ones(len(xy), dtype=bool)
            for a, b in zip(piece, np.roll(piece, -1, axis=0)):
                ok &= ((b[0] - a[0]) * (xy[:, 1] - a[1]) - (b[1] - a[1]) * (xy[:, 0] - a[0])) > EPS
            inside |= ok
        return inside


@dataclass(frozen=True)
class TerrainMap:
    """Immutable collection of buildings inside a rectangular area."""

    buildings: tuple[Building, ...]
    area: Area

    def __post_init__(self):
        object.__setattr__(self, "buildings", tuple(self.buildings))
        for i, b in enumerate(self.buildings):
            if not np.all(self.area.contains(np.array(b.footprint))):
                raise InvalidTerrainError(f"building {i} footprint extends outside the area")

    @property
    def max_height(self) -> float:
        return max((b.height for b in self.buildings), default=0.0)

    def default_h_min(self) -> float:
        """Lowest legal UAV altitude: one meter above the tallest building."""
        return self.max_height + 1.0

    @cached_property
    def _pieces(self):
        normals, offsets, n_edges, bbox, owner = [], [], [], [], []
        for bi, b in enumerate(self.buildings):
            for piece in b.convex_pieces():
                nxt = np.roll(piece, -1, axis=0)
                edge = nxt - piece
                length = np.hypot(edge[:, 0], edge[:, 1])
                keep = length > 0
                nrm = np.stack([edge[keep, 1], -edge[keep, 0]], axis=1) / length[keep, None]
                normals.append(nrm)
                offsets.append(np.einsum("ij,ij->i", nrm, piece[keep]))
                n_edges.append(len(nrm))
                bbox.append([piece[:, 0].min(), piece[:, 1].min(), piece[:, 0].max(), piece[:, 1].max()])
                owner.append(bi)
        e_max = max(n_edges, default=1)
        npc = len(owner)
        nrm_arr = np.zeros((npc, e_max, 2))
        off_arr = np.ones((npc, e_max))
        for p in range(npc):
            nrm_arr[p, : n_edges[p]] = normals[p]
            off_arr[p, : n_edges[p]] = offsets[p]
        return (nrm_arr, off_arr, np.array(n_edges, dtype=np.int64),
                np.array(bbox, dtype=float).reshape(npc, 4), np.array(owner, dtype=np.int64),
                np.array([b.height for b in self.buildings], dtype=float))

    def critical_altitudes(self, user_xy, uav_xy) -> np.ndarray:
        """Per-building critical altitude for links from ``user_xy`` to ``uav_xy``.

        Inputs broadcast against each other (last axis = x, y[, z]); the result
        has the broadcast shape with a trailing axis of length ``len(buildings)``.
        A link to a UAV at altitude ``z`` is blocked by building ``b`` iff
        ``z < result[..., b]``.
        """
        u = np.asarray(user_xy, dtype=float)[..., :2]
        v = np.asarray(uav_xy, dtype=float)[..., :2]
        u, v = np.broadcast_arrays(u, v)
        shape = u.shape[:-1]
        nb = len(self.buildings)
        if nb == 0:
            return np.zeros(shape + (0,))
        out = _kernels.crit_matrix(np.ascontiguousarray(u.reshape(-1, 2)),
                                   np.ascontiguousarray(v.reshape(-1, 2)), *self._pieces, EPS)
        return out.reshape(shape + (nb,))

    def critical_top2(self, users_xy, xs, ys) -> np.ndarray:
        """Largest two critical altitudes for every user over the grid ``xs`` x ``ys``."""
        users = np.ascontiguousarray(np.asarray(users_xy, dtype=float)[:, :2])
        xs = np.ascontiguousarray(xs, dtype=float)
        ys = np.ascontiguousarray(ys, dtype=float)
        if not self.buildings:
            return np.zeros((len(users), len(xs), len(ys), 2))
        return _kernels.crit_top2_grid(users, xs, ys, *self._pieces, EPS)

    def blockage_count(self, user, uav) -> np.ndarray | int:
        """Number of distinct buildings intersecting the open segment user -> uav."""
        uav = np.asarray(uav, dtype=float)
        if np.any(uav[..., 2] <= 0):
            raise InvalidTerrainError("UAV altitude must be positive")
        crit = self.critical_altitudes(user, uav)
        counts = np.sum(uav[..., 2][..., None] < crit, axis=-1)
        return int(counts) if np.ndim(counts) == 0 else counts

    def is_los(self, user, uav) -> np.ndarray | bool:
        return self.blockage_count(user, uav) == 0

    def inside_any(self, xy) -> np.ndarray:
        """True where a ground point lies strictly inside some footprint."""
        xy = np.atleast_2d(np.asarray(xy, dtype=float))
        hit = np.zeros(len(xy), dtype=bool)
        for b in self.buildings:
            hit |= b.contains(xy)
        return hit

    def without(self, index: int) -> "TerrainMap":
        return TerrainMap(self.buildings[:index] + self.buildings[index + 1:], self.area)

    def to_dict(self) -> dict:
        return {"area": self.area.to_dict(),
                "buildings": [{"footprint": [list(p) for p in b.footprint], "height": b.height}
                              for b in self.buildings]}


def blockage_count(terrain: TerrainMap, user, uav):
    return terrain.blockage_count(user, uav)


def is_los(terrain: TerrainMap, user, uav):
    return terrain.is_los(user, uav)


@dataclass(frozen=True)
class FootprintSpec:
    """Side lengths (meters) of generated rectangular footprints, drawn uniformly."""

    min_side: float = 10.0
    max_side: float = 30.0


def sample_buildings(area: Area, density: float, rayleigh_scale: float,
                     footprint_spec: FootprintSpec = FootprintSpec(),
                     rng_seed=None, max_attempts: int = 1000, max_height: float | None = None) -> TerrainMap:
    """Random terrain: Poisson building centers, rectangular footprints, Rayleigh heights.

    Args:
        area: ground rectangle.
        density: expected buildings per square meter.
        rayleigh_scale: Rayleigh scale parameter of the heights (meters).
        footprint_spec: uniform range of the rectangle side lengths.
        rng_seed: anything accepted by ``numpy.random.default_rng``.
        max_attempts: rejection budget per building for keeping footprints in the area.
        max_height: optional cap; heights above it are redrawn (truncated Rayleigh).

    Raises:
        GenerationError: a footprint could not be placed inside the area.
    """
    if density < 0:
        raise ValueError("density must be nonnegative")
    if rayleigh_scale <= 0:
        raise ValueError("rayleigh_scale must be positive")
    if max_height is not None and max_height <= 0:
        raise ValueError("max_height must be positive")
    rng = np.random.default_rng(rng_seed)
    count = rng.poisson(density * area.size)
    buildings = []
    for _ in range(count):
        w, d = rng.uniform(footprint_spec.min_side, footprint_spec.max_side, size=2)
        for _attempt in range(max_attempts):
            cx = rng.uniform(area.x_min, area.x_max)
            cy = rng.uniform(area.y_min, area.y_max)
            if (cx - w / 2 >= area.x_min and cx + w / 2 <= area.x_max
                    and cy - d / 2 >= area.y_min and cy + d / 2 <= area.y_max):
                break
        else:
            raise GenerationError(f"could not fit a {w:.1f} x {d:.1f} m footprint after {max_attempts} attempts")
        height = rng.rayleigh(rayleigh_scale)
        if max_height is not None:
            for _attempt in range(max_attempts):
                if height <= max_height:
                    break
                height = rng.rayleigh(rayleigh_scale)
            else:
                raise GenerationError(f"no height below {max_height} m after {max_attempts} draws")
        buildings.append(Building.rectangle(cx, cy, w, d, height))
    return TerrainMap(tuple(buildings), area)


def _field(obj, key, ctx):
    if not isinstance(obj, dict) or key not in obj:
        raise TerrainParseError(f"missing field '{ctx}{key}'")
    return obj[key]


def _number(value, ctx) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise TerrainParseError(f"field '{ctx}' must be a number, got {value!r}")
    return float(value)


def terrain_from_dict(data: dict) -> TerrainMap:
    area_d = _field(data, "area", "")
    area = Area(*(_number(_field(area_d, k, "area."), f"area.{k}")
                  for k in ("x_min", "y_min", "x_max", "y_max")))
    raw = _field(data, "buildings", "")
    if not isinstance(raw, list):
        raise TerrainParseError("field 'buildings' must be a list")
    buildings = []
    for i, b in enumerate(raw):
        ctx = f"buildings[{i}]"
        fp = _field(b, "footprint", ctx + ".")
        if not isinstance(fp, list):
            raise TerrainParseError(f"field '{ctx}.footprint' must be a list of [x, y] pairs")
        pts = []
        for j, p in enumerate(fp):
            if not isinstance(p, list) or len(p) != 2:
                raise TerrainParseError(f"field '{ctx}.footprint[{j}]' must be an [x, y] pair")
            pts.append((_number(p[0], f"{ctx}.footprint[{j}][0]"), _number(p[1], f"{ctx}.footprint[{j}][1]")))
        height = _number(_field(b, "height", ctx + "."), f"{ctx}.height")
        try:
            buildings.append(Building(tuple(pts), height))
        except InvalidTerrainError as exc:
            raise TerrainParseError(f"{ctx}: {exc}") from exc
    try:
        return TerrainMap(tuple(buildings), area)
    except InvalidTerrainError as exc:
        raise TerrainParseError(str(exc)) from exc


def load_terrain(path) -> TerrainMap:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TerrainParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return terrain_from_dict(data)
    except TerrainParseError as exc:
        raise TerrainParseError(f"{path}: {exc}") from exc


def save_terrain(terrain: TerrainMap, path) -> None:
    # json writes floats with repr(), the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(terrain.to_dict(), indent=2) + "\n")


def points_array(points: Sequence) -> np.ndarray:
    """Coerce a list of Point3 / tuples / arrays to an (N, 3) float array."""
    rows = []
    for p in points:
        if isinstance(p, Point3):
            rows.append((p.x, p.y, p.z))
        else:
            q = tuple(float(v) for v in p)
            rows.append(q if len(q) == 3 else q + (0.0,))
    return np.array(rows, dtype=float).reshape(-1, 3)
