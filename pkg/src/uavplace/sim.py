"""Scenario generation, deployment evaluation and Monte-Carlo campaigns.

Seeding: round ``i`` of a campaign with root seed ``s`` draws everything from
``SeedSequence(s, spawn_key=(i,))``.  That sequence spawns a scenario stream
(itself split into terrain and users) and a LoS-sampling stream, so each round
can be replayed in isolation and results do not depend on the worker count.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .channel import (BlockageMode, ChannelParams, LinkState, conditional_coverage, link_states,
                      mean_received_power)
from .classify import ClassificationConfig, Mode, class_boundaries
from .deploy import DensityKind, bia, brute_force, hda, mrsa, scpa
from .deploy.density import MassDensity
from .errors import ConfigError, DomainError, GenerationError, TerrainParseError
from .losmodel import DEFAULT_THETAS, Family, collect_samples, fit
from .terrain import Area, FootprintSpec, TerrainMap, sample_buildings, terrain_from_dict

ALGORITHMS = ("bia", "scpa", "mrsa", "hda", "brute")


@dataclass(frozen=True)
class BuildingConfig:
    density: float = 7.5e-4        # buildings per square meter
    rayleigh_scale: float = 15.0   # meters
    min_side: float = 8.0
    max_side: float = 15.0
    max_height: float | None = None

    @property
    def footprint(self) -> FootprintSpec:
        return FootprintSpec(self.min_side, self.max_side)


@dataclass(frozen=True)
class Scenario:
    terrain: TerrainMap
    users: np.ndarray  # (K, 3), z = 0
    params: ChannelParams
    h_min: float
    seed: object = None


def outdoor_points(terrain: TerrainMap, n: int, rng: np.random.Generator, area: Area | None = None,
                   max_attempts: int = 1000) -> np.ndarray:
    """``n`` uniform points of ``area`` that lie outside every footprint."""
    area = terrain.area if area is None else area
    out = np.empty((0, 2))
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > max_attempts:
            raise GenerationError("could not place users outside the buildings")
        need = n - len(out)
        pts = np.stack([rng.uniform(area.x_min, area.x_max, need), rng.uniform(area.y_min, area.y_max, need)], axis=1)
        out = np.vstack([out, pts[~terrain.inside_any(pts)]])
    return out


def generate_scenario(area: Area, user_intensity: float, buildings: BuildingConfig = BuildingConfig(),
                      seed=None, params: ChannelParams | None = None, h_min: float | None = None) -> Scenario:
    """Random terrain plus a Poisson number of outdoor users.

    ``user_intensity`` is in users per square meter; users drawn inside a
    footprint are redrawn.  ``h_min`` defaults to the tallest building + 1 m.
    """
    if user_intensity < 0:
        raise ValueError("user_intensity must be nonnegative")
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    terrain_ss, user_ss = ss.spawn(2)
    terrain = sample_buildings(area, buildings.density, buildings.rayleigh_scale, buildings.footprint, terrain_ss,
                               max_height=buildings.max_height)
    rng = np.random.default_rng(user_ss)
    k = int(rng.poisson(user_intensity * area.size))
    xy = outdoor_points(terrain, k, rng)
    users = np.zeros((k, 3))
    users[:, :2] = xy
    params = ChannelParams.default() if params is None else params
    h_min = terrain.default_h_min() if h_min is None else float(h_min)
    return Scenario(terrain, users, params, h_min, seed)


def scenario_to_dict(scenario: Scenario) -> dict:
    return {"terrain": scenario.terrain.to_dict(), "users": scenario.users[:, :2].tolist(),
            "h_min": scenario.h_min}


def scenario_from_dict(data: dict, params: ChannelParams | None = None) -> Scenario:
    """Inverse of :func:`scenario_to_dict`; ``h_min`` is optional."""
    if not isinstance(data, dict) or "terrain" not in data or "users" not in data:
        raise TerrainParseError("scenario needs 'terrain' and 'users' fields")
    terrain = terrain_from_dict(data["terrain"])
    try:
        xy = np.asarray(data["users"], dtype=float).reshape(-1, 2)
    except (TypeError, ValueError) as exc:
        raise TerrainParseError(f"field 'users': {exc}") from exc
    users = np.zeros((len(xy), 3))
    users[:, :2] = xy
    h_min = data.get("h_min")
    return Scenario(terrain, users, ChannelParams.default() if params is None else params,
                    terrain.default_h_min() if h_min is None else float(h_min))


def user_coverage(scenario: Scenario, uav_positions, mode: BlockageMode | str = BlockageMode.BASIC) -> np.ndarray:
    """Per-user coverage after associating with the strongest-mean-power UAV."""
    uavs = np.atleast_2d(np.asarray(uav_positions, dtype=float))
    if len(uavs) == 0:
        raise DomainError("at least one UAV position is required")
    users = scenario.users
    k = len(users)
    power = np.zeros((k, len(uavs)))
    cover = np.zeros((k, len(uavs)))
    for j, uav in enumerate(uavs):
        states = link_states(scenario.terrain.blockage_count(users, np.broadcast_to(uav, users.shape)), mode)
        r = np.linalg.norm(users - uav, axis=1)
        for st in (LinkState.LOS, LinkState.NLOS):
            sel = states == st
            if np.any(sel):
                power[sel, j] = mean_received_power(scenario.params, st, r[sel])
                cover[sel, j] = conditional_coverage(scenario.params, st, r[sel])
    best = np.argmax(power, axis=1)  # first UAV wins ties
    return cover[np.arange(k), best]


def evaluate_deployment(scenario: Scenario, uav_positions, mode: BlockageMode | str = BlockageMode.BASIC) -> float:
    """Overall coverage probability: the mean of the per-user coverages."""
    uavs = np.atleast_2d(np.asarray(uav_positions, dtype=float))
    if len(uavs) and np.any(uavs[:, 2] < scenario.h_min - 1e-9):
        raise DomainError("a UAV is below h_min")
    if len(scenario.users) == 0:
        raise DomainError("scenario has no users")
    return float(np.mean(user_coverage(scenario, uavs, mode)))


def step_users(scenario: Scenario, max_step: float, rng: np.random.Generator, max_attempts: int = 1000) -> Scenario:
    """Move every user a uniform distance in [0, max_step] in a uniform direction.

    Moves that would leave the area or enter a building are redrawn; after
    ``max_attempts`` failures the user stays put.
    """
    if max_step < 0:
        raise ValueError("max_step must be nonnegative")
    if max_step == 0:
        return scenario
    users = scenario.users.copy()
    area = scenario.terrain.area
    for i in range(len(users)):
        for _ in range(max_attempts):
            dist = rng.uniform(0.0, max_step)
            phi = rng.uniform(0.0, 2.0 * math.pi)
            p = users[i, :2] + dist * np.array([math.cos(phi), math.sin(phi)])
            if area.contains(p) and not scenario.terrain.inside_any(p)[0]:
                users[i, :2] = p
                break
    return replace(scenario, users=users)


def partition_area(area: Area, n_uavs: int) -> list[Area]:
    """Equal-area split: whole area, halves along the longer side, or quadrants."""
    if n_uavs == 1:
        return [area]
    mx = 0.5 * (area.x_min + area.x_max)
    my = 0.5 * (area.y_min + area.y_max)
    if n_uavs == 2:
        if area.width >= area.depth:
            return [Area(area.x_min, area.y_min, mx, area.y_max), Area(mx, area.y_min, area.x_max, area.y_max)]
        return [Area(area.x_min, area.y_min, area.x_max, my), Area(area.x_min, my, area.x_max, area.y_max)]
    if n_uavs == 4:
        return [Area(area.x_min, area.y_min, mx, my), Area(mx, area.y_min, area.x_max, my),
                Area(area.x_min, my, mx, area.y_max), Area(mx, my, area.x_max, area.y_max)]
    raise ConfigError(f"n_uavs must be 1, 2 or 4, got {n_uavs}")


def partition_multi_uav(scenario: Scenario, n_uavs: int) -> list[tuple[Area, np.ndarray]]:
    """Sub-regions with the indices of the users inside each.

    A user on a shared edge goes to the first sub-region that contains it.
    """
    out = []
    taken = np.zeros(len(scenario.users), dtype=bool)
    for sub in partition_area(scenario.terrain.area, n_uavs):
        inside = np.asarray(sub.contains(scenario.users[:, :2]), dtype=bool) & ~taken
        taken |= inside
        out.append((sub, np.flatnonzero(inside)))
    return out


@dataclass(frozen=True)
class CampaignConfig:
    """Everything that defines a campaign; all lengths in meters."""

    area: tuple[float, float, float, float] = (0.0, 0.0, 300.0, 300.0)
    users_per_scenario: float = 10.0
    buildings: BuildingConfig = BuildingConfig()
    rounds: int = 1000
    algorithms: tuple[str, ...] = ALGORITHMS
    blockage_mode: str = "basic"
    n_uavs: int = 1
    seed: int = 0
    delta: float = 1.0
    epsilon: float = 0.1
    density: str = "tri"
    bia_h: float | None = None       # None: h_min
    h_min: float | None = None       # None: tallest building + 1
    h_max: float | None = None       # None: h_max_factor * h_min; ceiling of the grid searches
    h_max_factor: float = 4.0
    rho_cap: float | None = None     # None: 4 * h_min; radius cap of the real-time search
    window: float = 30.0
    family: str = "sigmoid"
    lambda1: float = 0.01
    lambda2: float = 0.01
    per_theta_count: int = 200
    probe_points: int = 50
    channel: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.rounds < 1:
            raise ConfigError("rounds must be at least 1")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad:
            raise ConfigError(f"unknown algorithm(s): {', '.join(bad)}")
        if not self.delta > 0:
            raise ConfigError("delta must be positive")
        ClassificationConfig(self.epsilon)
        try:
            BlockageMode(self.blockage_mode)
            DensityKind(self.density)
            Family(self.family)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        partition_area(Area(*self.area), self.n_uavs)

    def ceiling(self, h_min: float) -> float:
        return self.h_max_factor * h_min if self.h_max is None else self.h_max

    @property
    def area_obj(self) -> Area:
        return Area(*self.area)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["algorithms"] = list(self.algorithms)
        d["area"] = list(self.area)
        return d


@dataclass(frozen=True)
class MonteCarloReport:
    algorithm: str
    coverage: tuple[float, ...]          # per completed round, in round order
    search_length: tuple[float, ...]     # per completed round (0 when no search)
    pair_distance: tuple[float, ...]     # farthest C2 pair distance, nan when |C2| < 2
    failures: int
    failed_rounds: tuple[int, ...] = ()

    @property
    def mean(self) -> float:
        return float(np.mean(self.coverage)) if self.coverage else math.nan

    def cdf(self) -> tuple[np.ndarray, np.ndarray]:
        x = np.sort(np.asarray(self.coverage, dtype=float))
        return x, np.arange(1, len(x) + 1) / len(x)

    def length_stats(self) -> dict:
        """Mean and the 20 % / 80 % quantile boundaries of the search lengths."""
        lengths = np.asarray(self.search_length, dtype=float)
        if len(lengths) == 0:
            return {"mean": math.nan, "shortest_20": math.nan, "longest_20": math.nan}
        return {"mean": float(lengths.mean()), "shortest_20": float(np.quantile(lengths, 0.2)),
                "longest_20": float(np.quantile(lengths, 0.8))}

    def to_dict(self) -> dict:
        return {"algorithm": self.algorithm, "rounds": len(self.coverage), "mean_coverage": self.mean,
                "failures": self.failures, "failed_rounds": list(self.failed_rounds),
                "search_length": self.length_stats()}


def round_seed(root_seed: int, index: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(root_seed, spawn_key=(index,))


def feasible_thetas(area: Area, h_low: float, thetas=DEFAULT_THETAS) -> tuple[float, ...]:
    """Angles whose horizontal offset at ``h_low`` fits within half the shorter side."""
    reach = 0.5 * min(area.width, area.depth)
    return tuple(t for t in thetas if h_low / math.tan(math.radians(t)) <= reach)


def fit_round_model(cfg: CampaignConfig, scenario: Scenario, seed, h_range):
    """LoS model fitted on samples collected over the scenario's terrain."""
    rng = np.random.default_rng(seed)
    probes = outdoor_points(scenario.terrain, cfg.probe_points, rng)
    samples = collect_samples(scenario.terrain, probes, h_range, feasible_thetas(scenario.terrain.area, h_range[0]),
                              cfg.per_theta_count, rng)
    return fit(samples, Family(cfg.family), cfg.lambda1, cfg.lambda2).params


def place(algo: str, cfg: CampaignConfig, scenario: Scenario, users: np.ndarray, area: Area, los_model):
    """Run one placement algorithm on ``users``; returns a DeploymentResult."""
    terrain, params, h_min = scenario.terrain, scenario.params, scenario.h_min
    h_max = cfg.ceiling(h_min)
    rho_cap = 4.0 * h_min if cfg.rho_cap is None else cfg.rho_cap
    ccfg = ClassificationConfig(cfg.epsilon)
    if algo == "bia":
        h = h_min if cfg.bia_h is None else cfg.bia_h
        r_min, r_max = class_boundaries(params, None, ClassificationConfig(cfg.epsilon, Mode.NON_TERRAIN), h)
        return bia(users, MassDensity(cfg.density, r_min, r_max, h), h, delta=cfg.delta)
    if algo == "scpa":
        return scpa(users, params, los_model, (h_min, h_max), None, cfg.window, cfg.delta, area)
    if algo == "mrsa":
        return mrsa(terrain, users, params, cfg.density, ccfg, cfg.bia_h, cfg.delta, h_min, rho_cap=rho_cap)
    if algo == "hda":
        return hda(terrain, users, params, los_model, ccfg, (h_min, h_max), cfg.delta, h_min, cfg.window,
                   rho_cap=rho_cap)
    return brute_force(terrain, users, params, cfg.delta, (h_min, h_max), cfg.blockage_mode, area)


def run_round(cfg: CampaignConfig, index: int) -> dict:
    """One round for every configured algorithm on a shared scenario."""
    ss = round_seed(cfg.seed, index)
    scen_ss, los_ss = ss.spawn(2)
    params = ChannelParams.from_config(cfg.channel)
    scenario = generate_scenario(cfg.area_obj, cfg.users_per_scenario / cfg.area_obj.size, cfg.buildings,
                                 scen_ss, params, cfg.h_min)
    if len(scenario.users) == 0:
        raise GenerationError("scenario has no users")
    h_max = cfg.ceiling(scenario.h_min)
    los_model = None
    if {"scpa", "hda"} & set(cfg.algorithms):
        los_model = fit_round_model(cfg, scenario, los_ss, (scenario.h_min, h_max))
    out = {}
    parts = partition_multi_uav(scenario, cfg.n_uavs)
    for algo in cfg.algorithms:
        positions, length, pair = [], 0.0, math.nan
        for sub, idx in parts:
            if len(idx) == 0:
                cx, cy = sub.center
                positions.append([cx, cy, scenario.h_min])
                continue
            res = place(algo, cfg, scenario, scenario.users[idx], sub, los_model)
            positions.append(res.uav_position)
            if res.trajectory is not None:
                length += res.trajectory.total_length
            if "pair_distance" in res.info and cfg.n_uavs == 1:
                pair = res.info["pair_distance"]
        cov = evaluate_deployment(scenario, positions, cfg.blockage_mode)
        out[algo] = {"coverage": cov, "length": length, "pair": pair,
                     "positions": [[float(v) for v in p] for p in positions]}
    return out


def _safe_round(args):
    cfg, index = args
    try:
        return index, run_round(cfg, index), None
    except Exception as exc:  # recorded as a failed round
        return index, None, f"{type(exc).__name__}: {exc}"


def run_campaign(cfg: CampaignConfig, workers: int = 1, progress=None) -> dict[str, MonteCarloReport]:
    """Run ``cfg.rounds`` rounds and collect one report per algorithm.

    Failed rounds are skipped for every algorithm and counted.  Results are
    assembled in round order, so the report does not depend on ``workers``.
    """
    jobs = [(cfg, i) for i in range(cfg.rounds)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_safe_round, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = []
        for job in jobs:
            results.append(_safe_round(job))
            if progress is not None:
                progress(job[1])
    results.sort(key=lambda t: t[0])
    failed = tuple(i for i, res, err in results if res is None)
    ok = [res for _, res, err in results if res is not None]
    reports = {}
    for algo in cfg.algorithms:
        reports[algo] = MonteCarloReport(
            algo,
            tuple(r[algo]["coverage"] for r in ok),
            tuple(r[algo]["length"] for r in ok),
            tuple(r[algo]["pair"] for r in ok),
            len(failed), failed)
    return reports


def write_campaign(reports: dict[str, MonteCarloReport], cfg: CampaignConfig, outdir) -> None:
    """Write ``report.json`` and one ``cdf_<algo>.csv`` per algorithm."""
    os.makedirs(outdir, exist_ok=True)
    doc = {"config": cfg.to_dict(), "seed": cfg.seed,
           "seed_rule": "round i uses SeedSequence(seed, spawn_key=(i,))",
           "reports": {a: r.to_dict() for a, r in reports.items()}}
    with open(os.path.join(outdir, "report.json"), "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    for algo, rep in reports.items():
        x, f = rep.cdf()
        with open(os.path.join(outdir, f"cdf_{algo}.csv"), "w") as fh:
            fh.write("coverage,cdf\n")
            for a, b in zip(x, f):
                fh.write(f"{float(a)!r},{float(b)!r}\n")
