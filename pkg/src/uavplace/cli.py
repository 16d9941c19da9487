"""Command-line entry point: ``uavplace <subcommand>``.

Exit codes: 0 success, 2 configuration or input error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import sim
from .classify import ClassificationConfig, Mode, class_boundaries, classify_users
from .config import OUTPUT_ENV, RunConfig, describe_keys, load_config
from .deploy import DensityKind
from .errors import ConfigError, TerrainParseError, UavPlaceError
from .losmodel import (EMPIRICAL_SUBURBAN, REGULARIZATION_PRESETS, Family, LosModelParams, collect_samples, fit,
                       model_mse, read_samples_csv, write_samples_csv)
from .terrain import load_terrain, save_terrain

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    return obj


def write_json(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_clean(data), indent=2, sort_keys=True) + "\n")


def _read_json(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise TerrainParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _load_model(path) -> LosModelParams:
    d = _read_json(path)
    try:
        return LosModelParams(d.get("family", "sigmoid"), float(d["a"]), float(d["b"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: model needs numeric 'a' and 'b' ({exc})") from exc


def _run_config(args) -> RunConfig:
    cfg = load_config(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = cfg.with_campaign(seed=args.seed)
    return cfg


def _scenario(args, cfg: RunConfig) -> sim.Scenario:
    """Scenario from ``--scenario`` or generated from the config and seed."""
    c = cfg.campaign
    if getattr(args, "scenario", None):
        scen = sim.scenario_from_dict(_read_json(args.scenario), cfg.params)
        return scen if c.h_min is None else dataclasses.replace(scen, h_min=c.h_min)
    return sim.generate_scenario(c.area_obj, c.users_per_scenario / c.area_obj.size, c.buildings,
                                 sim.round_seed(c.seed, 0).spawn(2)[0], cfg.params, c.h_min)


def _model_for(args, cfg: RunConfig, scenario: sim.Scenario) -> LosModelParams:
    if getattr(args, "model", None):
        return _load_model(args.model)
    c = cfg.campaign
    seed = sim.round_seed(c.seed, 0).spawn(2)[1]
    return sim.fit_round_model(c, scenario, seed, (scenario.h_min, c.ceiling(scenario.h_min)))


# subcommands --------------------------------------------------------------

def cmd_gen_terrain(args, cfg: RunConfig, out: Path) -> str:
    scen = _scenario(argparse.Namespace(), cfg)
    save_terrain(scen.terrain, out / "terrain.json")
    write_json(out / "scenario.json", {**sim.scenario_to_dict(scen), "seed": cfg.seed})
    return (f"{len(scen.terrain.buildings)} buildings, {len(scen.users)} users, h_min={scen.h_min:.2f} m "
            f"-> {out / 'terrain.json'}, {out / 'scenario.json'}")


def cmd_fit_los(args, cfg: RunConfig, out: Path) -> str:
    c = cfg.campaign
    if args.samples:
        try:
            samples = read_samples_csv(args.samples)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
    elif args.terrain:
        terrain = load_terrain(args.terrain)
        h_min = terrain.default_h_min() if c.h_min is None else c.h_min
        rng = np.random.default_rng(np.random.SeedSequence(c.seed))
        probes = sim.outdoor_points(terrain, c.probe_points, rng)
        h_range = (h_min, c.ceiling(h_min))
        samples = collect_samples(terrain, probes, h_range, sim.feasible_thetas(terrain.area, h_range[0]),
                                  c.per_theta_count, rng)
        write_samples_csv(samples, out / "samples.csv")
    else:
        raise ConfigError("fit-los needs --samples or --terrain")
    lam1, lam2 = REGULARIZATION_PRESETS[args.preset] if args.preset else (c.lambda1, c.lambda2)
    lam1 = lam1 if args.lambda1 is None else args.lambda1
    lam2 = lam2 if args.lambda2 is None else args.lambda2
    family = Family(args.family or c.family)
    res = fit(samples, family, lam1, lam2, smooth=args.smooth)
    write_json(out / "model.json", res.to_dict())
    emp = model_mse(LosModelParams(Family.SIGMOID, *EMPIRICAL_SUBURBAN), samples)
    return (f"{family.value}: a={res.params.a:.6g} b={res.params.b:.6g} mse={res.mse:.6g} "
            f"(empirical-parameter mse={emp:.6g}) converged={res.converged} -> {out / 'model.json'}")


def cmd_classify(args, cfg: RunConfig, out: Path) -> str:
    c = cfg.campaign
    scen = _scenario(args, cfg)
    mode = Mode(args.mode)
    eps = c.epsilon if args.epsilon is None else args.epsilon
    model = None
    if mode is Mode.TERRAIN:
        model = _model_for(args, cfg, scen)
    if args.center:
        center = np.asarray(args.center, dtype=float)
    else:
        cxy = scen.users[:, :2].mean(axis=0) if len(scen.users) else np.asarray(scen.terrain.area.center)
        center = np.array([cxy[0], cxy[1], scen.h_min])
    ccfg = ClassificationConfig(eps, mode)
    r = np.linalg.norm(scen.users - center, axis=1)
    classes = classify_users(cfg.params, model, ccfg, center[2], r) if len(r) else np.zeros(0, dtype=int)
    r_min, r_max = class_boundaries(cfg.params, model, ccfg, center[2])
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "classes.csv", "w") as fh:
        fh.write("id,r,class\n")
        for i, (ri, ci) in enumerate(zip(r, classes)):
            fh.write(f"{i},{float(ri)!r},C{int(ci)}\n")
    write_json(out / "boundaries.json", {"r_min": r_min, "r_max": r_max, "r_min_open": math.isinf(r_min),
                                         "r_max_open": math.isinf(r_max), "h": center[2], "mode": mode.value,
                                         "epsilon": eps, "center": center})
    counts = {f"C{k}": int(np.sum(classes == k)) for k in (1, 2, 3)}
    return f"R_min={r_min:.2f} m R_max={r_max:.2f} m {counts} -> {out / 'classes.csv'}"


def cmd_deploy(args, cfg: RunConfig, out: Path) -> str:
    changes = {}
    if args.density:
        changes["density"] = args.density
    if args.epsilon is not None:
        changes["epsilon"] = args.epsilon
    if args.delta is not None:
        changes["delta"] = args.delta
    if args.h is not None:
        changes["bia_h"] = args.h
    if args.blockage_mode:
        changes["blockage_mode"] = args.blockage_mode
    cfg = cfg.with_campaign(**changes)
    c = cfg.campaign
    scen = _scenario(args, cfg)
    if len(scen.users) == 0:
        raise ConfigError("the scenario has no users")
    model = _model_for(args, cfg, scen) if args.algo in ("scpa", "hda") else None
    res = sim.place(args.algo, c, scen, scen.users, scen.terrain.area, model)
    coverage = sim.evaluate_deployment(scen, [res.uav_position], c.blockage_mode)
    doc = {**res.to_dict(), "coverage": coverage, "seed": c.seed, "h_min": scen.h_min,
           "los_model": None if model is None else model.to_dict()}
    write_json(out / "deployment.json", doc)
    p = res.uav_position
    return f"{args.algo}: UAV at ({p[0]:.2f}, {p[1]:.2f}, {p[2]:.2f}) coverage={coverage:.4f} -> {out / 'deployment.json'}"


def _campaign_overrides(args) -> dict:
    changes = {}
    if args.rounds is not None:
        changes["rounds"] = args.rounds
    if args.algo:
        changes["algorithms"] = tuple(a for item in args.algo for a in item.split(","))
    if args.blockage_mode:
        changes["blockage_mode"] = args.blockage_mode
    if args.n_uavs is not None:
        changes["n_uavs"] = args.n_uavs
    return changes


def _summary(reports) -> str:
    return "\n".join(f"{a:6s} mean coverage {r.mean:.4f} over {len(r.coverage)} rounds "
                     f"(failures {r.failures}), mean search length {r.length_stats()['mean']:.1f} m"
                     for a, r in reports.items())


def cmd_simulate(args, cfg: RunConfig, out: Path) -> str:
    cfg = cfg.with_campaign(**_campaign_overrides(args))
    reports = sim.run_campaign(cfg.campaign, workers=args.workers)
    sim.write_campaign(reports, cfg.campaign, out)
    return _summary(reports) + f"\n-> {out / 'report.json'}"


SWEEPABLE = ("epsilon", "n_uavs", "bia_h", "h_min", "h_max", "h_max_factor", "rho_cap", "density", "window",
             "blockage_mode", "users_per_scenario", "delta", "lambda1", "lambda2", "family")


def _parse_value(name: str, text: str):
    default = {f.name: f.default for f in dataclasses.fields(sim.CampaignConfig)}[name]
    if isinstance(default, str):
        return text
    if isinstance(default, int) and not isinstance(default, bool):
        return int(text)
    return float(text)


def cmd_sweep(args, cfg: RunConfig, out: Path) -> str:
    if args.param not in SWEEPABLE:
        raise ConfigError(f"cannot sweep '{args.param}'; choose from {', '.join(SWEEPABLE)}")
    cfg = cfg.with_campaign(**_campaign_overrides(args))
    try:
        values = [_parse_value(args.param, v) for v in args.values.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --values for {args.param}: {exc}") from exc
    table, lines = [], []
    for v in values:
        run = cfg.with_campaign(**{args.param: v})
        reports = sim.run_campaign(run.campaign, workers=args.workers)
        sim.write_campaign(reports, run.campaign, out / f"{args.param}={v}")
        table.append({"value": v, "mean_coverage": {a: r.mean for a, r in reports.items()},
                      "failures": {a: r.failures for a, r in reports.items()}})
        lines.append(f"{args.param}={v}: " + ", ".join(f"{a}={r.mean:.4f}" for a, r in reports.items()))
    write_json(out / "sweep.json", {"param": args.param, "seed": cfg.seed, "results": table})
    return "\n".join(lines) + f"\n-> {out / 'sweep.json'}"


# parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavplace", formatter_class=argparse.RawDescriptionHelpFormatter,
        description="Terrain-aware UAV base-station placement toolkit.",
        epilog=describe_keys() + f"\n\nOutputs go to --out, else ${OUTPUT_ENV}, else ./out."
                                 "\nExit codes: 0 ok, 2 configuration/input error, 3 runtime failure.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, epilog=describe_keys(),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", help="TOML or JSON config file")
        p.add_argument("--seed", type=int, help="root seed (overrides the config)")
        p.add_argument("--out", help="output directory")
        p.add_argument("--quiet", action="store_true", help="no summary on stdout")
        return p

    add("gen-terrain", "generate a random terrain and user scenario")

    p = add("fit-los", "fit the elevation-angle LoS model to samples")
    p.add_argument("--samples", help="CSV with columns theta_deg,t,n")
    p.add_argument("--terrain", help="terrain JSON to collect samples from (writes samples.csv)")
    p.add_argument("--family", choices=[f.value for f in Family])
    p.add_argument("--preset", choices=sorted(REGULARIZATION_PRESETS), help="regularisation preset")
    p.add_argument("--lambda1", type=float)
    p.add_argument("--lambda2", type=float)
    p.add_argument("--smooth", action="store_true", help="3-point moving average before fitting")

    p = add("classify", "classify users as C1/C2/C3 around a reference position")
    p.add_argument("--scenario", help="scenario JSON (default: generated from the seed)")
    p.add_argument("--model", help="LoS model JSON for terrain mode (default: fitted on the scenario)")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.NON_TERRAIN.value)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--center", type=float, nargs=3, metavar=("X", "Y", "Z"),
                   help="reference UAV position (default: user centroid at h_min)")

    p = add("deploy", "place one UAV with a chosen algorithm")
    p.add_argument("--algo", choices=list(sim.ALGORITHMS), required=True)
    p.add_argument("--scenario", help="scenario JSON (default: generated from the seed)")
    p.add_argument("--model", help="LoS model JSON for scpa/hda (default: fitted on the scenario)")
    p.add_argument("--density", choices=[d.value for d in DensityKind])
    p.add_argument("--epsilon", type=float)
    p.add_argument("--delta", type=float, help="granularity [m] (default 1.0)")
    p.add_argument("--h", type=float, help="altitude of the barycenter iteration [m]")
    p.add_argument("--blockage-mode", choices=["basic", "multiple"])

    for name, text in (("simulate", "Monte-Carlo comparison of algorithms"),
                       ("sweep", "repeat simulate over values of one parameter")):
        p = add(name, text)
        p.add_argument("--rounds", type=int)
        p.add_argument("--algo", action="append", help="algorithm(s), repeatable or comma separated")
        p.add_argument("--blockage-mode", choices=["basic", "multiple"])
        p.add_argument("--n-uavs", type=int, choices=[1, 2, 4])
        p.add_argument("--workers", type=int, default=1)
        if name == "sweep":
            p.add_argument("--param", required=True, help=f"one of: {', '.join(SWEEPABLE)}")
            p.add_argument("--values", required=True, help="comma-separated values")
    return parser


COMMANDS = {"gen-terrain": cmd_gen_terrain, "fit-los": cmd_fit_los, "classify": cmd_classify,
            "deploy": cmd_deploy, "simulate": cmd_simulate, "sweep": cmd_sweep}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _run_config(args)
        out = cfg.out_dir(args.out)
        out.mkdir(parents=True, exist_ok=True)
        summary = COMMANDS[args.command](args, cfg, out)
    except (ConfigError, TerrainParseError, FileNotFoundError) as exc:
        print(f"uavplace {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (UavPlaceError, ValueError, RuntimeError) as exc:
        print(f"uavplace {args.command}: failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if not args.quiet:
        print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
