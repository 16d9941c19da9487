"""Run configuration: one TOML or JSON file with optional sections.

Every key has a default, so an empty file (or no file) is a valid
configuration.  Unknown sections or keys raise :class:`ConfigError` naming the
offending key.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .channel import ChannelParams
from .errors import ConfigError
from .sim import BuildingConfig, CampaignConfig

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

OUTPUT_ENV = "UAVPLACE_OUTPUT_DIR"

# section -> key -> (default, help); channel defaults are the system table values
KEY_DOCS: dict[str, dict[str, tuple[object, str]]] = {
    "": {
        "seed": (0, "root seed; every random stream is derived from it"),
        "output_dir": (None, f"output directory (default: ${OUTPUT_ENV} or ./out)"),
    },
    "channel": {
        "tx_power_dbm": (30.0, "UAV transmit power [dBm]"),
        "noise_dbm": (-98.0, "noise power [dBm]"),
        "snr_threshold_db": (22.0, "SNR threshold gamma [dB]"),
        "alpha_los": (2.0, "LoS path-loss exponent"),
        "alpha_nlos": (2.3, "NLoS path-loss exponent"),
        "m_los": (2, "LoS Nakagami shape (integer)"),
        "m_nlos": (1, "NLoS Nakagami shape (integer)"),
        "eta_los_db": (-35.0, "LoS mean additional loss [dB]"),
        "eta_nlos_db": (-48.0, "NLoS mean additional loss [dB]"),
    },
    "terrain": {
        "area": ([0.0, 0.0, 300.0, 300.0], "x_min, y_min, x_max, y_max [m]"),
        "density": (7.5e-4, "buildings per square meter"),
        "rayleigh_scale": (15.0, "Rayleigh scale of building heights [m]"),
        "min_side": (8.0, "smallest footprint side [m]"),
        "max_side": (15.0, "largest footprint side [m]"),
        "max_height": (None, "optional cap on building heights [m]"),
    },
    "users": {
        "per_scenario": (10.0, "expected number of users per scenario"),
    },
    "algorithm": {
        "delta": (1.0, "granularity of grids and searches [m]"),
        "epsilon": (0.1, "classification degree, 0 < epsilon < 0.5"),
        "density": ("tri", "mass density of the barycenter iteration: uniform|asc|desc|tri"),
        "bia_h": (None, "altitude of the barycenter iteration [m] (default h_min)"),
        "h_min": (None, "minimum UAV altitude [m] (default tallest building + 1)"),
        "h_max": (None, "altitude ceiling of grid searches [m] (default h_max_factor * h_min)"),
        "h_max_factor": (4.0, "ceiling as a multiple of h_min"),
        "rho_cap": (None, "radius cap of the real-time search [m] (default 4 * h_min)"),
        "window": (30.0, "side of the horizontal window of the stochastic search [m]"),
    },
    "losfit": {
        "family": ("sigmoid", "sigmoid|tanh|relu"),
        "lambda1": (0.01, "regularisation weight of a"),
        "lambda2": (0.01, "regularisation weight of b"),
        "per_theta_count": (200, "links sampled per elevation angle"),
        "probe_points": (50, "ground points used for LoS sampling"),
    },
    "campaign": {
        "rounds": (1000, "Monte-Carlo rounds"),
        "algorithms": (["bia", "scpa", "mrsa", "hda", "brute"], "algorithms to compare"),
        "blockage_mode": ("basic", "basic|multiple"),
        "n_uavs": (1, "1, 2 or 4 UAVs on equal-area sub-regions"),
    },
}


@dataclass(frozen=True)
class RunConfig:
    campaign: CampaignConfig = field(default_factory=CampaignConfig)
    output_dir: str | None = None

    @property
    def seed(self) -> int:
        return self.campaign.seed

    @property
    def params(self) -> ChannelParams:
        return ChannelParams.from_config(self.campaign.channel)

    def out_dir(self, override: str | None = None) -> Path:
        return Path(override or self.output_dir or os.environ.get(OUTPUT_ENV) or "out")

    def with_campaign(self, **changes) -> "RunConfig":
        return replace(self, campaign=replace(self.campaign, **changes))


def describe_keys() -> str:
    """Help text listing every config key with its default."""
    lines = ["config keys (TOML or JSON; all optional):"]
    for section, keys in KEY_DOCS.items():
        lines.append(f"  [{section}]" if section else "  top level:")
        for key, (default, text) in keys.items():
            lines.append(f"    {key} = {json.dumps(default)}  # {text}")
    return "\n".join(lines)


def _read(path) -> dict:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            return json.loads(raw)
        return tomllib.loads(raw.decode("utf-8"))
    except (ValueError, tomllib.TOMLDecodeError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def config_from_dict(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config must be a table/object")
    flat: dict[str, dict] = {"": {}}
    for key, value in data.items():
        if key in KEY_DOCS and key != "":
            if not isinstance(value, dict):
                raise ConfigError(f"section '{key}' must be a table")
            for sub in value:
                if sub not in KEY_DOCS[key]:
                    raise ConfigError(f"unknown config key '{key}.{sub}'")
            flat[key] = value
        elif key in KEY_DOCS[""]:
            flat[""][key] = value
        else:
            raise ConfigError(f"unknown config key '{key}'")
    t = flat.get("terrain", {})
    a = flat.get("algorithm", {})
    f = flat.get("losfit", {})
    c = flat.get("campaign", {})
    u = flat.get("users", {})
    channel = dict(flat.get("channel", {}))
    ChannelParams.from_config(channel)  # validate early
    try:
        area = tuple(float(v) for v in t.get("area", KEY_DOCS["terrain"]["area"][0]))
        if len(area) != 4:
            raise ValueError("area needs four numbers")
        buildings = BuildingConfig(**{k: v for k, v in t.items() if k != "area"})
        camp = CampaignConfig(
            area=area, buildings=buildings, channel=channel,
            users_per_scenario=float(u.get("per_scenario", 10.0)),
            seed=int(flat[""].get("seed", 0)),
            rounds=int(c.get("rounds", 1000)),
            algorithms=tuple(c.get("algorithms", KEY_DOCS["campaign"]["algorithms"][0])),
            blockage_mode=str(c.get("blockage_mode", "basic")),
            n_uavs=int(c.get("n_uavs", 1)),
            **{k: v for k, v in a.items()},
            **{k: v for k, v in f.items()},
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    return RunConfig(camp, flat[""].get("output_dir"))


def load_config(path=None) -> RunConfig:
    """Parse ``path`` (TOML unless the suffix is ``.json``); ``None`` gives the defaults."""
    return RunConfig() if path is None else config_from_dict(_read(path))


def config_to_dict(cfg: RunConfig) -> dict:
    """Nested form of ``cfg`` that :func:`config_from_dict` accepts back."""
    c = cfg.campaign
    campaign_fields = {f.name for f in fields(CampaignConfig)}
    algo = {k: getattr(c, k) for k in KEY_DOCS["algorithm"] if k in campaign_fields}
    return {
        "seed": c.seed,
        "channel": {**ChannelParams.DEFAULTS, **c.channel},
        "terrain": {"area": list(c.area), **{k: getattr(c.buildings, k) for k in KEY_DOCS["terrain"] if k != "area"}},
        "users": {"per_scenario": c.users_per_scenario},
        "algorithm": algo,
        "losfit": {k: getattr(c, k) for k in KEY_DOCS["losfit"]},
        "campaign": {"rounds": c.rounds, "algorithms": list(c.algorithms),
                     "blockage_mode": c.blockage_mode, "n_uavs": c.n_uavs},
    }
