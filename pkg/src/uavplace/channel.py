"""Air-to-ground channel: path loss, Nakagami-m fading and coverage probability.

All internal quantities are linear (watts, ratios); dB/dBm only appear in
:meth:`ChannelParams.from_config`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError


class LinkState(enum.IntEnum):
    LOS = 0
    NLOS = 1
    DEEP_BLOCKED = 2  # two or more blockages under the multiple-blockage model


class BlockageMode(str, enum.Enum):
    BASIC = "basic"        # any blockage gives NLoS
    MULTIPLE = "multiple"  # one blockage gives NLoS, two or more give DEEP_BLOCKED


def link_states(counts, mode: BlockageMode | str = BlockageMode.BASIC) -> np.ndarray:
    """Map blockage counts to :class:`LinkState` values under ``mode``."""
    counts = np.asarray(counts)
    states = np.where(counts >= 1, int(LinkState.NLOS), int(LinkState.LOS))
    if BlockageMode(mode) is BlockageMode.MULTIPLE:
        states = np.where(counts >= 2, int(LinkState.DEEP_BLOCKED), states)
    return states


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class StateParams:
    alpha: float  # path-loss exponent
    m: int        # Nakagami shape
    eta: float    # mean additional loss, linear


@dataclass(frozen=True)
class ChannelParams:
    zeta: float    # transmit power [W]
    sigma2: float  # noise power [W]
    gamma: float   # SNR threshold, linear
    los: StateParams
    nlos: StateParams

    def __post_init__(self):
        for name in ("zeta", "sigma2", "gamma"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be positive, got {v}")
        for label, st in (("los", self.los), ("nlos", self.nlos)):
            if not (isinstance(st.m, (int, np.integer)) and not isinstance(st.m, bool) and st.m >= 1):
                raise ConfigError(f"m_{label} must be a positive integer, got {st.m!r}")
            if not (st.eta > 0 and st.alpha > 0):
                raise ConfigError(f"alpha_{label} and eta_{label} must be positive")
        if self.nlos.alpha < self.los.alpha:
            raise ConfigError("alpha_nlos must be >= alpha_los")

    DEFAULTS = {
        "tx_power_dbm": 30.0,
        "noise_dbm": -98.0,
        "snr_threshold_db": 22.0,
        "alpha_los": 2.0,
        "alpha_nlos": 2.3,
        "m_los": 2,
        "m_nlos": 1,
        "eta_los_db": -35.0,
        "eta_nlos_db": -48.0,
    }

    @classmethod
    def from_config(cls, cfg: dict | None = None) -> "ChannelParams":
        """Build from dB-valued config keys; missing keys take the system defaults."""
        cfg = dict(cfg or {})
        unknown = set(cfg) - set(cls.DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown channel key(s): {', '.join(sorted(unknown))}")
        c = {**cls.DEFAULTS, **cfg}
        for key in ("m_los", "m_nlos"):
            v = c[key]
            if isinstance(v, float) and v.is_integer():
                v = int(v)
            if not isinstance(v, int) or isinstance(v, bool):
                raise ConfigError(f"{key} must be a positive integer, got {c[key]!r}")
            c[key] = v
        return cls(
            zeta=dbm_to_watts(c["tx_power_dbm"]),
            sigma2=dbm_to_watts(c["noise_dbm"]),
            gamma=db_to_linear(c["snr_threshold_db"]),
            los=StateParams(float(c["alpha_los"]), c["m_los"], db_to_linear(c["eta_los_db"])),
            nlos=StateParams(float(c["alpha_nlos"]), c["m_nlos"], db_to_linear(c["eta_nlos_db"])),
        )

    @classmethod
    def default(cls) -> "ChannelParams":
        return cls.from_config()

    def state(self, state: LinkState) -> StateParams:
        if state == LinkState.LOS:
            return self.los
        if state == LinkState.NLOS:
            return self.nlos
        raise DomainError("a deep-blocked link has no propagation parameters")


def _check_r(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("distance must be positive")
    return r


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


def mean_received_power(params: ChannelParams, state: LinkState, r):
    """Large-scale received power ``eta * zeta * r**-alpha`` in watts (unit-mean fading)."""
    r = _check_r(r)
    st = params.state(state)
    return _out(st.eta * params.zeta * r ** (-st.alpha))


def average_snr(params: ChannelParams, state: LinkState, r):
    return _out(mean_received_power(params, state, r) / params.sigma2)


def mu(params: ChannelParams, state: LinkState, r):
    """Normalised threshold ``gamma * sigma2 * r**alpha / (eta * zeta)``."""
    r = _check_r(r)
    st = params.state(state)
    return _out(params.gamma * params.sigma2 * r ** st.alpha / (st.eta * params.zeta))


def _poisson_tail(m: int, x):
    # P[Gamma(m, 1) > x] for integer m, i.e. exp(-x) * sum_{n<m} x^n / n!
    term = np.ones_like(x)
    total = np.ones_like(x)
    for n in range(1, m):
        term = term * x / n
        total = total + term
    return np.exp(-x) * total


def conditional_coverage(params: ChannelParams, state: LinkState, r):
    """Probability that the SNR exceeds the threshold given the link state.

    With unit-mean gain ``G ~ Gamma(m, 1/m)`` this is ``P[G > mu]``, the
    upper tail of a unit-scale Gamma(m) at ``m * mu``:
    ``exp(-m mu) * sum_{n<m} (m mu)^n / n!``.
    """
    if state == LinkState.DEEP_BLOCKED:
        r = _check_r(r)
        return _out(np.zeros_like(r))
    m = params.state(state).m
    x = m * np.asarray(mu(params, state, r), dtype=float)
    return _out(_poisson_tail(m, x))


def coverage_by_state(params: ChannelParams, states, r) -> np.ndarray:
    """Elementwise conditional coverage for arrays of link states and distances."""
    states = np.asarray(states)
    r = np.broadcast_to(_check_r(r), states.shape)
    out = np.zeros(states.shape)
    for st in (LinkState.LOS, LinkState.NLOS):
        sel = states == st
        if np.any(sel):
            out[sel] = conditional_coverage(params, st, r[sel])
    return out


def coverage_probability(params: ChannelParams, los_model, h, r):
    """Stochastic-terrain coverage of a user at 3-D distance ``r`` from a UAV at height ``h``.

    The LoS and NLoS conditional coverages are mixed with the elevation-angle
    LoS probability of ``los_model``.
    """
    from .losmodel import elevation_angle, p_los

    h = np.asarray(h, dtype=float)
    r = np.asarray(r, dtype=float)
    theta = elevation_angle(h, r)
    pl = np.asarray(p_los(los_model, theta))
    c_los = conditional_coverage(params, LinkState.LOS, r)
    c_nlos = conditional_coverage(params, LinkState.NLOS, r)
    return _out(pl * c_los + (1.0 - pl) * c_nlos)


def sample_fading_gain(params: ChannelParams, state: LinkState, rng: np.random.Generator, size=None):
    """Nakagami-m power gain: Gamma(shape=m, scale=1/m), unit mean."""
    m = params.state(state).m
    return rng.gamma(shape=m, scale=1.0 / m, size=size)


def worker_rngs(root_seed: int, n: int) -> list[np.random.Generator]:
    """Independent generators for ``n`` workers.

    Stream ``i`` is seeded by ``SeedSequence(root_seed).spawn(n)[i]``, so the
    same root seed always yields the same per-worker streams.
    """
    return [np.random.default_rng(s) for s in np.random.SeedSequence(root_seed).spawn(n)]
