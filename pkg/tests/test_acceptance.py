"""Acceptance criteria 1-10.

Each test records one PASS/FAIL line (printed in the terminal summary) before
asserting, so a run shows every criterion's measured values even when some
fail.  The Monte-Carlo campaigns are shared through module-scoped fixtures.
"""

import math
import time

import numpy as np
import pytest

import conftest
from oracles import naive_brute, oracle_counts
from uavplace import cli
from uavplace.channel import ChannelParams, LinkState, average_snr, coverage_probability
from uavplace.deploy import Outcome, brute_force, grid_axis, two_user_search
from uavplace.losmodel import Family, LosModelParams, collect_samples, fit, model_mse, p_los, elevation_angle
from uavplace.sim import BuildingConfig, CampaignConfig, feasible_thetas, generate_scenario, outdoor_points, run_campaign
from uavplace.terrain import Area, Building, FootprintSpec, TerrainMap, sample_buildings

pytestmark = pytest.mark.acceptance

AREA = Area(0, 0, 300, 300)


def record(n: int, ok: bool, text: str) -> None:
    conftest.ACCEPTANCE_LINES.append(f"CRITERION {n}: {'PASS' if ok else 'FAIL'} {text}")
    assert ok, f"criterion {n}: {text}"


def ground(xy):
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    return np.column_stack([xy, np.zeros(len(xy))])


# 1 ------------------------------------------------------------------------

def two_stage_monte_carlo(params, model, h, r, n, rng):
    """Draw the link state, then the Nakagami power gain, and count SNR >= gamma."""
    los = rng.random(n) < p_los(model, elevation_angle(h, r))
    covered = 0
    for state, mask in ((params.los, los), (params.nlos, ~los)):
        k = int(mask.sum())
        g = rng.gamma(state.m, 1.0 / state.m, size=k)
        snr = params.zeta * state.eta * g * r ** (-state.alpha) / params.sigma2
        covered += int(np.sum(snr >= params.gamma))
    return covered / n


def test_criterion_1_closed_form_matches_monte_carlo():
    params = ChannelParams.default()
    model = LosModelParams.empirical()
    rng = np.random.default_rng(1)
    pairs = [(h, max(r, h)) for h in (20.0, 50.0, 100.0, 200.0) for r in (0.0, 130.0, 600.0, 2500.0, 5000.0)]
    start = time.perf_counter()
    worst = 0.0
    for h, r in pairs:
        analytic = coverage_probability(params, model, h, r)
        worst = max(worst, abs(analytic - two_stage_monte_carlo(params, model, h, r, 1_000_000, rng)))
    elapsed = time.perf_counter() - start
    record(1, worst < 0.002 and elapsed < 30,
           f"max |analytic - MC| = {worst:.5f} over {len(pairs)} (h, r) pairs, 1e6 draws each "
           f"(tol 0.002); {elapsed:.1f} s (limit 30 s)")


# 2 ------------------------------------------------------------------------

def test_criterion_2_is_los_matches_sampling_oracle():
    start = time.perf_counter()
    total = agree = 0
    for seed in range(10):
        sc = generate_scenario(AREA, 0.0, BuildingConfig(), seed)
        t = sc.terrain
        rng = np.random.default_rng(1000 + seed)
        users = ground(rng.uniform(0, 300, size=(1000, 2)))
        uavs = np.column_stack([rng.uniform(0, 300, size=(1000, 2)), rng.uniform(1.0, 4 * sc.h_min, 1000)])
        los = np.asarray(t.is_los(users, uavs))
        oracle = oracle_counts(t, users, uavs) == 0
        # disagreements are re-sampled 100x more densely before being counted
        oracle = oracle_counts(t, users, uavs, refine=los != oracle) == 0
        total += len(los)
        agree += int(np.sum(los == oracle))
    elapsed = time.perf_counter() - start
    record(2, agree == total and elapsed < 60,
           f"is_los agrees with the sampling oracle on {agree}/{total} links over 10 maps; "
           f"{elapsed:.1f} s (limit 60 s)")


# 3 ------------------------------------------------------------------------

def wall_between(d, width, height, offset=0.0):
    t = TerrainMap((Building.rectangle(offset, 0.0, width, width, height),), Area(-200, -200, 200, 200))
    return t, np.array([-d / 2, 0, 0]), np.array([d / 2, 0, 0])


def best_in_mid_plane(t, params, u1, u2, h_min, rho_max, step):
    """Best min-user average SNR over the perpendicular bisector plane at resolution ``step``."""
    ys = np.arange(-rho_max, rho_max + step / 2, step)
    zs = np.arange(h_min, rho_max + step / 2, step)
    yy, zz = np.meshgrid(ys, zs, indexing="ij")
    pos = np.column_stack([np.zeros(yy.size), yy.ravel(), zz.ravel()])
    worst = np.full(len(pos), np.inf)
    for u in (u1, u2):
        r = np.linalg.norm(pos - u, axis=1)
        los = t.is_los(np.broadcast_to(u, pos.shape), pos)
        snr = np.where(los, average_snr(params, LinkState.LOS, r), average_snr(params, LinkState.NLOS, r))
        worst = np.minimum(worst, snr)
    return float(worst.max())


def test_criterion_3_gamma_suboptimal():
    params = ChannelParams.default()
    rng = np.random.default_rng(3)
    delta = 1.0
    start = time.perf_counter()
    checked = violations = 0
    worst_excess = -np.inf
    while checked < 20:
        d = rng.uniform(80, 160)
        t, u1, u2 = wall_between(d, rng.uniform(4, 20), rng.uniform(15, 45), offset=rng.uniform(-5, 5))
        h_min = t.default_h_min()
        res = two_user_search(t, params, u1, u2, (h_min, 0.0), delta, h_min, rho_cap=6 * h_min)
        rho = res.info["rho"]
        if res.trajectory.outcome is not Outcome.LOS_FOUND or 2 * rho > d:
            continue
        checked += 1
        # one grid step: the SNR gained by moving delta closer to the user axis
        increment = average_snr(params, LinkState.LOS, math.sqrt(max(rho - delta, h_min) ** 2 + d * d / 4)) \
            - res.gamma_achieved
        excess = best_in_mid_plane(t, params, u1, u2, h_min, 6 * h_min, delta / 4) - res.gamma_achieved
        worst_excess = max(worst_excess, excess / max(increment, 1e-300))
        violations += excess > increment + 1e-9
    elapsed = time.perf_counter() - start
    record(3, violations == 0 and elapsed < 300,
           f"{checked} two-user scenes with 2*rho <= d: {violations} beat gamma_achieved by more than one "
           f"step increment (worst excess {worst_excess:.2f} increments); {elapsed:.1f} s (limit 300 s)")


# 4 and 5 --------------------------------------------------------------------

@pytest.fixture(scope="module")
def suburban_campaign():
    start = time.perf_counter()
    reports = run_campaign(CampaignConfig(rounds=1000, seed=2024))
    return reports, time.perf_counter() - start


def test_criterion_4_algorithm_ordering(suburban_campaign):
    reports, elapsed = suburban_campaign
    m = {a: r.mean for a, r in reports.items()}
    rounds = len(reports["bia"].coverage)
    checks = {
        "BIA+0.05<=SCPA": m["bia"] + 0.05 <= m["scpa"],
        "SCPA<=MRSA+0.01": m["scpa"] <= m["mrsa"] + 0.01,
        "MRSA<=brute+0.01": m["mrsa"] <= m["brute"] + 0.01,
        "SCPA-BIA~9pp(+-5)": abs((m["scpa"] - m["bia"]) - 0.09) <= 0.05,
        "brute-SCPA~6pp(+-4)": abs((m["brute"] - m["scpa"]) - 0.06) <= 0.04,
        "MRSA-SCPA~3pp(+-3)": abs((m["mrsa"] - m["scpa"]) - 0.03) <= 0.03,
        "runtime<30min": elapsed < 1800,
    }
    failed = [k for k, ok in checks.items() if not ok]
    means = " ".join(f"{a}={v:.4f}" for a, v in m.items())
    record(4, rounds >= 1000 and not failed,
           f"{rounds} rounds, means {means}; gaps SCPA-BIA={100 * (m['scpa'] - m['bia']):.2f}pp "
           f"brute-SCPA={100 * (m['brute'] - m['scpa']):.2f}pp MRSA-SCPA={100 * (m['mrsa'] - m['scpa']):.2f}pp; "
           f"{elapsed:.0f} s; failed checks: {failed or 'none'}")


def binned_r2(x, y, bins=10):
    """R^2 of a straight line through the means of equal-count bins of ``x``."""
    order = np.argsort(x)
    groups = np.array_split(order, bins)
    bx = np.array([x[g].mean() for g in groups])
    by = np.array([y[g].mean() for g in groups])
    slope, icept = np.polyfit(bx, by, 1)
    resid = by - (slope * bx + icept)
    return 1.0 - float(resid @ resid) / float(((by - by.mean()) ** 2).sum()), slope


def test_criterion_5_search_lengths(suburban_campaign):
    reports, _ = suburban_campaign
    mrsa, hda = reports["mrsa"], reports["hda"]
    l_mrsa, l_hda = float(np.mean(mrsa.search_length)), float(np.mean(hda.search_length))
    d = np.asarray(mrsa.pair_distance)
    lengths = np.asarray(mrsa.search_length)
    ok = np.isfinite(d)
    r2, slope = binned_r2(d[ok], lengths[ok])
    record(5, len(mrsa.coverage) >= 500 and l_hda <= l_mrsa and r2 >= 0.8,
           f"mean length HDA={l_hda:.1f} m <= MRSA={l_mrsa:.1f} m; MRSA length vs pair distance over "
           f"{int(ok.sum())} searches: binned R^2={r2:.3f} (need >= 0.8), slope {slope:.3f}")


# 6 ------------------------------------------------------------------------

def test_criterion_6_los_fit_quality():
    start = time.perf_counter()
    sc = generate_scenario(AREA, 0.0, BuildingConfig(), 6)
    rng = np.random.default_rng(6)
    h = (sc.h_min, 4 * sc.h_min)
    samples = collect_samples(sc.terrain, outdoor_points(sc.terrain, 50, rng), h,
                              feasible_thetas(sc.terrain.area, h[0]), 2000, rng)
    # families are compared on their unregularised fits; the regularised sigmoid is reported too
    mse = {f: fit(samples, f, 0.0, 0.0).mse for f in Family}
    reg = fit(samples, Family.SIGMOID, 0.01, 0.01).mse
    emp = model_mse(LosModelParams.empirical(), samples)
    elapsed = time.perf_counter() - start
    ok = (mse[Family.SIGMOID] < emp and reg < emp
          and mse[Family.SIGMOID] <= mse[Family.TANH] <= mse[Family.RELU] and elapsed < 60)
    record(6, ok, f"MSE sigmoid={mse[Family.SIGMOID]:.5f} (regularised {reg:.5f}) tanh={mse[Family.TANH]:.5f} "
                  f"relu={mse[Family.RELU]:.5f} empirical={emp:.5f}; {elapsed:.1f} s (limit 60 s)")


# 7 ------------------------------------------------------------------------

def test_criterion_7_multi_uav():
    base = CampaignConfig(rounds=500, algorithms=("scpa", "mrsa"), seed=77)
    means = {}
    for mode, n in (("basic", 1), ("multiple", 1), ("multiple", 2), ("multiple", 4)):
        cfg = CampaignConfig(**{**base.__dict__, "blockage_mode": mode, "n_uavs": n})
        means[mode, n] = {a: r.mean for a, r in run_campaign(cfg).items()}
    ok, parts = True, []
    for a in ("scpa", "mrsa"):
        one, two, four = (means["multiple", n][a] for n in (1, 2, 4))
        drop = means["basic", 1][a] - one
        ok &= four >= two >= one and 0.0 <= drop <= 0.03
        parts.append(f"{a}: n=1 {one:.4f} n=2 {two:.4f} n=4 {four:.4f} basic-multiple {100 * drop:.2f}pp")
    record(7, ok, "500 rounds, multiple blockage; " + "; ".join(parts))


# 8 ------------------------------------------------------------------------

def test_criterion_8_bia_density():
    # buildings capped at 19 m so that h_min = 20 m is a valid BIA altitude in every round
    base = dict(rounds=1000, algorithms=("bia",), seed=88, buildings=BuildingConfig(max_height=19.0), h_min=20.0)
    m = {}
    for kind in ("uniform", "asc", "desc", "tri"):
        for h in (20.0, 60.0):
            m[kind, h] = run_campaign(CampaignConfig(**base, density=kind, bia_h=h))["bia"].mean
    shape_ok = m["desc", 20.0] >= m["asc", 20.0] and m["tri", 20.0] >= m["asc", 20.0]
    height_ok = all(m[k, 20.0] > m[k, 60.0] for k in ("asc", "desc", "tri"))
    text = " ".join(f"{k}@{h:.0f}={v:.4f}" for (k, h), v in m.items())
    record(8, shape_ok and height_ok,
           f"1000 rounds: {text}; desc,tri>=asc at 20 m: {shape_ok}; 20 m beats 60 m for every non-uniform: "
           f"{height_ok}")


# 9 ------------------------------------------------------------------------

def test_criterion_9_brute_force_redundancy():
    params = ChannelParams.default()
    agree = 0
    for seed in range(10):
        rng = np.random.default_rng(900 + seed)
        t = sample_buildings(Area(0, 0, 49, 49), 2e-3, 15.0, FootprintSpec(5, 10), rng_seed=seed)
        users = ground(rng.uniform(0, 49, size=(6, 2)))
        users = users[~t.inside_any(users[:, :2])]
        h_min = t.default_h_min()
        hs = grid_axis(h_min, h_min + 4, 1)
        multiple = seed % 2 == 1
        res = brute_force(t, users, params, 1.0, (hs[0], hs[-1]), "multiple" if multiple else "basic")
        obj, pos = naive_brute(t, users, params, grid_axis(0, 49, 1), grid_axis(0, 49, 1), hs, multiple)
        agree += bool(np.array_equal(res.uav_position, pos) and math.isclose(res.objective, obj, rel_tol=1e-12))
    record(9, agree == 10, f"grid search and naive loops agree on {agree}/10 fixtures (50 x 50 x 5 grids)")


# 10 -----------------------------------------------------------------------

def test_criterion_10_determinism(tmp_path):
    commands = [["gen-terrain"], ["classify"], ["classify", "--mode", "terrain"],
                ["fit-los", "--samples", str(conftest.Path(__file__).parent / "data" / "synthetic_samples.csv")],
                *(["deploy", "--algo", a] for a in ("bia", "scpa", "mrsa", "hda", "brute")),
                ["simulate", "--rounds", "2"],
                ["sweep", "--rounds", "1", "--param", "epsilon", "--values", "0.1,0.2"]]
    identical = 0
    for i, argv in enumerate(commands):
        outs = []
        for rep in ("a", "b"):
            out = tmp_path / f"{i}{rep}"
            assert cli.main([*argv, "--seed", "10", "--out", str(out), "--quiet"]) == 0
            outs.append({p.relative_to(out).as_posix(): p.read_bytes() for p in sorted(out.rglob("*"))
                         if p.is_file()})
        identical += bool(outs[0]) and outs[0] == outs[1]
    record(10, identical == len(commands),
           f"{identical}/{len(commands)} subcommand runs byte-identical on re-run with the same seed")
