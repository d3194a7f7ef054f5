"""Acceptance gates for the occlusion speed-limit package.

Each test prints one PASS/FAIL line with the measured values so a run of
`pytest tests/test_acceptance.py -v -s` doubles as the acceptance report.
"""

import math
import time

import numpy as np
import pytest

from occlusim.fixtures import fixture_path
from occlusim.limiter import speed_supremum
from occlusim.model import Scenario, load_scenario, preset
from occlusim.occlusion import (
    conflict_point,
    min_hidden_distance,
    min_hidden_distance_raycast,
)
from occlusim.profiler import compute_metrics, plan_for_scenario
from occlusim.simkernel import adversary_sweep

WALKING_SPEED = 1.6


def _verdict(name, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.fixture(scope="module")
def single_rv():
    return load_scenario(fixture_path("single_rv_50"))


@pytest.fixture(scope="module")
def three_rv():
    return load_scenario(fixture_path("unicaragil"))


@pytest.fixture(scope="module")
def plans(single_rv, three_rv):
    out = {}
    for name, sc in (("single_rv", single_rv), ("three_rv", three_rv)):
        t0 = time.perf_counter()
        out[name] = plan_for_scenario(sc, ds=0.01)
        out[f"{name}_seconds"] = time.perf_counter() - t0
    return out


def test_criterion_1_stopping_distance_inversion():
    """The stoppable-speed formula inverts the stopping-distance relation
    to 1e-9 m over 1e5 random parameter triples in under a second."""
    rng = np.random.default_rng(2024)
    n = 100_000
    gaps = rng.uniform(0.0, 200.0, n)
    reactions = rng.uniform(0.0, 3.0, n)
    decels = rng.uniform(0.5, 10.0, n)
    t0 = time.perf_counter()
    worst = 0.0
    for gap, t_r, a in zip(gaps, reactions, decels):
        v = speed_supremum(gap, t_r, a)
        worst = max(worst, abs(t_r * v + v * v / (2.0 * a) - gap))
    elapsed = time.perf_counter() - t0
    _verdict(
        "criterion 1 (inversion)",
        worst <= 1e-9 and elapsed < 1.0,
        f"worst residual {worst:.3e} m over {n} triples in {elapsed:.2f} s",
    )


def test_criterion_2_raycast_equivalence():
    """Closed-form hidden distance matches the geometric ray-cast check to
    1e-6 m on 1e4 random configurations in under ten seconds."""
    from occlusim.model import EgoVehicle, ParkedVehicle

    rng = np.random.default_rng(7)
    n = 10_000
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(n):
        veh = ParkedVehicle(front_s=50.0, length=rng.uniform(2.0, 12.0),
                            lateral_gap=rng.uniform(0.05, 3.0))
        ego = EgoVehicle(width=2.0, length=4.0,
                         sensor_x=rng.uniform(0.0, 1.0),
                         sensor_y=rng.uniform(0.0, 1.5))
        width = rng.uniform(0.0, 1.0)
        gap = ego.sensor_x + rng.uniform(0.05, 30.0)
        s0 = conflict_point(veh, width) - gap
        closed = min_hidden_distance(s0, veh, ego, width)
        cast = min_hidden_distance_raycast(s0, veh, ego, width)
        worst = max(worst, abs(closed - cast))
    elapsed = time.perf_counter() - t0
    _verdict(
        "criterion 2 (ray-cast equivalence)",
        worst <= 1e-6 and elapsed < 10.0,
        f"worst |closed - raycast| {worst:.3e} m over {n} configs in {elapsed:.1f} s",
    )


def test_criterion_3_single_rv_limit_shape(single_rv, plans):
    """Single parked vehicle at 50 km/h with a 1 m lateral gap: the limit
    activates about 20 m before the vehicle, dips below 1 m/s, and returns
    to the posted limit before the ego front reaches the front line."""
    limits, _ = plans["single_rv"]
    posted = single_rv.posted.at(0.0)
    veh = single_rv.parked[0]
    rear = veh.front_s - veh.length

    limited = [smp for smp in limits if smp.v_limit < posted - 1e-9]
    activation = min(smp.s for smp in limited)
    lead_in = rear - activation
    min_limit = min(smp.v_limit for smp in limited)
    last_limited = max(smp.s for smp in limited)

    ok = (15.0 <= lead_in <= 25.0) and (min_limit < 1.0) and (last_limited < veh.front_s)
    _verdict(
        "criterion 3 (limit shape)",
        ok,
        f"activates {lead_in:.1f} m before the vehicle "
        f"({veh.front_s - activation:.1f} m before its front line), "
        f"min limit {min_limit:.3f} m/s, "
        f"recovers {veh.front_s - last_limited:.2f} m before the front line",
    )


def test_criterion_4_three_rv_calibration(three_rv, plans):
    """Three-vehicle 30 km/h scenario: untreated traversal takes exactly
    16.8 s; with the example assumptions the minimum limit lands in
    [0.2, 0.8] m/s, travel time within 25% of 29.1 s, and the ego moves
    slower than walking pace at every occlusion; extreme assumptions push
    the minimum limit below 0.01 m/s and more than double the travel time."""
    t0 = time.perf_counter()
    _, prof_none = plan_for_scenario(three_rv, ds=0.01, include_occlusions=False)
    none = compute_metrics(prof_none, three_rv)
    sec_none = time.perf_counter() - t0

    _, prof_ex = plans["three_rv"]
    example = compute_metrics(prof_ex, three_rv)
    sec_ex = plans["three_rv_seconds"]

    extreme_sc = Scenario(three_rv.route_length, three_rv.posted, three_rv.ego,
                          three_rv.parked, preset("extreme"))
    t0 = time.perf_counter()
    _, prof_xt = plan_for_scenario(extreme_sc, ds=0.01)
    extreme = compute_metrics(prof_xt, extreme_sc)
    sec_xt = time.perf_counter() - t0

    slow_at_each = all(p.min_speed < WALKING_SPEED for p in example.passing)
    checks = {
        "untreated 16.8 s": abs(none.travel_time - 16.8) < 1e-9,
        "example min limit in [0.2, 0.8]": 0.2 <= example.min_limit <= 0.8,
        "example travel within 25% of 29.1 s":
            0.75 * 29.1 <= example.travel_time <= 1.25 * 29.1,
        "slower than walking at each occlusion": slow_at_each,
        "extreme min limit < 0.01": extreme.min_limit < 0.01,
        "extreme travel > 2x example": extreme.travel_time > 2.0 * example.travel_time,
        "runtime < 5 s per run": max(sec_none, sec_ex, sec_xt) < 5.0,
    }
    failing = [k for k, ok in checks.items() if not ok]
    _verdict(
        "criterion 4 (calibration)",
        not failing,
        f"untreated {none.travel_time:.6f} s; example min {example.min_limit:.3f} m/s, "
        f"travel {example.travel_time:.1f} s, troughs "
        f"{[round(p.min_speed, 2) for p in example.passing]} m/s; "
        f"extreme min {extreme.min_limit:.4f} m/s, travel {extreme.travel_time:.1f} s"
        + (f"; FAILING: {failing}" if failing else ""),
    )


def test_criterion_5_safety_guarantee_sweep(single_rv, three_rv, plans):
    """Adversarial emergence sweep: zero frontal collisions over both
    fixtures on the 0.05 s grid and its refinements (>= 1e4 events total,
    under a minute); breaking an assumption or ignoring the limit collides."""
    t0 = time.perf_counter()
    total_events = 0
    total_collisions = 0
    worst_margin = math.inf
    for name, sc in (("single_rv", single_rv), ("three_rv", three_rv)):
        _, prof = plans[name]
        for grid in (0.05, 0.025, 0.0125, 0.00625):
            rep = adversary_sweep(sc, prof, time_step=grid, dt=0.01)
            total_events += rep.n_events
            total_collisions += rep.collisions
            if rep.worst_stop_margin is not None:
                worst_margin = min(worst_margin, rep.worst_stop_margin)
    elapsed = time.perf_counter() - t0

    _, prof_single = plans["single_rv"]
    doubled = adversary_sweep(
        single_rv, prof_single, time_step=0.05, dt=0.01,
        actual=single_rv.assumptions.override(pedestrian_speed=2 * WALKING_SPEED),
    )
    _, prof_posted = plan_for_scenario(single_rv, ds=0.01, include_occlusions=False)
    ignored = adversary_sweep(single_rv, prof_posted, time_step=0.05, dt=0.01)

    ok = (
        total_collisions == 0
        and total_events >= 10_000
        and worst_margin >= 0.0
        and elapsed < 60.0
        and doubled.collisions >= 1
        and ignored.collisions >= 1
    )
    _verdict(
        "criterion 5 (safety sweep)",
        ok,
        f"{total_events} events, {total_collisions} collisions, worst stop margin "
        f"{worst_margin:.4f} m in {elapsed:.1f} s; doubled walker speed -> "
        f"{doubled.collisions} collisions, ignoring the limit -> {ignored.collisions}",
    )


def test_criterion_6_property_suites(three_rv):
    """Bundle of structural properties, each sub-suite within ten seconds:
    hidden-distance monotonicity/bound/scaling, stoppable-speed
    monotonicities, limit combination under vehicle removal, profile
    feasibility and maximality, and the travel-time ordering."""
    from occlusim.model import EgoVehicle, ParkedVehicle

    timings = {}

    t0 = time.perf_counter()
    rng = np.random.default_rng(99)
    for _ in range(2000):
        veh = ParkedVehicle(front_s=50.0, length=6.0, lateral_gap=rng.uniform(0.05, 3.0))
        ego = EgoVehicle(width=2.0, length=4.0, sensor_x=rng.uniform(0, 1),
                         sensor_y=rng.uniform(0, 1.5))
        w = rng.uniform(0.001, 1.0)
        s_c = conflict_point(veh, w)
        g1 = ego.sensor_x + rng.uniform(0.05, 20.0)
        g2 = g1 + rng.uniform(0.01, 10.0)
        d1 = min_hidden_distance(s_c - g1, veh, ego, w)
        d2 = min_hidden_distance(s_c - g2, veh, ego, w)
        assert d2 < d1                          # strictly decreasing gap -> distance
        assert d1 >= veh.lateral_gap            # lower bound
        scaled = min_hidden_distance(
            conflict_point(ParkedVehicle(50.0, 6.0, 2 * veh.lateral_gap), 2 * w) - 2 * g1,
            ParkedVehicle(50.0, 6.0, 2 * veh.lateral_gap),
            EgoVehicle(2.0, 4.0, 2 * ego.sensor_x, 2 * ego.sensor_y), 2 * w)
        assert scaled == pytest.approx(2 * d1, rel=1e-9)   # degree-1 homogeneity
    timings["hidden distance"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    for _ in range(2000):
        g, t_r, a = rng.uniform(0.1, 100), rng.uniform(0.0, 3), rng.uniform(0.5, 9)
        assert speed_supremum(g + 0.5, t_r, a) > speed_supremum(g, t_r, a)
        assert speed_supremum(g, t_r, a + 0.5) > speed_supremum(g, t_r, a)
        assert speed_supremum(g, t_r + 0.5, a) <= speed_supremum(g, t_r, a)
    timings["stoppable speed"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    from occlusim.limiter import limit_profile
    for drop in range(3):
        reduced = Scenario(
            three_rv.route_length, three_rv.posted, three_rv.ego,
            three_rv.parked[:drop] + three_rv.parked[drop + 1:],
            three_rv.assumptions)
        full = limit_profile(three_rv, ds=0.25)
        fewer = limit_profile(reduced, ds=0.25)
        assert all(f.v_limit >= g.v_limit - 1e-12 for f, g in zip(fewer, full))
    timings["combination"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    from occlusim.limiter import planning_caps
    limits, prof = plan_for_scenario(three_rv, ds=0.02)
    assert np.all(prof.v <= prof.v_limit + 1e-12)
    assert np.all(prof.v > 0)
    dv2 = np.diff(prof.v ** 2)
    ds_arr = np.diff(prof.s)
    a = three_rv.assumptions
    assert np.all(dv2 <= 2 * a.plan_accel * ds_arr + 1e-6)
    assert np.all(-dv2 <= 2 * a.plan_decel * ds_arr + 1e-6)
    caps = planning_caps(three_rv, [smp.s for smp in limits])
    idx = rng.integers(1, len(prof.v) - 1, size=100)
    for i in idx:
        v_up = prof.v[i] + 1e-3
        violates = (
            v_up > caps[i] + 1e-12
            or v_up ** 2 - prof.v[i - 1] ** 2 > 2 * a.plan_accel * ds_arr[i - 1] + 1e-12
            or v_up ** 2 - prof.v[i + 1] ** 2 > 2 * a.plan_decel * ds_arr[i] + 1e-12
        )
        assert violates
    timings["profile"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    def travel(assumptions, occlusions=True):
        sc = Scenario(three_rv.route_length, three_rv.posted, three_rv.ego,
                      three_rv.parked, assumptions)
        _, p = plan_for_scenario(sc, ds=0.02, include_occlusions=occlusions)
        return compute_metrics(p, sc).travel_time

    t_none = travel(preset("example"), occlusions=False)
    t_example = travel(preset("example"))
    t_extreme = travel(preset("extreme"))
    assert t_none < t_example < t_extreme
    timings["metric ordering"] = time.perf_counter() - t0

    slowest = max(timings.values())
    _verdict(
        "criterion 6 (property suites)",
        slowest < 10.0,
        "all properties hold; slowest suite "
        f"{slowest:.1f} s ({ {k: round(v, 2) for k, v in timings.items()} })",
    )
