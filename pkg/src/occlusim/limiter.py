"""Dynamic speed limit: per-occlusion stoppable-speed bound combined with
the posted limit into one limit curve v_lim(s)."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Scenario
from .occlusion import conflict_point, min_hidden_distance


def speed_supremum(gap: float, reaction_time: float, max_decel: float) -> float:
    """Highest speed from which the ego can still stop within `gap`, given a
    constant-speed reaction phase followed by full braking.

    Evaluated in the division form to avoid cancellation for large
    reaction-time/deceleration products; algebraically identical to
    sqrt(reaction_time^2 * max_decel^2 + 2 * max_decel * gap)
    - reaction_time * max_decel.
    """
    if gap <= 0.0:
        return 0.0
    tau = reaction_time * max_decel
    return 2.0 * max_decel * gap / (math.sqrt(tau * tau + 2.0 * max_decel * gap) + tau)


def is_relevant(
    hidden_distance: float, gap: float, ego_speed: float, pedestrian_speed: float
) -> bool:
    """Can a hidden pedestrian still step in front of the ego before its
    front passes the conflict point at `ego_speed`?

    Cross-multiplied form of hidden_distance / pedestrian_speed <=
    gap / ego_speed; false once the conflict point is passed or no
    pedestrian can be hidden at all (infinite hidden distance).
    """
    if gap <= 0.0 or not math.isfinite(hidden_distance):
        return False
    return hidden_distance * ego_speed <= pedestrian_speed * gap


@dataclass(frozen=True)
class LimitSample:
    """Combined limit at one ego position; `binding` is the index of the
    constraining occlusion, or "posted"."""

    s: float
    v_limit: float
    binding: object  # int | "posted"


def limit_at(s0: float, scenario: Scenario) -> LimitSample:
    """Evaluate the combined dynamic limit at ego position s0.

    Each occlusion constrains the limit to its stoppable speed while a
    hidden pedestrian could still reach the conflict point at that speed;
    once even the stoppable speed outruns the walker the occlusion no
    longer binds and the posted limit applies.
    """
    a = scenario.assumptions
    v_lim = scenario.posted.at(s0)
    binding = "posted"
    for i, veh in enumerate(scenario.parked):
        gap = conflict_point(veh, a.human_width) - s0
        if gap <= 0.0:
            continue  # conflict point passed
        hidden = min_hidden_distance(s0, veh, scenario.ego, a.human_width)
        v_stop = speed_supremum(gap, a.reaction_time, a.max_decel)
        if not is_relevant(hidden, gap, v_stop, a.pedestrian_speed):
            continue
        if v_stop < v_lim:
            v_lim = v_stop
            binding = i
    return LimitSample(s0, v_lim, binding)


def sample_grid(length: float, ds: float) -> list:
    """Regular grid over [0, length] including both endpoints."""
    if ds <= 0.0:
        raise ValueError("ds must be positive")
    n = int(length / ds + 1e-9)
    pts = [i * ds for i in range(n + 1)]
    if length - pts[-1] > 1e-9:
        pts.append(length)
    else:
        pts[-1] = length
    return pts


def limit_profile(
    scenario: Scenario, ds: float = 0.1, include_occlusions: bool = True
) -> list:
    """Sample the combined limit on a regular grid over the route."""
    grid = sample_grid(scenario.route_length, ds)
    if not include_occlusions:
        return [LimitSample(s, scenario.posted.at(s), "posted") for s in grid]
    return [limit_at(s, scenario) for s in grid]


def recovery_gap(vehicle, ego, assumptions) -> float:
    """Gap to the conflict point below which the occlusion stops binding
    (the stoppable speed already outruns any hidden walker).

    The limit curve jumps back to the posted limit at this gap. For large
    gaps the walker-reachability time always undercuts the ego arrival
    time, so a boundary exists; it is found by bisection.
    """
    a = assumptions
    s_c = conflict_point(vehicle, a.human_width)

    def binding(gap: float) -> bool:
        hidden = min_hidden_distance(s_c - gap, vehicle, ego, a.human_width)
        v_stop = speed_supremum(gap, a.reaction_time, a.max_decel)
        return is_relevant(hidden, gap, v_stop, a.pedestrian_speed)

    lo = max(ego.sensor_x, 0.0) + 1e-12
    if binding(lo):
        return lo
    hi = max(2.0 * lo, 1.0)
    while not binding(hi):
        hi *= 2.0
        if hi > 1e7:
            return math.inf  # occlusion never binds
    while hi - lo > 1e-12 * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if binding(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _posted_min(posted, a: float, b: float) -> float:
    best = min(posted.at(a), posted.at(b))
    for start, value in posted.segments:
        if a < start <= b:
            best = min(best, value)
    return best


def planning_caps(scenario: Scenario, grid) -> list:
    """Cell-closed speed caps for profile planning.

    cap[i] is the infimum of the continuous limit over [s_{i-1}, s_{i+1}],
    so a profile meeting these caps at the grid nodes cannot exceed the
    limit anywhere between samples either; in particular the acceleration
    out of a dip starts only after the limit has actually recovered, not a
    fraction of a cell early.
    """
    a = scenario.assumptions
    occ = []
    for veh in scenario.parked:
        s_c = conflict_point(veh, a.human_width)
        g_rec = recovery_gap(veh, scenario.ego, a)
        if math.isfinite(g_rec):
            occ.append((s_c, g_rec))
    caps = []
    for i, s in enumerate(grid):
        lo_s = grid[i - 1] if i else s
        hi_s = grid[i + 1] if i + 1 < len(grid) else s
        cap = _posted_min(scenario.posted, lo_s, hi_s)
        for s_c, g_rec in occ:
            if lo_s > s_c - g_rec:
                continue  # the whole closure lies past the recovery point
            gap_eval = max(s_c - hi_s, g_rec, 1e-9)
            cap = min(cap, speed_supremum(gap_eval, a.reaction_time, a.max_decel))
        caps.append(cap)
    return caps


def write_limits_csv(samples, path) -> None:
    with open(path, "w") as fh:
        fh.write("s_m,v_lim_mps,binding\n")
        for smp in samples:
            fh.write(f"{smp.s:.9g},{smp.v_limit:.9g},{smp.binding}\n")
