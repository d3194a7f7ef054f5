"""Drivable velocity profile under comfort acceleration bounds, and the
summary metrics of a traversal."""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

import numpy as np

from .model import AssumptionSet, Scenario


class InfeasibleEntryError(ValueError):
    """Entry speed too high to honor the limit with the planning deceleration."""


@dataclass(frozen=True, eq=False)
class SpeedProfile:
    """Sampled profile: v(s) under the limit, with cumulative time t(s).

    Between samples the speed is interpolated linearly in v^2, i.e. cells
    have constant acceleration.
    """

    s: np.ndarray
    v_limit: np.ndarray
    v: np.ndarray
    t: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "_s_list", self.s.tolist())
        object.__setattr__(self, "_v2_list", (self.v * self.v).tolist())

    def _cell(self, s: float) -> int:
        i = bisect.bisect_right(self._s_list, s) - 1
        return min(max(i, 0), len(self._s_list) - 2)

    def speed_at(self, s: float) -> float:
        s_list, v2 = self._s_list, self._v2_list
        if s <= s_list[0]:
            return math.sqrt(v2[0])
        if s >= s_list[-1]:
            return math.sqrt(v2[-1])
        i = self._cell(s)
        frac = (s - s_list[i]) / (s_list[i + 1] - s_list[i])
        return math.sqrt(v2[i] + frac * (v2[i + 1] - v2[i]))

    def accel_at(self, s: float) -> float:
        """Constant acceleration of the cell containing s (a = d(v^2)/ds / 2)."""
        s_list, v2 = self._s_list, self._v2_list
        if s < s_list[0] or s >= s_list[-1]:
            return 0.0
        i = self._cell(s)
        return 0.5 * (v2[i + 1] - v2[i]) / (s_list[i + 1] - s_list[i])

    def time_at(self, s: float) -> float:
        return float(np.interp(s, self.s, self.t))

    @property
    def travel_time(self) -> float:
        return float(self.t[-1])


def plan_profile(
    limits,
    assumptions: AssumptionSet,
    entry_speed: float | None = None,
    plan_caps=None,
) -> SpeedProfile:
    """Plan the pointwise-maximal profile under the limit samples.

    Backward pass caps every sample by the speed from which its successor is
    reachable under the planning deceleration; forward pass caps by what the
    planning acceleration allows from the predecessor. `entry_speed` of None
    means "fastest feasible arrival" (the backward-pass cap at s=0).

    `plan_caps` optionally tightens the node constraints (e.g. cell-closed
    caps of the continuous limit, so the interpolated profile stays under
    the limit between samples too); the reported v_limit stays the sampled
    limit either way.
    """
    if not limits:
        raise ValueError("empty limit grid")
    s = np.array([smp.s for smp in limits], dtype=float)
    cap = np.array([smp.v_limit for smp in limits], dtype=float)
    n = len(s)
    ds = np.diff(s)
    if np.any(ds <= 0.0):
        raise ValueError("limit grid must be strictly increasing in s")

    a_dec = assumptions.plan_decel
    a_acc = assumptions.plan_accel
    if plan_caps is not None:
        if len(plan_caps) != n:
            raise ValueError("plan_caps length must match the limit grid")
        v = [min(float(x), float(c)) for x, c in zip(cap, plan_caps)]
    else:
        v = [float(x) for x in cap]
    for i in range(n - 2, -1, -1):
        reachable = math.sqrt(v[i + 1] * v[i + 1] + 2.0 * a_dec * ds[i])
        if reachable < v[i]:
            v[i] = reachable
    if entry_speed is None:
        entry_speed = v[0]
    if entry_speed > v[0] + 1e-9:
        raise InfeasibleEntryError(
            f"entry speed {entry_speed:.3f} m/s cannot be slowed to the limit "
            f"ahead (max feasible {v[0]:.3f} m/s)"
        )
    v[0] = min(entry_speed, v[0])
    for i in range(1, n):
        reachable = math.sqrt(v[i - 1] * v[i - 1] + 2.0 * a_acc * ds[i - 1])
        if reachable < v[i]:
            v[i] = reachable

    v_arr = np.array(v)
    inv = 1.0 / v_arr
    t = np.empty(n)
    t[0] = 0.0
    np.cumsum(ds * 0.5 * (inv[:-1] + inv[1:]), out=t[1:])
    return SpeedProfile(s, cap, v_arr, t)


def plan_for_scenario(
    scenario: Scenario,
    ds: float = 0.1,
    include_occlusions: bool = True,
    entry_speed: float | None = None,
):
    """Limit grid plus planned profile for a scenario, using cell-closed
    planning caps so the profile honors the limit between samples as well.

    Returns (limit samples, SpeedProfile).
    """
    from .limiter import limit_profile, planning_caps

    limits = limit_profile(scenario, ds=ds, include_occlusions=include_occlusions)
    caps = None
    if include_occlusions and scenario.parked:
        caps = planning_caps(scenario, [smp.s for smp in limits])
    profile = plan_profile(limits, scenario.assumptions, entry_speed, plan_caps=caps)
    return limits, profile


@dataclass(frozen=True)
class PassingStats:
    """Traversal of the stretch alongside one parked vehicle."""

    vehicle: int
    start_s: float
    end_s: float
    duration: float
    avg_speed: float
    min_speed: float


@dataclass(frozen=True)
class Metrics:
    min_limit: float
    travel_time: float
    avg_speed_route: float
    avg_speed_passing: float
    passing: tuple  # (PassingStats, ...)


def compute_metrics(profile: SpeedProfile, scenario: Scenario) -> Metrics:
    """Route metrics: minimum limit, travel time, route-average speed, and
    the average speed while alongside any parked vehicle."""
    travel_time = profile.travel_time
    per_vehicle = []
    total_len = 0.0
    total_time = 0.0
    for i, veh in enumerate(scenario.parked):
        a, b = veh.front_s - veh.length, veh.front_s
        ta, tb = profile.time_at(a), profile.time_at(b)
        mask = (profile.s >= a) & (profile.s <= b)
        v_min = min(profile.speed_at(a), profile.speed_at(b))
        if mask.any():
            v_min = min(v_min, float(profile.v[mask].min()))
        duration = tb - ta
        per_vehicle.append(
            PassingStats(i, a, b, duration, (b - a) / duration, v_min)
        )
        total_len += b - a
        total_time += duration
    avg_route = scenario.route_length / travel_time
    avg_passing = total_len / total_time if total_time > 0.0 else avg_route
    return Metrics(
        min_limit=float(profile.v_limit.min()),
        travel_time=travel_time,
        avg_speed_route=avg_route,
        avg_speed_passing=avg_passing,
        passing=tuple(per_vehicle),
    )


def metrics_to_dict(metrics: Metrics) -> dict:
    return {
        "min_limit_mps": metrics.min_limit,
        "travel_time_s": metrics.travel_time,
        "avg_speed_route_mps": metrics.avg_speed_route,
        "avg_speed_passing_mps": metrics.avg_speed_passing,
        "passing": [
            {
                "vehicle": p.vehicle,
                "start_s_m": p.start_s,
                "end_s_m": p.end_s,
                "duration_s": p.duration,
                "avg_speed_mps": p.avg_speed,
                "min_speed_mps": p.min_speed,
            }
            for p in metrics.passing
        ],
    }


def write_profile_csv(profile: SpeedProfile, path) -> None:
    with open(path, "w") as fh:
        fh.write("s_m,v_lim_mps,v_mps,t_s\n")
        for s, vl, v, t in zip(profile.s, profile.v_limit, profile.v, profile.t):
            fh.write(f"{s:.9g},{vl:.9g},{v:.9g},{t:.9g}\n")
