"""Domain types, assumption presets, and scenario construction/validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

KPH = 1.0 / 3.6  # m/s per km/h


class ScenarioError(ValueError):
    """Raised when a scenario breaks a constraint; `violations` lists them all."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


@dataclass(frozen=True)
class AssumptionSet:
    """Assumed pedestrian behavior and ego response capabilities.

    All values SI. `plan_accel`/`plan_decel` are comfort bounds used when
    planning the nominal velocity profile; emergency braking in the
    simulation uses `max_decel` only.
    """

    pedestrian_speed: float  # fastest assumed pedestrian, m/s
    reaction_time: float     # detection until actuated braking, s
    max_decel: float         # emergency deceleration magnitude, m/s^2
    human_width: float       # assumed total human width, m
    plan_accel: float = 2.0
    plan_decel: float = 3.0

    def override(self, **changes) -> "AssumptionSet":
        return replace(self, **changes)


PRESETS = {
    # walking speed per ISO 13855; braking at the lower end of dry-road
    # passenger-car capability
    "example": AssumptionSet(
        pedestrian_speed=1.6,
        reaction_time=1.0,
        max_decel=6.5,
        human_width=0.5,
        plan_accel=2.0,
        plan_decel=3.0,
    ),
    # very slow response, braking on ice, sprinting child
    "extreme": AssumptionSet(
        pedestrian_speed=10.0,
        reaction_time=2.0,
        max_decel=1.0,
        human_width=0.3,
        plan_accel=2.0,
        plan_decel=1.0,
    ),
}


def preset(name: str) -> AssumptionSet:
    """Return a named assumption preset ("example" or "extreme")."""
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(
            f"unknown assumption preset {name!r}; known: {sorted(PRESETS)}"
        ) from None


@dataclass(frozen=True)
class EgoVehicle:
    """Ego geometry and the effective sensor origin.

    `sensor_x` and `sensor_y` locate the effective origin of the environment
    perception relative to the ego front corner nearest the occlusions:
    `sensor_x` along the direction of travel, `sensor_y` inboard (away from
    the parked vehicles). Corner-mounted sensor modules have both near zero.
    """

    width: float
    length: float
    sensor_x: float = 0.0
    sensor_y: float = 0.0


@dataclass(frozen=True)
class ParkedVehicle:
    """One parked vehicle, described by its front line and lateral gap.

    `front_s` is the arclength of the vehicle's front line along the route
    (the end the ego reaches last); `lateral_gap` is the clearance between
    the ego driving-corridor boundary and the vehicle's near side.
    """

    front_s: float
    length: float
    lateral_gap: float


@dataclass(frozen=True)
class PostedLimit:
    """Piecewise-constant posted speed limit v(s) along the route."""

    segments: tuple  # ((start_s, speed_mps), ...), starts ascending from 0

    @classmethod
    def constant(cls, speed_mps: float) -> "PostedLimit":
        return cls(((0.0, float(speed_mps)),))

    def at(self, s: float) -> float:
        speed = self.segments[0][1]
        for start, value in self.segments:
            if s >= start - 1e-12:
                speed = value
            else:
                break
        return speed

    def max_speed(self) -> float:
        return max(v for _, v in self.segments)


@dataclass(frozen=True)
class Scenario:
    """A straight route with parked vehicles and the assumptions in force."""

    route_length: float
    posted: PostedLimit
    ego: EgoVehicle
    parked: tuple  # (ParkedVehicle, ...) in route order
    assumptions: AssumptionSet


def validate(scenario: Scenario) -> Scenario:
    """Check every scenario constraint; return the scenario or raise
    ScenarioError naming each violated field and constraint."""
    v = []
    if scenario.route_length <= 0.0:
        v.append("route_length: must be positive (empty route)")

    segs = scenario.posted.segments
    if not segs:
        v.append("posted_limit: must define at least one segment")
    else:
        if abs(segs[0][0]) > 1e-12:
            v.append("posted_limit: first segment must start at s=0")
        for i, (start, speed) in enumerate(segs):
            if speed <= 0.0:
                v.append(f"posted_limit[{i}]: speed must be positive")
            if i and start <= segs[i - 1][0]:
                v.append(f"posted_limit[{i}]: segment starts must be ascending")

    a = scenario.assumptions
    if a.pedestrian_speed <= 0.0:
        v.append("assumptions.pedestrian_speed: must be positive")
    if a.reaction_time < 0.0:
        v.append("assumptions.reaction_time: must be non-negative")
    if a.max_decel <= 0.0:
        v.append("assumptions.max_decel: must be positive")
    if a.human_width < 0.0:
        v.append("assumptions.human_width: must be non-negative")
    if a.plan_accel <= 0.0:
        v.append("assumptions.plan_accel: must be positive")
    if a.plan_decel <= 0.0:
        v.append("assumptions.plan_decel: must be positive")
    elif a.plan_decel > a.max_decel + 1e-12:
        v.append("assumptions.plan_decel: exceeds emergency deceleration max_decel")

    ego = scenario.ego
    if ego.width <= 0.0:
        v.append("ego.width: must be positive")
    if ego.length <= 0.0:
        v.append("ego.length: must be positive")
    if ego.sensor_x < 0.0:
        v.append("ego.sensor_x: must be non-negative")
    if ego.sensor_y < 0.0:
        v.append("ego.sensor_y: must be non-negative")

    for i, veh in enumerate(scenario.parked):
        if veh.length <= 0.0:
            v.append(f"parked[{i}].length: must be positive (negative dimension)")
        if veh.lateral_gap < 0.0:
            v.append(f"parked[{i}].lateral_gap: negative lateral gap")
        if veh.front_s > scenario.route_length + 1e-9 or veh.front_s - veh.length < -1e-9:
            v.append(f"parked[{i}]: out of route")

    order = sorted(range(len(scenario.parked)), key=lambda i: scenario.parked[i].front_s)
    for a_i, b_i in zip(order, order[1:]):
        first, second = scenario.parked[a_i], scenario.parked[b_i]
        if second.front_s - second.length < first.front_s - 1e-9:
            v.append(f"parked[{a_i}]/parked[{b_i}]: longitudinal overlap")

    if v:
        raise ScenarioError(v)
    return scenario


# --- JSON scenario files -------------------------------------------------
#
# Speeds at the file boundary accept a `_kph` or `_mps` suffix; everything
# is stored internally, and always written back, in SI units.

def _speed(mapping: dict, base: str, where: str) -> float:
    has_mps = f"{base}_mps" in mapping
    has_kph = f"{base}_kph" in mapping
    if has_mps == has_kph:
        raise ScenarioError([f"{where}: give exactly one of {base}_mps / {base}_kph"])
    if has_mps:
        return float(mapping[f"{base}_mps"])
    return float(mapping[f"{base}_kph"]) * KPH


def _posted_from_json(node, where="route.posted_limit") -> PostedLimit:
    if isinstance(node, dict):
        node = [dict(node, from_m=node.get("from_m", 0.0))]
    segments = tuple(
        (float(seg.get("from_m", 0.0)), _speed(seg, "speed", f"{where}[{i}]"))
        for i, seg in enumerate(node)
    )
    return PostedLimit(segments)


def _assumptions_from_json(node) -> AssumptionSet:
    if isinstance(node, str):
        return preset(node)
    node = dict(node)
    base = preset(node.pop("preset")) if "preset" in node else None
    if not node:
        if base is None:
            raise ScenarioError(["assumptions: empty"])
        return base
    fields = {}
    if "pedestrian_speed_mps" in node or "pedestrian_speed_kph" in node:
        fields["pedestrian_speed"] = _speed(node, "pedestrian_speed", "assumptions")
        node.pop("pedestrian_speed_mps", None)
        node.pop("pedestrian_speed_kph", None)
    for key, field in (
        ("reaction_time_s", "reaction_time"),
        ("max_decel_mps2", "max_decel"),
        ("human_width_m", "human_width"),
        ("plan_accel_mps2", "plan_accel"),
        ("plan_decel_mps2", "plan_decel"),
    ):
        if key in node:
            fields[field] = float(node.pop(key))
    if node:
        raise ScenarioError([f"assumptions: unknown keys {sorted(node)}"])
    if base is not None:
        return base.override(**fields)
    return AssumptionSet(**fields)


def scenario_from_dict(data: dict) -> Scenario:
    route = data["route"]
    ego = data["ego"]
    return Scenario(
        route_length=float(route["length_m"]),
        posted=_posted_from_json(route["posted_limit"]),
        ego=EgoVehicle(
            width=float(ego["width_m"]),
            length=float(ego["length_m"]),
            sensor_x=float(ego.get("sensor_x_m", 0.0)),
            sensor_y=float(ego.get("sensor_y_m", 0.0)),
        ),
        parked=tuple(
            ParkedVehicle(
                front_s=float(p["front_s_m"]),
                length=float(p["length_m"]),
                lateral_gap=float(p["lateral_gap_m"]),
            )
            for p in data.get("parked", [])
        ),
        assumptions=_assumptions_from_json(data["assumptions"]),
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    a = scenario.assumptions
    return {
        "route": {
            "length_m": scenario.route_length,
            "posted_limit": [
                {"from_m": start, "speed_mps": speed}
                for start, speed in scenario.posted.segments
            ],
        },
        "ego": {
            "width_m": scenario.ego.width,
            "length_m": scenario.ego.length,
            "sensor_x_m": scenario.ego.sensor_x,
            "sensor_y_m": scenario.ego.sensor_y,
        },
        "parked": [
            {"front_s_m": p.front_s, "length_m": p.length, "lateral_gap_m": p.lateral_gap}
            for p in scenario.parked
        ],
        "assumptions": {
            "pedestrian_speed_mps": a.pedestrian_speed,
            "reaction_time_s": a.reaction_time,
            "max_decel_mps2": a.max_decel,
            "human_width_m": a.human_width,
            "plan_accel_mps2": a.plan_accel,
            "plan_decel_mps2": a.plan_decel,
        },
    }


def load_scenario(path, check: bool = True) -> Scenario:
    with open(path) as fh:
        scenario = scenario_from_dict(json.load(fh))
    return validate(scenario) if check else scenario


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario_to_dict(scenario), indent=2) + "\n")
