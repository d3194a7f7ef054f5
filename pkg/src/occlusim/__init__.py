"""Occlusion-aware dynamic speed limits for passing parked vehicles.

Computes how fast an automated vehicle may drive past parked vehicles so
that it can still stop for a pedestrian stepping out of the occluded gap
behind them, plans a drivable velocity profile under that limit, and
verifies the collision-avoidance guarantee with an adversarial
pedestrian-emergence sweep.
"""

from .limiter import (
    LimitSample,
    is_relevant,
    limit_at,
    limit_profile,
    planning_caps,
    recovery_gap,
    sample_grid,
    speed_supremum,
    write_limits_csv,
)
from .model import (
    PRESETS,
    AssumptionSet,
    EgoVehicle,
    ParkedVehicle,
    PostedLimit,
    Scenario,
    ScenarioError,
    load_scenario,
    preset,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate,
)
from .occlusion import (
    OcclusionView,
    ShadowRegion,
    conflict_point,
    min_hidden_distance,
    min_hidden_distance_raycast,
    occlusion_view,
    occlusion_views,
    shadow_polygon,
)
from .profiler import (
    InfeasibleEntryError,
    Metrics,
    PassingStats,
    SpeedProfile,
    compute_metrics,
    metrics_to_dict,
    plan_for_scenario,
    plan_profile,
    write_profile_csv,
)
from .simkernel import (
    COLLISION,
    PASSED_FIRST,
    STOPPED_SHORT,
    EgoState,
    EmergenceEvent,
    SweepReport,
    adversary_sweep,
    crossing_time,
    pedestrian_can_reach,
    report_to_dict,
    simulate,
    step,
    travel_time,
    write_events_csv,
)

__version__ = "0.1.0"

__all__ = [
    "AssumptionSet", "EgoVehicle", "ParkedVehicle", "PostedLimit", "Scenario",
    "ScenarioError", "PRESETS", "preset", "validate", "load_scenario",
    "save_scenario", "scenario_from_dict", "scenario_to_dict",
    "OcclusionView", "ShadowRegion", "conflict_point", "min_hidden_distance",
    "min_hidden_distance_raycast", "occlusion_view", "occlusion_views",
    "shadow_polygon",
    "LimitSample", "speed_supremum", "is_relevant", "limit_at",
    "limit_profile", "planning_caps", "recovery_gap", "sample_grid",
    "write_limits_csv",
    "SpeedProfile", "Metrics", "PassingStats", "InfeasibleEntryError",
    "plan_profile", "plan_for_scenario", "compute_metrics",
    "metrics_to_dict", "write_profile_csv",
    "EgoState", "EmergenceEvent", "SweepReport", "step", "simulate",
    "travel_time", "crossing_time", "pedestrian_can_reach", "adversary_sweep",
    "report_to_dict", "write_events_csv",
    "PASSED_FIRST", "STOPPED_SHORT", "COLLISION",
]
