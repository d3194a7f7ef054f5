"""Time-stepped longitudinal simulation and the adversarial
pedestrian-emergence sweep that checks the collision-avoidance guarantee."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import AssumptionSet, Scenario
from .occlusion import conflict_point, min_hidden_distance
from .profiler import SpeedProfile

TRACKING = "tracking"
REACTING = "reacting"
EMERGENCY = "emergency_braking"
STOPPED = "stopped"

PASSED_FIRST = "ego_passed_first"
STOPPED_SHORT = "ego_stopped_short"
COLLISION = "frontal_collision"

# conflict-line tolerance: a stop within this distance of the line counts as
# stopping on it (interpolation slop is ~1e-5 m; physical scales are cm+)
_CROSS_EPS = 1e-4


@dataclass(frozen=True)
class EgoState:
    t: float
    s: float
    v: float
    mode: str = TRACKING


def step(
    state: EgoState,
    profile: SpeedProfile,
    dt: float,
    max_decel: float = 0.0,
    speed_cap: float | None = None,
) -> EgoState:
    """Advance one fixed step; exact for piecewise-constant acceleration.

    Tracking and reacting both follow the planned profile; during the
    reaction window the commanded behavior is held but new acceleration is
    not taken up, so `speed_cap` (the speed at detection) bounds the
    reacting ego. Emergency braking decelerates at `max_decel` to standstill.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if state.mode in (TRACKING, REACTING):
        capped = state.mode == REACTING and speed_cap is not None
        a = profile.accel_at(state.s)
        if capped and a > 0.0 and state.v >= speed_cap - 1e-12:
            return EgoState(state.t + dt, state.s + speed_cap * dt, speed_cap, REACTING)
        s_new = state.s + state.v * dt + 0.5 * a * dt * dt
        if s_new < state.s:
            s_new = state.s
        v_new = profile.speed_at(s_new)
        if capped and v_new > speed_cap:
            v_new = speed_cap
        return EgoState(state.t + dt, s_new, v_new, state.mode)
    if state.mode == EMERGENCY:
        v_new = state.v - max_decel * dt
        if v_new <= 0.0:
            return EgoState(
                state.t + dt,
                state.s + state.v * state.v / (2.0 * max_decel),
                0.0,
                STOPPED,
            )
        return EgoState(state.t + dt, state.s + 0.5 * (state.v + v_new) * dt, v_new, EMERGENCY)
    return EgoState(state.t + dt, state.s, 0.0, STOPPED)


def simulate(scenario: Scenario, profile: SpeedProfile, dt: float = 0.01) -> list:
    """Traverse the route tracking the profile; returns the EgoState series.

    The final state is interpolated onto the route end so the logged travel
    time is not padded up to a whole step.
    """
    states = [EgoState(0.0, 0.0, profile.speed_at(0.0), TRACKING)]
    length = scenario.route_length
    while True:
        nxt = step(states[-1], profile, dt)
        if nxt.s >= length:
            prev = states[-1]
            v_end = profile.speed_at(length)
            t_end = prev.t + 2.0 * (length - prev.s) / (prev.v + v_end)
            states.append(EgoState(t_end, length, v_end, TRACKING))
            return states
        if nxt.s <= states[-1].s:
            raise RuntimeError("simulation stalled: profile speed reached zero")
        states.append(nxt)


def travel_time(states) -> float:
    return states[-1].t


def crossing_time(states, s_target: float):
    """First time the logged ego front reaches s_target, or None."""
    for prev, cur in zip(states, states[1:]):
        if cur.s >= s_target > prev.s:
            frac = (s_target - prev.s) / (cur.s - prev.s)
            return prev.t + frac * (cur.t - prev.t)
    if states and states[0].s >= s_target:
        return states[0].t
    return None


def pedestrian_can_reach(
    hidden_distance: float, pedestrian_speed: float, time_to_conflict
) -> bool:
    """Can a pedestrian at `hidden_distance` step in front of the ego before
    its front reaches the conflict point (`time_to_conflict` from now)?"""
    if time_to_conflict is None or time_to_conflict < 0.0:
        return False
    if not math.isfinite(hidden_distance):
        return False
    return hidden_distance / pedestrian_speed <= time_to_conflict


@dataclass(frozen=True)
class EmergenceEvent:
    """One adversarial pedestrian emergence and its simulated outcome.

    `stop_margin` is the distance from the ego stop point to the conflict
    line (negative when the line was crossed while moving); None for events
    where the ego passed before the pedestrian arrived.
    """

    occlusion: int
    t_emerge: float
    hidden_distance: float
    t_arrival: float
    outcome: str
    stop_margin: float | None
    t_cross: float | None


@dataclass(frozen=True)
class SweepReport:
    n_events: int
    collisions: int
    n_passed: int
    n_stopped: int
    worst_stop_margin: float | None
    time_step: float
    dt: float
    actual_pedestrian_speed: float
    events: tuple


def _run_event(
    occlusion: int,
    profile: SpeedProfile,
    actual: AssumptionSet,
    t_emerge: float,
    s0: float,
    v0: float,
    s_conflict: float,
    t_arrival: float,
    hidden_distance: float,
    dt: float,
) -> EmergenceEvent:
    """Simulate the ego response to one emergence.

    The ego holds the commanded behavior (without taking up new
    acceleration) for the reaction time, then brakes at the emergency rate.
    If that braking response would strand it on or past the conflict line
    while the ego could instead clear the line, it holds the commanded
    speed and passes: braking is only the right response when it actually
    stops short.
    """
    t_brake = t_emerge + actual.reaction_time
    st = EgoState(t_emerge, s0, v0, REACTING)
    crossed = False
    while st.mode != STOPPED:
        if st.mode == REACTING and st.t >= t_brake - 1e-12:
            st = EgoState(st.t, st.s, st.v, EMERGENCY)
            continue
        dt_eff = dt
        if st.mode == REACTING:
            dt_eff = min(dt, t_brake - st.t)
        st = step(st, profile, dt_eff, max_decel=actual.max_decel, speed_cap=v0)
        crossed = crossed or st.s > s_conflict + _CROSS_EPS
        if st.t - t_emerge > 600.0:
            raise RuntimeError("emergence event did not resolve within 600 s")
    stop_margin = s_conflict - st.s
    if not crossed:
        if -_CROSS_EPS <= stop_margin < 0.0:
            stop_margin = 0.0  # stopped on the line to within tolerance
        return EmergenceEvent(
            occlusion, t_emerge, hidden_distance, t_arrival,
            STOPPED_SHORT, stop_margin, None,
        )

    # braking cannot stop short: hold the commanded speed and clear the line
    st = EgoState(t_emerge, s0, v0, REACTING)
    t_cross = None
    while t_cross is None:
        nxt = step(st, profile, dt, speed_cap=v0)
        if st.s <= s_conflict < nxt.s:
            span = nxt.s - st.s
            frac = (s_conflict - st.s) / span if span > 0.0 else 0.0
            t_cross = st.t + frac * (nxt.t - st.t)
        st = nxt
        if st.t - t_emerge > 600.0:
            raise RuntimeError("emergence event did not resolve within 600 s")
    if t_cross < t_arrival:
        return EmergenceEvent(
            occlusion, t_emerge, hidden_distance, t_arrival,
            PASSED_FIRST, None, t_cross,
        )
    return EmergenceEvent(
        occlusion, t_emerge, hidden_distance, t_arrival,
        COLLISION, stop_margin, t_cross,
    )


def adversary_sweep(
    scenario: Scenario,
    profile: SpeedProfile,
    time_step: float = 0.05,
    dt: float = 0.01,
    actual: AssumptionSet | None = None,
    hide_depth_offset: float = 0.0,
) -> SweepReport:
    """Sweep pedestrian emergences over every occlusion and a regular time
    grid while the ego is upstream of the conflict point.

    The pedestrian spawns at the closest fully hidden position for the
    current ego pose and dashes straight for the corridor. `actual` models
    reality deviating from the planning assumptions (pedestrian speed, ego
    reaction time, braking): it defaults to the scenario assumptions, under
    which the sweep must report zero frontal collisions.
    """
    assumed = scenario.assumptions
    if actual is None:
        actual = assumed
    baseline = simulate(scenario, profile, dt)
    tb = np.array([st.t for st in baseline])
    sb = np.array([st.s for st in baseline])

    events = []
    for m, veh in enumerate(scenario.parked):
        s_c = conflict_point(veh, assumed.human_width)
        k = 0
        while True:
            t_e = k * time_step
            k += 1
            if t_e > tb[-1]:
                break
            s0 = float(np.interp(t_e, tb, sb))
            if s0 >= s_c - 1e-9:
                break
            hidden = min_hidden_distance(s0, veh, scenario.ego, assumed.human_width)
            if not math.isfinite(hidden):
                continue  # no pedestrian can be fully hidden here
            d_spawn = hidden + hide_depth_offset
            t_arr = t_e + d_spawn / actual.pedestrian_speed
            v0 = profile.speed_at(s0)  # tracking follows the profile exactly
            events.append(
                _run_event(m, profile, actual, t_e, s0, v0, s_c, t_arr, d_spawn, dt)
            )

    margins = [ev.stop_margin for ev in events if ev.stop_margin is not None]
    return SweepReport(
        n_events=len(events),
        collisions=sum(ev.outcome == COLLISION for ev in events),
        n_passed=sum(ev.outcome == PASSED_FIRST for ev in events),
        n_stopped=sum(ev.outcome == STOPPED_SHORT for ev in events),
        worst_stop_margin=min(margins) if margins else None,
        time_step=time_step,
        dt=dt,
        actual_pedestrian_speed=actual.pedestrian_speed,
        events=tuple(events),
    )


def report_to_dict(report: SweepReport) -> dict:
    return {
        "n_events": report.n_events,
        "collisions": report.collisions,
        "ego_passed_first": report.n_passed,
        "ego_stopped_short": report.n_stopped,
        "worst_stop_margin_m": report.worst_stop_margin,
        "time_step_s": report.time_step,
        "dt_s": report.dt,
        "actual_pedestrian_speed_mps": report.actual_pedestrian_speed,
        "safe": report.collisions == 0,
    }


def write_events_csv(events, path) -> None:
    with open(path, "w") as fh:
        fh.write("m,t_emerge,outcome,stop_margin_m\n")
        for ev in events:
            margin = "" if ev.stop_margin is None else f"{ev.stop_margin:.9g}"
            fh.write(f"{ev.occlusion},{ev.t_emerge:.9g},{ev.outcome},{margin}\n")
