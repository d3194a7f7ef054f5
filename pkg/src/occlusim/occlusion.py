"""Occlusion geometry: where a pedestrian can hide and how close to the road.

Coordinates: the route is the x axis (arclength s of the ego front), the
driving-corridor boundary toward the parked vehicles is the line y = 0, and
the parked vehicles sit at negative y. The occlusion reference line for a
parked vehicle is its front line advanced by half the assumed human width:
a pedestrian hugging the vehicle's front corner is only cleared once the
ego front has passed that line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import EgoVehicle, ParkedVehicle, Scenario

# outboard extent used for the occluding body: a tall parked vehicle cannot
# be seen past or over, so the strip is effectively unbounded away from the road
_DEEP = 1e12


def conflict_point(vehicle: ParkedVehicle, human_width: float) -> float:
    """Arclength at which the ego front clears a pedestrian emerging at the
    vehicle's front line (front line plus half the body width)."""
    return vehicle.front_s + 0.5 * human_width


def min_hidden_distance(
    s0: float, vehicle: ParkedVehicle, ego: EgoVehicle, human_width: float
) -> float:
    """Closed-form minimum distance from the corridor boundary at which a
    human of `human_width` can be fully obscured behind `vehicle`.

    Returns +inf once the sensor origin is level with the conflict line
    (`gap <= sensor_x`): from there the sensor sees the whole gap and
    nothing can stay hidden.
    """
    gap = conflict_point(vehicle, human_width) - s0
    reach = gap - ego.sensor_x
    if reach <= 0.0:
        return math.inf
    return vehicle.lateral_gap + (vehicle.lateral_gap + ego.sensor_y) / reach * human_width


@dataclass(frozen=True)
class OcclusionView:
    """Derived geometry of one occlusion as seen from ego position s0."""

    index: int
    s_conflict: float       # conflict-point arclength, m
    gap: float              # remaining distance to the conflict point, m
    hidden_distance: float  # min distance of a fully hidden pedestrian, m (may be inf)
    p_hidden: tuple | None  # front-center of the closest fully hidden pedestrian
    p_conflict: tuple       # conflict point on the corridor boundary


def occlusion_view(
    index: int, s0: float, vehicle: ParkedVehicle, ego: EgoVehicle, human_width: float
) -> OcclusionView:
    s_c = conflict_point(vehicle, human_width)
    d = min_hidden_distance(s0, vehicle, ego, human_width)
    p_hidden = None if not math.isfinite(d) else (s_c + 0.5 * human_width, -d)
    return OcclusionView(index, s_c, s_c - s0, d, p_hidden, (s_c, 0.0))


def occlusion_views(scenario: Scenario, s0: float) -> list:
    w = scenario.assumptions.human_width
    return [
        occlusion_view(i, s0, veh, scenario.ego, w)
        for i, veh in enumerate(scenario.parked)
    ]


# --- ray-cast check ------------------------------------------------------

def _point_in_rect(p, rect) -> bool:
    xmin, xmax, ymin, ymax = rect
    return xmin <= p[0] <= xmax and ymin <= p[1] <= ymax


def _segment_crosses_rect(p, q, rect) -> bool:
    """Liang-Barsky clip; touching the boundary counts as crossing."""
    xmin, xmax, ymin, ymax = rect
    x0, y0 = p
    dx, dy = q[0] - x0, q[1] - y0
    t0, t1 = 0.0, 1.0
    for delta, lo, hi, start in ((dx, xmin, xmax, x0), (dy, ymin, ymax, y0)):
        if delta == 0.0:
            if start < lo or start > hi:
                return False
            continue
        ta = (lo - start) / delta
        tb = (hi - start) / delta
        if ta > tb:
            ta, tb = tb, ta
        t0 = max(t0, ta)
        t1 = min(t1, tb)
        if t0 > t1:
            return False
    return True


def _occluded(sensor, point, rect) -> bool:
    """True if `point` is hidden from `sensor` by the solid rectangle."""
    if _point_in_rect(point, rect):
        return True
    return _segment_crosses_rect(sensor, point, rect)


@dataclass(frozen=True)
class ShadowRegion:
    """Polygon of space invisible from `sensor` behind one rectangle,
    clipped to a rectangular window."""

    vertices: tuple
    sensor: tuple
    rect: tuple    # (xmin, xmax, ymin, ymax) of the occluding body
    window: tuple  # (xmin, xmax, ymin, ymax) clip window

    def contains(self, point) -> bool:
        # membership via the defining occlusion predicate: robust on edges
        if not _point_in_rect(point, self.window):
            return False
        if _point_in_rect(point, self.rect):
            return False
        return _segment_crosses_rect(self.sensor, point, self.rect)


def _point_in_polygon(p, vertices) -> bool:
    x, y = p
    inside = False
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        if (y0 > y) != (y1 > y):
            xi = x0 + (y - y0) / (y1 - y0) * (x1 - x0)
            if xi > x:
                inside = not inside
    return inside


def _ray_exit(origin, direction, window):
    """Point where the ray origin + t*direction (t > 0) leaves the window."""
    xmin, xmax, ymin, ymax = window
    t_exit = math.inf
    for d, lo, hi, start in (
        (direction[0], xmin, xmax, origin[0]),
        (direction[1], ymin, ymax, origin[1]),
    ):
        if d > 0:
            t_exit = min(t_exit, (hi - start) / d)
        elif d < 0:
            t_exit = min(t_exit, (lo - start) / d)
    return (origin[0] + t_exit * direction[0], origin[1] + t_exit * direction[1])


def _window_walk(window, start, stop, clockwise: bool):
    """Window corners strictly between two boundary points along one arc."""
    xmin, xmax, ymin, ymax = window
    corners = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]

    def peri(p):
        x, y = p
        eps = 1e-9
        if abs(y - ymin) < eps:
            return x - xmin
        if abs(x - xmax) < eps:
            return (xmax - xmin) + (y - ymin)
        if abs(y - ymax) < eps:
            return (xmax - xmin) + (ymax - ymin) + (xmax - x)
        return 2 * (xmax - xmin) + (ymax - ymin) + (ymax - y)

    total = 2 * ((xmax - xmin) + (ymax - ymin))
    a, b = peri(start), peri(stop)
    out = []
    for c in corners:
        pc = peri(c)
        if clockwise:
            ahead = (a - pc) % total
            span = (a - b) % total
        else:
            ahead = (pc - a) % total
            span = (b - a) % total
        if 1e-9 < ahead < span - 1e-9:
            out.append((c, ahead))
    out.sort(key=lambda item: item[1])
    return [c for c, _ in out]


def shadow_polygon(sensor, rect, window) -> ShadowRegion:
    """Construct the occluded region behind `rect` as seen from `sensor` by
    extending rays through the two silhouette corners, clipped to `window`.

    Raises ValueError if the sensor is inside the occluding rectangle.
    """
    if _point_in_rect(sensor, rect):
        raise ValueError("sensor origin lies inside the occluding rectangle")
    xmin, xmax, ymin, ymax = rect
    corners = [(xmin, ymin), (xmax, ymin), (xmax, ymax), (xmin, ymax)]  # CCW
    facing = []
    for i in range(4):
        ax, ay = corners[i]
        bx, by = corners[(i + 1) % 4]
        nx, ny = (by - ay), -(bx - ax)  # outward normal for a CCW rectangle
        facing.append(nx * (sensor[0] - ax) + ny * (sensor[1] - ay) > 0.0)

    sil = [i for i in range(4) if facing[i - 1] != facing[i]]
    if len(sil) != 2:
        raise ValueError("degenerate silhouette; sensor on the rectangle boundary?")
    # enter: facing -> hidden edge begins; leave: hidden -> facing
    enter = next(i for i in sil if facing[i - 1] and not facing[i])
    leave = next(i for i in sil if not facing[i - 1] and facing[i])

    hidden_chain = [corners[enter]]
    j = enter
    while j != leave:
        j = (j + 1) % 4
        hidden_chain.append(corners[j])

    exit_leave = _ray_exit(corners[leave], (corners[leave][0] - sensor[0],
                                            corners[leave][1] - sensor[1]), window)
    exit_enter = _ray_exit(corners[enter], (corners[enter][0] - sensor[0],
                                            corners[enter][1] - sensor[1]), window)

    # test point strictly on the lit side: the sensor nudged toward the body
    cx, cy = 0.5 * (xmin + xmax), 0.5 * (ymin + ymax)
    norm = math.hypot(cx - sensor[0], cy - sensor[1])
    probe = (sensor[0] + 1e-6 * (cx - sensor[0]) / norm,
             sensor[1] + 1e-6 * (cy - sensor[1]) / norm)
    for clockwise in (False, True):
        arc = _window_walk(window, exit_leave, exit_enter, clockwise)
        vertices = tuple(hidden_chain + [exit_leave] + arc + [exit_enter])
        if not _point_in_polygon(probe, vertices):
            return ShadowRegion(vertices, tuple(sensor), tuple(rect), tuple(window))
    raise ValueError("could not orient shadow polygon away from the sensor")


def min_hidden_distance_raycast(
    s0: float,
    vehicle: ParkedVehicle,
    ego: EgoVehicle,
    human_width: float,
    tol: float = 1e-9,
) -> float:
    """Geometric check on min_hidden_distance: bisect the smallest depth at
    which a pedestrian segment of `human_width` fits fully inside the sensor
    shadow just beyond the occlusion reference line, using only
    segment-versus-rectangle occlusion tests.
    """
    s_ref = conflict_point(vehicle, human_width)
    gap = s_ref - s0
    if gap - ego.sensor_x <= 0.0:
        return math.inf
    sensor = (s0 + ego.sensor_x, ego.sensor_y)
    rect = (s_ref - vehicle.length, s_ref, -_DEEP, -vehicle.lateral_gap)

    def fully_hidden(depth: float) -> bool:
        near = (s_ref, -depth)
        far = (s_ref + human_width, -depth)
        return _occluded(sensor, near, rect) and _occluded(sensor, far, rect)

    # the shadow only deepens farther into the gap, so the body pressed
    # against the reference line gives the minimum; bracket then bisect
    lo, hi = 0.0, max(vehicle.lateral_gap, 1.0)
    while not fully_hidden(hi):
        hi *= 2.0
        if hi > 1e9:
            return math.inf
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if fully_hidden(mid):
            hi = mid
        else:
            lo = mid
    return hi
