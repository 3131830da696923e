"""Planar workspace geometry for a disk robot.

Conventions used throughout the toolkit:

* Obstacles are closed point sets.  A configuration whose disk touches an
  obstacle boundary (clearance exactly equal to ``robot_radius``) counts as
  a collision.
* A configuration is free only if the whole robot disk lies inside the
  workspace bounds; anything outside the bounds is a collision.
* Segment validation is sample based: a segment is declared free when a
  fixed number of evenly spaced points along it (endpoints included) are
  all collision free.  Obstacles thinner than the sample spacing can slip
  between consecutive sample points undetected; that resolution limit is
  deliberate and controlled by the ``check_points`` parameter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True, slots=True)
class Configuration:
    """A point in the plane; coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"configuration coordinates must be finite, got ({self.x}, {self.y})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def distance(a: Configuration, b: Configuration) -> float:
    """Euclidean distance between two configurations."""
    return math.hypot(a.x - b.x, a.y - b.y)


def distance_sq(a: Configuration, b: Configuration) -> float:
    """Squared Euclidean distance; cheaper than `distance` and order-equivalent."""
    dx = a.x - b.x
    dy = a.y - b.y
    return dx * dx + dy * dy


def _ccw(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> float:
    """Twice the signed area of triangle abc (>0 for counter-clockwise)."""
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def _segments_cross(p1, p2, p3, p4) -> bool:
    """True if open segments p1-p2 and p3-p4 properly cross each other."""
    d1 = _ccw(*p3, *p4, *p1)
    d2 = _ccw(*p3, *p4, *p2)
    d3 = _ccw(*p1, *p2, *p3)
    d4 = _ccw(*p1, *p2, *p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != d2 and d3 != d4


class Polygon:
    """A simple polygon stored with counter-clockwise vertex order.

    Vertices supplied in clockwise order are reversed on construction, so
    two mirrored vertex listings describe the same obstacle.  Degenerate
    (zero-area) and self-crossing boundaries are rejected.
    """

    __slots__ = ("vertices",)

    def __init__(self, vertices: Iterable[Configuration | Sequence[float]]):
        verts = []
        for v in vertices:
            if isinstance(v, Configuration):
                verts.append(v)
            else:
                x, y = v
                verts.append(Configuration(float(x), float(y)))
        if len(verts) < 3:
            raise ValueError(f"polygon needs at least 3 vertices, got {len(verts)}")
        for a, b in zip(verts, verts[1:] + verts[:1]):
            if a.x == b.x and a.y == b.y:
                raise ValueError("polygon has repeated consecutive vertices")
        area2 = 0.0
        for a, b in zip(verts, verts[1:] + verts[:1]):
            area2 += a.x * b.y - b.x * a.y
        if area2 == 0.0:
            raise ValueError("polygon has zero area")
        if area2 < 0.0:
            verts.reverse()
        n = len(verts)
        for i in range(n):
            for j in range(i + 1, n):
                if j == i or (j + 1) % n == i or (i + 1) % n == j:
                    continue  # adjacent edges share a vertex; skip
                a, b = verts[i], verts[(i + 1) % n]
                c, d = verts[j], verts[(j + 1) % n]
                if _segments_cross(a.as_tuple(), b.as_tuple(), c.as_tuple(), d.as_tuple()):
                    raise ValueError("polygon boundary is self-intersecting")
        self.vertices: tuple[Configuration, ...] = tuple(verts)

    def __len__(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Polygon({[v.as_tuple() for v in self.vertices]})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Polygon):
            return NotImplemented
        return self.vertices == other.vertices

    def __hash__(self) -> int:
        return hash(self.vertices)

    def to_list(self) -> list[list[float]]:
        return [[v.x, v.y] for v in self.vertices]


class Workspace:
    """Rectangular bounds, polygonal obstacles and a disk robot radius.

    Treated as immutable once constructed; edge geometry is pre-packed into
    numpy arrays so point queries stay cheap inside planner loops.
    """

    def __init__(
        self,
        bounds: Sequence[float],
        obstacles: Iterable[Polygon] = (),
        robot_radius: float = 0.0,
    ):
        xmin, ymin, xmax, ymax = (float(v) for v in bounds)
        if not all(math.isfinite(v) for v in (xmin, ymin, xmax, ymax)):
            raise ValueError("workspace bounds must be finite")
        if not (xmin < xmax and ymin < ymax):
            raise ValueError(f"degenerate bounds {bounds!r}")
        robot_radius = float(robot_radius)
        if not math.isfinite(robot_radius) or robot_radius < 0.0:
            raise ValueError(f"robot_radius must be finite and >= 0, got {robot_radius}")
        if robot_radius >= min(xmax - xmin, ymax - ymin) / 2.0:
            raise ValueError("robot_radius leaves no free space inside the bounds")
        self.bounds = (xmin, ymin, xmax, ymax)
        self.obstacles: tuple[Polygon, ...] = tuple(obstacles)
        self.robot_radius = robot_radius
        for poly in self.obstacles:
            for v in poly.vertices:
                if not (xmin <= v.x <= xmax and ymin <= v.y <= ymax):
                    raise ValueError(f"obstacle vertex {v.as_tuple()} outside bounds")
        self._pack_edges()

    def _pack_edges(self) -> None:
        starts, ends, owner = [], [], []
        for pid, poly in enumerate(self.obstacles):
            vs = poly.vertices
            for a, b in zip(vs, vs[1:] + vs[:1]):
                starts.append((a.x, a.y))
                ends.append((b.x, b.y))
                owner.append(pid)
        if starts:
            self._edge_a = np.asarray(starts, dtype=np.float64)
            ab = np.asarray(ends, dtype=np.float64) - self._edge_a
            self._edge_ab = ab
            self._edge_len2 = np.einsum("ij,ij->i", ab, ab)
            self._edge_owner = np.asarray(owner, dtype=np.intp)
            self._n_polys = len(self.obstacles)
        else:
            self._edge_a = None

    @property
    def width(self) -> float:
        return self.bounds[2] - self.bounds[0]

    @property
    def height(self) -> float:
        return self.bounds[3] - self.bounds[1]

    def min_obstacle_distance_sq(self, x: float, y: float) -> float:
        """Squared distance from (x, y) to the nearest obstacle boundary.

        Returns 0.0 for points inside an obstacle and +inf when the
        workspace has no obstacles.
        """
        if self._edge_a is None:
            return math.inf
        p = np.array((x, y), dtype=np.float64)
        ap = p - self._edge_a
        t = np.einsum("ij,ij->i", ap, self._edge_ab)
        np.divide(t, self._edge_len2, out=t, where=self._edge_len2 > 0.0)
        np.clip(t, 0.0, 1.0, out=t)
        diff = ap - t[:, None] * self._edge_ab
        d2 = np.einsum("ij,ij->i", diff, diff)
        if self._point_inside_any(x, y):
            return 0.0
        return float(d2.min())

    def _point_inside_any(self, x: float, y: float) -> bool:
        """Crossing-number test against every obstacle at once."""
        ax = self._edge_a[:, 0]
        ay = self._edge_a[:, 1]
        bx = ax + self._edge_ab[:, 0]
        by = ay + self._edge_ab[:, 1]
        straddles = (ay > y) != (by > y)
        if not straddles.any():
            return False
        with np.errstate(divide="ignore", invalid="ignore"):
            xs = ax + (y - ay) * self._edge_ab[:, 0] / self._edge_ab[:, 1]
        crossing = straddles & (x < xs)
        counts = np.bincount(self._edge_owner[crossing], minlength=self._n_polys)
        return bool((counts % 2 == 1).any())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Workspace):
            return NotImplemented
        return (
            self.bounds == other.bounds
            and self.robot_radius == other.robot_radius
            and self.obstacles == other.obstacles
        )

    def __hash__(self) -> int:
        return hash((self.bounds, self.robot_radius, self.obstacles))

    def to_dict(self) -> dict:
        return {
            "bounds": list(self.bounds),
            "robot_radius": self.robot_radius,
            "obstacles": [poly.to_list() for poly in self.obstacles],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Workspace":
        return cls(
            bounds=data["bounds"],
            obstacles=[Polygon(vs) for vs in data.get("obstacles", [])],
            robot_radius=data.get("robot_radius", 0.0),
        )


def point_free(ws: Workspace, c: Configuration) -> bool:
    """True when the robot disk at `c` fits inside the bounds and clears every obstacle.

    Clearance is strict: a disk touching an obstacle boundary is in collision.
    """
    r = ws.robot_radius
    xmin, ymin, xmax, ymax = ws.bounds
    if not (xmin + r <= c.x <= xmax - r and ymin + r <= c.y <= ymax - r):
        return False
    if ws._edge_a is None:
        return True
    return ws.min_obstacle_distance_sq(c.x, c.y) > r * r


def segment_points(a: Configuration, b: Configuration, m: int) -> list[Configuration]:
    """`m` evenly spaced configurations from `a` to `b`, both endpoints included."""
    if m < 2:
        raise ValueError(f"need at least 2 sample points per segment, got {m}")
    pts = []
    last = m - 1
    for i in range(m):
        t = i / last
        pts.append(Configuration(a.x * (1.0 - t) + b.x * t, a.y * (1.0 - t) + b.y * t))
    return pts


def segment_free(ws: Workspace, a: Configuration, b: Configuration, m: int) -> bool:
    """Sample-based segment check: free iff all `m` evenly spaced points are free."""
    return all(point_free(ws, p) for p in segment_points(a, b, m))


def as_configurations(points: Iterable[Configuration | Sequence[float]]) -> list[Configuration]:
    """Normalize a mix of Configurations and (x, y) pairs."""
    out = []
    for p in points:
        if isinstance(p, Configuration):
            out.append(p)
        else:
            x, y = p
            out.append(Configuration(float(x), float(y)))
    return out


def check_targets(
    ws: Workspace, targets: Iterable[Configuration | Sequence[float]], minimum: int = 1
) -> list[Configuration]:
    """Validate a planner's target list: enough of them, pairwise distinct, all free."""
    out = as_configurations(targets)
    if len(out) < minimum:
        raise ValueError(f"need at least {minimum} target(s), got {len(out)}")
    seen: set[tuple[float, float]] = set()
    for t in out:
        if t.as_tuple() in seen:
            raise ValueError(f"duplicate target {t.as_tuple()}")
        seen.add(t.as_tuple())
        if not point_free(ws, t):
            raise ValueError(f"target {t.as_tuple()} is in collision")
    return out


class CollisionMeter:
    """Wraps a workspace and counts every point-collision check it performs.

    Planners route all edge validation through a meter so per-iteration
    collision-detection effort can be recorded.  `segment_free` stops at the
    first blocked sample point, so the count reflects checks actually done.
    """

    __slots__ = ("ws", "check_points", "point_checks")

    def __init__(self, ws: Workspace, check_points: int):
        if check_points < 2:
            raise ValueError(f"check_points must be >= 2, got {check_points}")
        self.ws = ws
        self.check_points = check_points
        self.point_checks = 0

    def point_free(self, c: Configuration) -> bool:
        self.point_checks += 1
        return point_free(self.ws, c)

    def segment_free(self, a: Configuration, b: Configuration) -> bool:
        return all(self.point_free(p) for p in segment_points(a, b, self.check_points))
