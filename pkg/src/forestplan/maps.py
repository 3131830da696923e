"""Benchmark workspace generators.

Three obstacle layout families, all seeded and deterministic:

* ``dense-grid`` — a square lattice of jittered square blocks separated by
  straight corridors.
* ``v-dense`` — staggered rows of wide slabs (brick-wall pattern), giving
  winding corridors and a higher obstacle count.
* ``triangles`` — random triangles scattered over the area, possibly
  overlapping.

``density`` is the approximate fraction of the area covered by obstacles;
as it approaches zero the generators degrade to an empty workspace.  Every
generated workspace is checked for free-space connectivity with a
grid flood fill; the random families retry with perturbed seeds, and a
:class:`MapGenerationError` is raised when no connected layout is found.
"""
from __future__ import annotations

import math
from collections import deque
from random import Random

from .geometry import Configuration, Polygon, Workspace, point_free

MAP_KINDS = ("dense-grid", "v-dense", "triangles")

# Perturbation added to the seed on each connectivity retry (a prime, so
# retried streams never collide with neighbouring base seeds).
_RETRY_STRIDE = 1000003


class MapGenerationError(RuntimeError):
    """No connected layout could be generated within the retry budget."""


def _rect(cx: float, cy: float, w: float, h: float) -> Polygon:
    return Polygon([
        (cx - w / 2, cy - h / 2),
        (cx + w / 2, cy - h / 2),
        (cx + w / 2, cy + h / 2),
        (cx - w / 2, cy + h / 2),
    ])


def _free_components(workspace: Workspace, resolution: float) -> list[list[tuple[float, float]]]:
    """4-connected components of the free cells of a `resolution`-spaced grid.

    Cells are classified by whether their centre is collision-free.  Each
    component is returned as a list of cell centres in scan order;
    components are sorted largest first (ties by first cell).
    """
    if resolution <= 0:
        raise ValueError(f"resolution must be positive, got {resolution}")
    xmin, ymin, xmax, ymax = workspace.bounds
    nx = max(2, int(round((xmax - xmin) / resolution)))
    ny = max(2, int(round((ymax - ymin) / resolution)))
    dx = (xmax - xmin) / nx
    dy = (ymax - ymin) / ny

    def centre(i: int, j: int) -> tuple[float, float]:
        return (xmin + (i + 0.5) * dx, ymin + (j + 0.5) * dy)

    free = [
        [point_free(workspace, Configuration(*centre(i, j))) for j in range(ny)]
        for i in range(nx)
    ]
    components: list[list[tuple[float, float]]] = []
    seen: set[tuple[int, int]] = set()
    for i in range(nx):
        for j in range(ny):
            if not free[i][j] or (i, j) in seen:
                continue
            queue = deque([(i, j)])
            seen.add((i, j))
            cells = []
            while queue:
                ci, cj = queue.popleft()
                cells.append(centre(ci, cj))
                for ni, nj in ((ci - 1, cj), (ci + 1, cj), (ci, cj - 1), (ci, cj + 1)):
                    if 0 <= ni < nx and 0 <= nj < ny and free[ni][nj] and (ni, nj) not in seen:
                        seen.add((ni, nj))
                        queue.append((ni, nj))
            components.append(cells)
    components.sort(key=lambda c: (-len(c), c[0]))
    return components


def free_space_connected(workspace: Workspace, resolution: float) -> bool:
    """True when every free cell of a `resolution`-spaced grid is reachable.

    A workspace with no free cell at all counts as disconnected.
    """
    return len(_free_components(workspace, resolution)) == 1


def _carve_until_connected(
    bounds, obstacles: list[Polygon], robot_radius: float, resolution: float
) -> tuple[Workspace, int]:
    """Delete obstacles near trapped pockets until the free space reconnects.

    Scattered layouts can enclose small pockets of free space.  Each round
    removes the obstacle closest to the smallest pocket and rechecks;
    deleting everything trivially terminates the loop.  Returns the
    repaired workspace and how many obstacles were removed.
    """
    remaining = list(obstacles)
    while True:
        workspace = Workspace(bounds, remaining, robot_radius)
        components = _free_components(workspace, resolution)
        if len(components) <= 1 and not (len(components) == 0 and remaining):
            return workspace, len(obstacles) - len(remaining)
        if components:
            px, py = components[-1][0]  # a cell inside the smallest pocket
        else:  # no free cell at all; start clearing from the centre
            px = (bounds[0] + bounds[2]) / 2
            py = (bounds[1] + bounds[3]) / 2
        nearest = min(
            range(len(remaining)),
            key=lambda k: min(
                (vx - px) ** 2 + (vy - py) ** 2 for vx, vy in remaining[k].to_list()
            ),
        )
        remaining.pop(nearest)


def _dense_grid(size: float, density: float, robot_radius: float, rng: Random) -> list[Polygon]:
    k = 5  # blocks per side
    side = size * math.sqrt(density) / k
    # uniform gaps everywhere, boundary lanes included, so the robot disk
    # (which eats a radius from each wall of a lane) always fits through
    gap = (size - k * side) / (k + 1)
    # a lane is hopeless once the disk-inflated clearance drops below one
    # cell of the connectivity probe; anything wider is left to the
    # flood-fill check, which re-rolls jitter across attempts
    clearance = gap - 2.0 * robot_radius
    probe = max(robot_radius / 2.0, size / 256.0)
    if clearance < probe:
        raise ValueError(
            f"density {density} leaves corridors of {gap:.2f} between blocks, "
            f"only {clearance:.2f} after inflating by the robot radius "
            f"{robot_radius}; reduce density or the radius"
        )
    pitch = side + gap
    obstacles = []
    for i in range(k):
        for j in range(k):
            w = side * rng.uniform(0.96, 1.04)
            h = side * rng.uniform(0.96, 1.04)
            cx = gap + side / 2 + i * pitch + rng.uniform(-0.015, 0.015) * pitch
            cy = gap + side / 2 + j * pitch + rng.uniform(-0.015, 0.015) * pitch
            obstacles.append(_rect(cx, cy, w, h))
    return obstacles


def _v_dense(size: float, density: float, robot_radius: float, rng: Random) -> list[Polygon]:
    rows = 7
    cols = 5
    band = size / rows
    pitch = size / cols
    # Slabs are wide and flat; stagger alternate rows by half a pitch.
    h = band * density * 1.45
    w = pitch * density * 1.45
    h = min(h, band - 2.2 * robot_radius)
    w = min(w, pitch - 2.2 * robot_radius)
    if h <= 0 or w <= 0:
        raise ValueError(
            f"robot radius {robot_radius} leaves no room for obstacles at size {size}"
        )
    obstacles = []
    for r in range(rows):
        offset = (pitch / 2) if r % 2 else 0.0
        cy = (r + 0.5) * band
        for c in range(cols):
            cx = offset + (c + 0.5) * pitch
            if cx + w / 2 >= size:  # staggered block would stick out; wrap it off
                continue
            jw = min(w * rng.uniform(0.9, 1.1), pitch - 2.2 * robot_radius)
            jh = min(h * rng.uniform(0.9, 1.1), band - 2.2 * robot_radius)
            obstacles.append(_rect(cx, cy, jw, jh))
    return obstacles


def _triangles(size: float, density: float, robot_radius: float, rng: Random) -> list[Polygon]:
    r_mean = size * 0.06
    margin = 1.3 * r_mean + 2.0 * robot_radius
    if 2 * margin >= size:
        raise ValueError(f"size {size} too small for triangles with robot radius {robot_radius}")
    # Expected triangle area ~ 1.3 * r_mean^2 for the radius range below.
    count = max(1, round(density * size * size / (1.3 * r_mean * r_mean)))
    obstacles = []
    attempts = 0
    while len(obstacles) < count and attempts < 50 * count:
        attempts += 1
        cx = rng.uniform(margin, size - margin)
        cy = rng.uniform(margin, size - margin)
        angles = sorted(rng.uniform(0.0, 2.0 * math.pi) for _ in range(3))
        radii = [r_mean * rng.uniform(0.55, 1.25) for _ in range(3)]
        verts = [
            (cx + radii[m] * math.cos(angles[m]), cy + radii[m] * math.sin(angles[m]))
            for m in range(3)
        ]
        try:
            obstacles.append(Polygon(verts))
        except ValueError:  # degenerate (collinear) draw; sample again
            continue
    return obstacles


_BUILDERS = {
    "dense-grid": _dense_grid,
    "v-dense": _v_dense,
    "triangles": _triangles,
}


def generate_map(
    kind: str,
    size: float,
    density: float,
    seed: int,
    robot_radius: float = 5.0,
    resolution: float | None = None,
    max_retries: int = 20,
) -> Workspace:
    """Build a connected square workspace of one of the layout families.

    ``resolution`` is the flood-fill cell size used for the connectivity
    check; it defaults to ``max(robot_radius / 2, size / 256)`` — fine
    enough to see lanes barely wider than the robot.  When the first
    layout is disconnected, up to ``max_retries`` further layouts are
    tried on perturbed seeds (``seed + attempt * 1000003``).  Scattered
    layouts that trap a few pockets are repaired by deleting the
    offending obstacles instead of being thrown away, as long as the
    repair stays small (at most a quarter of the obstacles).
    """
    if kind not in _BUILDERS:
        raise ValueError(f"unknown map kind {kind!r}; expected one of {', '.join(MAP_KINDS)}")
    if not 0.0 <= density < 1.0:
        raise ValueError(f"density must be in [0, 1), got {density}")
    if size <= 0:
        raise ValueError(f"size must be positive, got {size}")
    if resolution is None:
        resolution = max(robot_radius / 2.0, size / 256.0)
    bounds = (0.0, 0.0, float(size), float(size))
    if density == 0.0:
        return Workspace(bounds, [], robot_radius)
    last_error: Exception | None = None
    for attempt in range(max_retries):
        rng = Random(seed + attempt * _RETRY_STRIDE)
        try:
            obstacles = _BUILDERS[kind](size, density, robot_radius, rng)
            workspace = Workspace(bounds, obstacles, robot_radius)
        except ValueError as exc:
            last_error = exc
            continue
        if free_space_connected(workspace, resolution):
            return workspace
        if kind == "triangles" and obstacles:
            carved, removed = _carve_until_connected(bounds, obstacles, robot_radius, resolution)
            if removed <= max(1, len(obstacles) // 4):
                return carved
    detail = f"; last error: {last_error}" if last_error is not None else ""
    raise MapGenerationError(
        f"no connected {kind} layout at density {density} within {max_retries} attempts{detail}"
    )


def sample_free_targets(
    workspace: Workspace,
    count: int,
    seed: int,
    min_separation: float | None = None,
) -> list[tuple[float, float]]:
    """Draw `count` collision-free targets, pairwise at least `min_separation` apart.

    Separation defaults to four robot radii.  Rejection sampling; raises
    :class:`MapGenerationError` when the workspace is too crowded to place
    them all.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if min_separation is None:
        min_separation = 4.0 * workspace.robot_radius
    rng = Random(seed)
    xmin, ymin, xmax, ymax = workspace.bounds
    targets: list[tuple[float, float]] = []
    attempts = 0
    budget = 4000 * count
    while len(targets) < count and attempts < budget:
        attempts += 1
        x = rng.uniform(xmin, xmax)
        y = rng.uniform(ymin, ymax)
        if not point_free(workspace, Configuration(x, y)):
            continue
        if any(math.hypot(x - tx, y - ty) < min_separation for tx, ty in targets):
            continue
        targets.append((x, y))
    if len(targets) < count:
        raise MapGenerationError(
            f"placed only {len(targets)}/{count} targets after {budget} samples; "
            "the workspace is too crowded"
        )
    return targets
