"""Map generators: determinism, connectivity, degenerate densities."""
import math

import pytest

from forestplan import (
    MapGenerationError,
    Polygon,
    Workspace,
    free_space_connected,
    generate_map,
    sample_free_targets,
)
from forestplan.geometry import Configuration, point_free


@pytest.mark.parametrize("kind", ["dense-grid", "v-dense", "triangles"])
def test_generators_are_deterministic(kind):
    a = generate_map(kind, size=150, density=0.15, seed=5, robot_radius=3.0)
    b = generate_map(kind, size=150, density=0.15, seed=5, robot_radius=3.0)
    assert a.to_dict() == b.to_dict()
    c = generate_map(kind, size=150, density=0.15, seed=6, robot_radius=3.0)
    assert c.to_dict() != a.to_dict()


@pytest.mark.parametrize("kind", ["dense-grid", "v-dense", "triangles"])
def test_generated_maps_are_connected(kind):
    ws = generate_map(kind, size=150, density=0.18, seed=2, robot_radius=3.0)
    assert len(ws.obstacles) > 0
    # the guarantee holds at the generator's own check resolution
    assert free_space_connected(ws, resolution=1.5)


def test_zero_density_is_an_empty_workspace():
    ws = generate_map("triangles", size=100, density=0.0, seed=1, robot_radius=3.0)
    assert not ws.obstacles
    assert ws.bounds == (0.0, 0.0, 100.0, 100.0)


def test_density_scales_obstacle_area():
    def covered(ws):
        return sum(_polygon_area(p) for p in ws.obstacles)

    sparse = generate_map("dense-grid", size=200, density=0.1, seed=3, robot_radius=3.0)
    dense = generate_map("dense-grid", size=200, density=0.3, seed=3, robot_radius=3.0)
    assert covered(dense) > 2 * covered(sparse)
    # and the requested fraction is roughly hit
    assert covered(dense) / 200**2 == pytest.approx(0.3, rel=0.2)


def _polygon_area(poly: Polygon) -> float:
    pts = poly.to_list()
    s = 0.0
    for (x1, y1), (x2, y2) in zip(pts, pts[1:] + pts[:1]):
        s += x1 * y2 - x2 * y1
    return abs(s) / 2


def test_invalid_arguments():
    with pytest.raises(ValueError):
        generate_map("maze", size=100, density=0.1, seed=0)
    with pytest.raises(ValueError):
        generate_map("dense-grid", size=100, density=1.2, seed=0)
    with pytest.raises(ValueError):
        generate_map("dense-grid", size=-5, density=0.1, seed=0)


def test_impossible_density_raises_after_retries():
    with pytest.raises(MapGenerationError):
        generate_map("dense-grid", size=100, density=0.9, seed=0, robot_radius=5.0,
                     max_retries=3)


def test_flood_fill_spots_a_disconnecting_wall():
    wall = Polygon([(48, 0), (52, 0), (52, 100), (48, 100)])
    ws = Workspace((0, 0, 100, 100), [wall], robot_radius=3.0)
    assert not free_space_connected(ws, resolution=2.5)
    gap = Polygon([(48, 0), (52, 0), (52, 60), (48, 60)])  # opening at the top
    ws2 = Workspace((0, 0, 100, 100), [gap], robot_radius=3.0)
    assert free_space_connected(ws2, resolution=2.5)


class TestSampleTargets:
    def test_targets_are_free_and_separated(self):
        ws = generate_map("triangles", size=150, density=0.15, seed=4, robot_radius=3.0)
        targets = sample_free_targets(ws, 6, seed=8)
        assert len(targets) == 6
        for x, y in targets:
            assert point_free(ws, Configuration(x, y))
        for i, a in enumerate(targets):
            for b in targets[i + 1:]:
                assert math.dist(a, b) >= 4 * ws.robot_radius

    def test_deterministic(self):
        ws = generate_map("dense-grid", size=150, density=0.15, seed=4, robot_radius=3.0)
        assert sample_free_targets(ws, 5, seed=1) == sample_free_targets(ws, 5, seed=1)

    def test_impossible_request_raises(self):
        ws = Workspace((0, 0, 30, 30), [], robot_radius=3.0)
        with pytest.raises(MapGenerationError):
            sample_free_targets(ws, 50, seed=0, min_separation=20.0)
