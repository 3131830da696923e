"""Release acceptance checks, one test per criterion.

Each test below is a self-contained pass/fail gate over the whole
toolkit: reproducibility of the benchmark harness, internal invariants
of the forest planner audited on every iteration, exact agreement of
the fast data structures with brute-force oracles, and the statistical
claims about solution quality and iteration budgets.  The heavier
shared workloads (a dense-grid scenario swept over fifty seeds, a pool
of twenty audited runs) are produced once in module-scoped fixtures.

Everything is seeded, so the whole file is deterministic; the slowest
fixture takes a few minutes.
"""
from __future__ import annotations

import math
import random
import statistics
from collections import Counter

import numpy as np
import pytest
from scipy import stats as scipy_stats

from forestplan import (
    Configuration,
    LazyTSP,
    MultiTreeRRT,
    PlannerParams,
    SpaceFillingForest,
    Workspace,
    generate_map,
    held_karp,
    plan,
    sample_free_targets,
    tour_cost,
    welch_t_test,
)
from forestplan.cli import main
from forestplan.nn import SpatialIndex
from forestplan.roadmap import RoadmapGraph, dijkstra
from forestplan.tsp import canonical_sequence
from helpers import (
    brute_force_tours,
    floyd_warshall,
    linear_scan_k_nearest,
    max_relative_cost_error,
    self_growth_violations,
)

GRID_SEEDS = 50
GRID_TARGETS = 10
SAMPLES = 10


# ---------------------------------------------------------------------------
# shared workloads


@pytest.fixture(scope="module")
def grid_pool():
    """Dense-grid scenario, ten targets, fifty seeds of every planner family."""
    ws = generate_map("dense-grid", size=200.0, density=0.2, seed=11, robot_radius=5.0)
    targets = sample_free_targets(ws, GRID_TARGETS, seed=12)
    pool = {"workspace": ws, "targets": targets,
            "sff": [], "nr": [], "mtr": [], "mtr20": [], "lazy": []}
    for seed in range(GRID_SEEDS):
        pool["sff"].append(
            SpaceFillingForest(ws, step=12.0, connect_radius=24.0, samples=SAMPLES,
                               queue_bias=0.95, max_iterations=1200,
                               check_points=3, random_state=seed).fit(targets))
        pool["nr"].append(
            SpaceFillingForest(ws, step=12.0, connect_radius=24.0, samples=SAMPLES,
                               queue_bias=0.95, max_iterations=1200, rewire=False,
                               check_points=3, random_state=seed).fit(targets))
        pool["mtr"].append(
            MultiTreeRRT(ws, step=12.0, connect_radius=24.0, max_iterations=8000,
                         check_points=3, restarts=1, random_state=seed).fit(targets))
        pool["mtr20"].append(
            MultiTreeRRT(ws, step=12.0, connect_radius=24.0, max_iterations=8000,
                         check_points=3, restarts=20, random_state=seed).fit(targets))
        pool["lazy"].append(
            LazyTSP(ws, step=12.0, connect_radius=24.0, samples=SAMPLES,
                    max_iterations=3000, check_points=3, random_state=seed).fit(targets))
    return pool


@pytest.fixture(scope="module")
def audited_pool():
    """Twenty varied scenarios (five targets, 500 iterations) with the
    parent-chain costs re-derived from scratch after every iteration."""
    kinds = ("dense-grid", "v-dense", "triangles", None)
    runs = []
    for i in range(20):
        kind = kinds[i % len(kinds)]
        if kind is None:
            ws = Workspace((0, 0, 120, 120), [], robot_radius=3.0)
        else:
            ws = generate_map(kind, size=120.0, density=0.10 + 0.02 * (i % 4),
                              seed=100 + i, robot_radius=3.0)
        targets = sample_free_targets(ws, 5, seed=200 + i)
        peak = 0.0

        def hook(forest):
            nonlocal peak
            peak = max(peak, max_relative_cost_error(forest.nodes))

        params = PlannerParams(step=8.0, connect_radius=16.0, samples=SAMPLES,
                               queue_bias=0.95, max_iterations=500,
                               check_points=3, seed=i)
        runs.append((plan(ws, targets, params, iteration_hook=hook), peak))
    return runs


# ---------------------------------------------------------------------------
# criteria


def test_criterion_01_benchmark_reruns_are_byte_identical(tmp_path):
    scenario = tmp_path / "scenario.json"
    assert main(["genmap", "--kind", "dense-grid", "--size", "140", "--density",
                 "0.15", "--seed", "7", "--targets", "4", "--robot-radius", "4",
                 "--l", "9", "--imax", "1500", "--bench-seeds", "3",
                 "--out", str(scenario)]) == 0
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    assert main(["bench", str(scenario), "--out-dir", str(out_a)]) == 0
    assert main(["bench", str(scenario), "--out-dir", str(out_b)]) == 0
    names = sorted(p.name for p in out_a.iterdir())
    assert names == sorted(p.name for p in out_b.iterdir())
    assert any(n.endswith(".json") for n in names) and any(n.endswith(".csv") for n in names)
    for name in names:
        assert (out_a / name).read_bytes() == (out_b / name).read_bytes(), name


def test_criterion_02_costs_stay_coherent_and_rewiring_never_hurts(audited_pool):
    worst = max(peak for _, peak in audited_pool)
    assert worst <= 1e-9, f"worst relative cost drift {worst:.3e}"
    assert sum(f.rewire_count for f, _ in audited_pool) > 0
    assert sum(f.rewire_cost_increases for f, _ in audited_pool) == 0


def test_criterion_03_every_accepted_sample_grew_outward(audited_pool):
    violations = sum(self_growth_violations(forest) for forest, _ in audited_pool)
    assert violations == 0


def test_criterion_04_fast_structures_match_brute_force_oracles():
    # neighbour index against a linear scan, one thousand queries
    rng = random.Random(42)
    index, table = SpatialIndex(), {}
    for i in range(400):
        x, y = rng.uniform(-50, 50), rng.uniform(-50, 50)
        index.insert(i, x, y)
        table[i] = (x, y)
    for _ in range(1000):
        qx, qy = rng.uniform(-60, 60), rng.uniform(-60, 60)
        k = rng.randint(1, 15)
        scan = linear_scan_k_nearest(table, qx, qy, k)
        assert index.k_nearest(qx, qy, k) == scan
        assert index.nearest(qx, qy) == (scan[0][1], scan[0][0])

    # shortest paths against Floyd-Warshall on fifty graphs; integer edge
    # weights keep every float sum exact, so agreement must be to the bit
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(2, 200)
        graph, weights = _random_graph(n, rng)
        want = floyd_warshall(weights)
        for source in range(0, n, max(1, n // 5)):
            got, _ = dijkstra(graph, source)
            assert got.tolist() == want[source].tolist()

    # exact tour solver against permutation enumeration, integer costs
    rng = random.Random(13)
    for _ in range(50):
        n = rng.randint(2, 8)
        matrix = _random_integer_costs(n, rng)
        tour = held_karp(matrix)
        best, winners = brute_force_tours(matrix)
        assert tour.cost == best
        assert canonical_sequence(tour.sequence) in winners


def test_criterion_05_rewiring_pulls_roadmap_paths_toward_straight_lines():
    ws = Workspace((0, 0, 100, 100), [], robot_radius=2.0)
    a, b = (15.0, 20.0), (85.0, 75.0)
    euclid = math.hypot(a[0] - b[0], a[1] - b[1])
    rewired, frozen = [], []
    for seed in range(20):
        common = dict(step=5.0, connect_radius=10.0, samples=SAMPLES,
                      queue_bias=0.95, max_iterations=900, check_points=3,
                      random_state=seed)
        rewired.append(float(
            SpaceFillingForest(ws, **common).fit([a, b]).cost_matrix_[0, 1]))
        frozen.append(float(
            SpaceFillingForest(ws, rewire=False, **common).fit([a, b]).cost_matrix_[0, 1]))
    mean_rewired = statistics.mean(rewired)
    assert mean_rewired <= 1.05 * euclid, f"{mean_rewired:.2f} vs euclid {euclid:.2f}"
    result = welch_t_test(frozen, rewired)
    assert statistics.mean(frozen) > mean_rewired and result.different


def test_criterion_06_rewired_forest_beats_every_baseline_on_cumulative_cost(grid_pool):
    costs = {name: [est.cumulative_cost_ for est in grid_pool[name]]
             for name in ("sff", "nr", "mtr", "mtr20")}
    sff = costs["sff"]
    for name in ("nr", "mtr", "mtr20"):
        other = costs[name]
        result = welch_t_test(sff, other)
        assert statistics.mean(sff) < statistics.mean(other), name
        assert result.different, f"{name}: p={result.p_value:.3g}"


def test_criterion_07_single_query_replanning_needs_more_iterations(grid_pool):
    lazy_iters = [est.iterations_ for est in grid_pool["lazy"]]
    forest_iters = [est.forest_.iterations_to_single_component for est in grid_pool["sff"]]
    assert all(v is not None for v in forest_iters)
    ratio = statistics.mean(lazy_iters) / statistics.mean(forest_iters)
    result = welch_t_test(lazy_iters, forest_iters)
    assert ratio > 1.0 and result.different
    print(f"measured iteration ratio (tour-of-single-queries / forest): {ratio:.2f}")


def test_criterion_08_point_checks_per_iteration_are_bounded_and_linear_in_targets(grid_pool):
    bound = 3 * (SAMPLES + GRID_TARGETS)  # check_points * (samples + targets)
    for est in grid_pool["sff"] + grid_pool["nr"]:
        assert max(est.forest_.checks_expand_connect) <= bound
    ws = grid_pool["workspace"]
    counts, means = [5, 10, 20], []
    for n in counts:
        targets = sample_free_targets(ws, n, seed=12)
        per_seed = []
        for seed in range(12):
            # larger budget than the pool runs: twenty trees need more
            # iterations before every pair is connected
            est = SpaceFillingForest(ws, step=12.0, connect_radius=24.0,
                                     samples=SAMPLES, queue_bias=0.95,
                                     max_iterations=2400, check_points=3,
                                     random_state=seed).fit(targets)
            checks = est.forest_.checks_expand_connect
            per_seed.append(sum(checks) / len(checks))
        means.append(statistics.mean(per_seed))
    fit = scipy_stats.linregress(counts, means)
    assert fit.rvalue ** 2 >= 0.99, f"R^2 {fit.rvalue ** 2:.5f} over means {means}"


def test_criterion_09_merging_links_once_but_the_forest_links_richly(grid_pool):
    for est in grid_pool["mtr"]:
        forest = est.forest_
        want = len(forest.targets) - 1
        assert forest.path_record_events == len(forest.recorded_paths) == want
        assert all(a < b for a, b in forest.recorded_paths)
    seeds_with_double_link = 0
    for est in grid_pool["sff"]:
        forest = est.forest_
        per_pair = Counter()
        for edge in forest.virtual_edges:
            ta, tb = forest.nodes[edge.a].tree, forest.nodes[edge.b].tree
            per_pair[(min(ta, tb), max(ta, tb))] += 1
        if any(count >= 2 for count in per_pair.values()):
            seeds_with_double_link += 1
    assert seeds_with_double_link >= 0.8 * GRID_SEEDS


def test_criterion_10_tour_costs_are_invariant_under_symmetry_and_scale():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(2, 8)
        matrix = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                matrix[i, j] = matrix[j, i] = rng.uniform(1.0, 100.0)
        best, winners = brute_force_tours(matrix)
        tour = held_karp(matrix)
        assert canonical_sequence(tour.sequence) in winners
        assert abs(tour.cost - best) <= 1e-9
        # the cycle cost ignores where the tour starts and which way it runs
        seq = list(tour.sequence)
        shift = rng.randrange(n)
        rotated = seq[shift:] + seq[:shift]
        assert abs(tour_cost(matrix, rotated) - tour.cost) <= 1e-9
        assert abs(tour_cost(matrix, seq[::-1]) - tour.cost) <= 1e-9
        # scaling by powers of two is float-exact, so the optimum set and
        # the solver's answer must carry over without any tolerance
        for scale in (0.5, 4.0):
            scaled_best, scaled_winners = brute_force_tours(matrix * scale)
            assert scaled_winners == winners
            assert scaled_best == best * scale
            assert held_karp(matrix * scale).cost == tour.cost * scale


# ---------------------------------------------------------------------------
# oracles local to criterion 4


def _random_graph(n: int, rng: random.Random) -> tuple[RoadmapGraph, np.ndarray]:
    """Connected undirected graph with small integer weights."""
    configs = [Configuration(float(i), 0.0) for i in range(n)]
    adjacency: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    weights = np.full((n, n), math.inf)

    def add(u: int, v: int, w: int) -> None:
        if u == v or math.isfinite(weights[u, v]):
            return
        weights[u, v] = weights[v, u] = float(w)
        adjacency[u].append((v, float(w)))
        adjacency[v].append((u, float(w)))

    order = list(range(n))
    rng.shuffle(order)
    for a, b in zip(order, order[1:]):
        add(a, b, rng.randint(1, 1000))
    for _ in range(2 * n):
        add(rng.randrange(n), rng.randrange(n), rng.randint(1, 1000))
    adjacency = [sorted(nbrs) for nbrs in adjacency]
    return RoadmapGraph(configs=configs, adjacency=adjacency,
                        roots=list(range(min(n, 4)))), weights


def _random_integer_costs(n: int, rng: random.Random) -> np.ndarray:
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            matrix[i, j] = matrix[j, i] = float(rng.randint(1, 100))
    return matrix
