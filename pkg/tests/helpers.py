"""Independent oracles shared by the unit and acceptance tests.

Everything here is deliberately written the slow, obvious way (linear
scans, permutation enumeration, textbook Floyd–Warshall) so the fast
implementations can be checked against it.
"""
from __future__ import annotations

from itertools import permutations

import numpy as np

from forestplan import distance, tour_cost
from forestplan.tsp import canonical_sequence


def recomputed_costs(nodes) -> list[float]:
    """Root-down parent-chain costs recomputed from configurations alone."""
    costs: dict[int, float] = {}

    def cost_of(i: int) -> float:
        if i in costs:
            return costs[i]
        node = nodes[i]
        if node.parent is None:
            value = 0.0
        else:
            value = cost_of(node.parent) + distance(nodes[node.parent].config, node.config)
        costs[i] = value
        return value

    return [cost_of(n.id) for n in nodes]


def max_relative_cost_error(nodes) -> float:
    expected = recomputed_costs(nodes)
    worst = 0.0
    for node, want in zip(nodes, expected):
        err = abs(node.cost - want) / max(want, 1e-12)
        worst = max(worst, err)
    return worst


def self_growth_violations(forest) -> int:
    """Post-hoc linear scan of the outward-growth acceptance rule.

    A node added from expansion source `s` must be strictly closer to `s`
    than to every other node of its tree that existed at insertion time
    (node ids are global and increasing, so "existed" = smaller id).
    """
    violations = 0
    by_tree: dict[int, list] = {}
    for node in forest.nodes:
        by_tree.setdefault(node.tree, []).append(node)
    for members in by_tree.values():
        for v in members:
            if v.source is None:
                continue
            src = forest.nodes[v.source]
            d_src = _d2(v.config.x, v.config.y, src.config.x, src.config.y)
            for u in members:
                if u.id >= v.id or u.id == v.source:
                    continue
                if _d2(v.config.x, v.config.y, u.config.x, u.config.y) <= d_src:
                    violations += 1
    return violations


def _d2(ax: float, ay: float, bx: float, by: float) -> float:
    # plain products, not **2: pow() may round the last ulp differently
    dx = ax - bx
    dy = ay - by
    return dx * dx + dy * dy


def linear_scan_k_nearest(points: dict[int, tuple[float, float]], x: float, y: float, k: int):
    """(squared distance, id) pairs of the k nearest stored points."""
    ranked = sorted((_d2(px, py, x, y), i) for i, (px, py) in points.items())
    return ranked[:k]


def floyd_warshall(weights: np.ndarray) -> np.ndarray:
    """All-pairs shortest paths; `weights` uses inf for missing edges."""
    d = weights.astype(float).copy()
    np.fill_diagonal(d, 0.0)
    n = d.shape[0]
    for k in range(n):
        d = np.minimum(d, d[:, k, None] + d[None, k, :])
    return d


def brute_force_tours(matrix: np.ndarray) -> tuple[float, set[tuple[int, ...]]]:
    """Optimal cycle cost and the set of optimal tours in canonical form."""
    n = matrix.shape[0]
    best = float("inf")
    winners: set[tuple[int, ...]] = set()
    for perm in permutations(range(1, n)):
        seq = [0, *perm]
        cost = tour_cost(matrix, seq)
        if cost < best - 1e-12:
            best = cost
            winners = {canonical_sequence(seq)}
        elif abs(cost - best) <= 1e-12:
            winners.add(canonical_sequence(seq))
    return best, winners
