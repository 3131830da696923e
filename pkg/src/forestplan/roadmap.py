"""Roadmap extraction and target-to-target shortest paths.

The forest (or a merged RRT forest) becomes one undirected weighted graph:
every parent-child tree edge plus every virtual edge, weighted by the
Euclidean distance of its endpoints.  Target roots are vertices of that
graph, so shortest paths between targets come straight out of Dijkstra —
no smoothing or post-processing is applied to keep costs comparable
between planners.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .geometry import Configuration, distance


@dataclass
class RoadmapGraph:
    """Undirected weighted graph over planner nodes.

    `configs[i]` is vertex i's configuration; `adjacency[i]` lists
    (neighbour, weight) pairs sorted by neighbour id; `roots` are the vertex
    ids of the planner targets in target order.
    """

    configs: list[Configuration]
    adjacency: list[list[tuple[int, float]]]
    roots: list[int]

    @property
    def n_vertices(self) -> int:
        return len(self.configs)

    @property
    def n_edges(self) -> int:
        return sum(len(a) for a in self.adjacency) // 2


@dataclass
class DistanceMatrix:
    """All-pairs target distances plus the Dijkstra predecessor trees.

    `costs[i, j]` is the roadmap shortest-path length from target i to
    target j (symmetric, zero diagonal, +inf when unreachable).
    `predecessors[i][v]` is v's predecessor on the shortest path from
    target i, -1 for the source itself and for unreached vertices.
    """

    costs: np.ndarray
    predecessors: list[np.ndarray]
    roots: list[int]


def build_graph(forest) -> RoadmapGraph:
    """Collect tree edges and virtual edges of a planner result into a graph.

    Works for any planner state exposing `nodes` (with id/config/parent/tree)
    and `virtual_edges`; node ids must be dense 0..N-1.
    """
    nodes = forest.nodes
    configs = [n.config for n in nodes]
    adjacency: list[list[tuple[int, float]]] = [[] for _ in nodes]

    def add_edge(u: int, v: int) -> None:
        w = distance(configs[u], configs[v])
        adjacency[u].append((v, w))
        adjacency[v].append((u, w))

    for n in nodes:
        if n.parent is not None:
            add_edge(n.parent, n.id)
    for e in forest.virtual_edges:
        add_edge(e.a, e.b)
    for lst in adjacency:
        lst.sort()
    roots = [i for i in range(len(forest.targets))]
    return RoadmapGraph(configs=configs, adjacency=adjacency, roots=roots)


def dijkstra(graph: RoadmapGraph, source: int) -> tuple[np.ndarray, np.ndarray]:
    """Shortest distances and predecessors from one vertex to all vertices."""
    nv = graph.n_vertices
    dist = np.full(nv, math.inf)
    pred = np.full(nv, -1, dtype=np.int64)
    dist[source] = 0.0
    heap = [(0.0, source)]
    done = np.zeros(nv, dtype=bool)
    adjacency = graph.adjacency
    while heap:
        d, u = heapq.heappop(heap)
        if done[u]:
            continue
        done[u] = True
        for v, w in adjacency[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = u
                heapq.heappush(heap, (nd, v))
    return dist, pred


def all_target_distances(graph: RoadmapGraph) -> DistanceMatrix:
    """Dijkstra from every target root.

    The cost matrix is made exactly symmetric by mirroring the run from the
    smaller-indexed source onto both triangles (the two directed runs agree
    up to floating-point rounding; one value is picked so downstream
    symmetry checks can be exact).
    """
    n = len(graph.roots)
    costs = np.zeros((n, n))
    preds: list[np.ndarray] = []
    dists = []
    for i, root in enumerate(graph.roots):
        dist, pred = dijkstra(graph, root)
        dists.append(dist)
        preds.append(pred)
    for i in range(n):
        for j in range(i + 1, n):
            value = float(dists[i][graph.roots[j]])
            costs[i, j] = value
            costs[j, i] = value
    return DistanceMatrix(costs=costs, predecessors=preds, roots=list(graph.roots))


def extract_path(graph: RoadmapGraph, matrix: DistanceMatrix, i: int, j: int) -> list[Configuration]:
    """Configurations along the shortest path from target i to target j."""
    n = len(matrix.roots)
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError(f"target index out of range: ({i}, {j})")
    src = matrix.roots[i]
    dst = matrix.roots[j]
    if i == j:
        return [graph.configs[src]]
    if math.isinf(matrix.costs[i, j]):
        raise ValueError(f"targets {i} and {j} are not connected in the roadmap")
    pred = matrix.predecessors[i]
    path = [dst]
    v = dst
    while v != src:
        v = int(pred[v])
        if v < 0:
            raise ValueError(f"broken predecessor chain from {i} to {j}")
        path.append(v)
    path.reverse()
    return [graph.configs[v] for v in path]


def path_length(path: list[Configuration]) -> float:
    return sum(distance(a, b) for a, b in zip(path, path[1:]))


def cumulative_cost(matrix: DistanceMatrix) -> float:
    """Sum of shortest-path costs over all unordered target pairs."""
    n = matrix.costs.shape[0]
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            value = matrix.costs[i, j]
            if math.isinf(value):
                raise ValueError(f"targets {i} and {j} are unreachable; cumulative cost undefined")
            total += value
    return float(total)
