"""Baseline planners the forest planner is measured against.

* `multi_t_rrt` — one RRT per target grown round-robin; trees that come
  within connection range over a free segment are merged into a single tree
  (the opposite of the forest planner's virtual edges).  The root-to-root
  trajectory frozen at merge time is recorded once per merged pair.
* `rrt_star` — a single start-to-goal RRT* query, used as the verification
  engine of the lazy tour pipeline.
* `lazy_tsp` — solves the tour on straight-line costs first and only plans
  the point-to-point paths the current tour actually uses, re-solving with
  the true costs until the tour is fully verified.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field, replace

import numpy as np

from .geometry import (
    CollisionMeter,
    Configuration,
    Workspace,
    check_targets,
    distance,
    point_free,
)
from .forest import Node, PlannerParams
from .nn import SpatialIndex
from .tsp import Tour, _min_cost_cycle, heuristic_tour
from .unionfind import UnionFind


class PlanningFailure(RuntimeError):
    """A planner could not produce a usable result within its budget."""


class MergeForest:
    """State of the merging multi-tree RRT.

    Tree labels are the original target indices; when two trees merge, the
    combined tree keeps the smaller label (which is also the id of its root
    node).  `recorded_paths` maps a merged label pair to the root-to-root
    trajectory captured at merge time — at most one per pair, ever.
    `virtual_edges` stays empty and exists so roadmap extraction can treat
    this like any other planner state.

    Randomness: one `random.Random(seed)` stream; each iteration draws the
    sample abscissa then the ordinate.
    """

    def __init__(self, workspace: Workspace, targets, params: PlannerParams):
        self.workspace = workspace
        self.targets = check_targets(workspace, targets)
        self.params = params
        n = len(self.targets)
        self.nodes: list[Node] = []
        self.virtual_edges: list = []
        self.recorded_paths: dict[tuple[int, int], list[Configuration]] = {}
        self.path_record_events = 0  # total recordings, to observe the once-per-pair rule
        self._indices: dict[int, SpatialIndex] = {}
        self._tree_nodes: dict[int, list[int]] = {}
        self._live: list[int] = list(range(n))
        self._cursor = 0
        self.components = UnionFind(n)
        self._rng = random.Random(params.seed)
        self.meter = CollisionMeter(workspace, params.check_points)
        self.iterations_used = 0
        for i, t in enumerate(self.targets):
            node = Node(i, i, t, None, 0.0, 0.0, None)
            self.nodes.append(node)
            idx = SpatialIndex()
            idx.insert(i, t.x, t.y)
            self._indices[i] = idx
            self._tree_nodes[i] = [i]

    @property
    def n_live_trees(self) -> int:
        return len(self._live)

    def live_labels(self) -> list[int]:
        return list(self._live)

    def merged(self) -> bool:
        return len(self._live) == 1

    def _chain_to_root(self, nid: int) -> list[int]:
        ids = [nid]
        while self.nodes[ids[-1]].parent is not None:
            ids.append(self.nodes[ids[-1]].parent)
        return ids

    def _extend(self, tree: int, x: float, y: float) -> int | None:
        """One RRT extension of `tree` toward (x, y); returns the new node id."""
        nid, d2 = self._indices[tree].nearest(x, y)
        if d2 == 0.0:
            return None  # sample fell exactly on an existing node
        near = self.nodes[nid]
        dist = math.sqrt(d2)
        step = self.params.step
        if dist <= step:
            cand = Configuration(x, y)
        else:
            f = step / dist
            cand = Configuration(near.config.x + (x - near.config.x) * f,
                                 near.config.y + (y - near.config.y) * f)
        if not self.meter.segment_free(near.config, cand):
            return None
        new_id = len(self.nodes)
        edge = distance(near.config, cand)
        node = Node(new_id, tree, cand, nid, near.cost + edge, edge, nid)
        self.nodes.append(node)
        near.children.add(new_id)
        self._indices[tree].insert(new_id, cand.x, cand.y)
        self._tree_nodes[tree].append(new_id)
        return new_id

    def _merge(self, tree: int, new_id: int, other: int, fid: int) -> int:
        """Merge `other` into `tree` through nodes new_id/fid; returns the surviving label."""
        root_a = tree   # labels equal their root node ids
        root_b = other
        chain_a = self._chain_to_root(new_id)
        chain_b = self._chain_to_root(fid)
        path = [self.nodes[k].config for k in reversed(chain_a)]
        path += [self.nodes[k].config for k in chain_b]
        pair = (min(root_a, root_b), max(root_a, root_b))
        # merging makes the pair one component, so a second path can never be recorded
        assert pair not in self.recorded_paths, f"second path recorded for pair {pair}"
        self.recorded_paths[pair] = path
        self.path_record_events += 1

        survivor, absorbed = (tree, other) if tree < other else (other, tree)
        if survivor == tree:
            hang_ids, attach_to = chain_b, new_id
        else:
            hang_ids, attach_to = chain_a, fid
        # flip the parent chain of the absorbed tree so it hangs off the survivor
        for a, b in zip(hang_ids, hang_ids[1:]):
            self.nodes[b].parent = a
        self.nodes[hang_ids[0]].parent = attach_to
        self.nodes[attach_to].children.add(hang_ids[0])

        moved = self._tree_nodes.pop(absorbed)
        survivor_index = self._indices[survivor]
        for nid in moved:
            node = self.nodes[nid]
            node.tree = survivor
            survivor_index.insert(nid, node.config.x, node.config.y)
        del self._indices[absorbed]
        self._tree_nodes[survivor].extend(moved)

        # rebuild children and costs of the combined tree from the parent links
        ids = self._tree_nodes[survivor]
        for nid in ids:
            self.nodes[nid].children.clear()
        for nid in ids:
            p = self.nodes[nid].parent
            if p is not None:
                self.nodes[p].children.add(nid)
        stack = [survivor]
        while stack:
            nid = stack.pop()
            node = self.nodes[nid]
            if node.parent is None:
                node.cost = 0.0
                node.edge_len = 0.0
            else:
                node.edge_len = distance(self.nodes[node.parent].config, node.config)
                node.cost = self.nodes[node.parent].cost + node.edge_len
            stack.extend(node.children)

        self.components.union(survivor, absorbed)
        pos = self._live.index(absorbed)
        self._live.pop(pos)
        if pos < self._cursor:
            self._cursor -= 1
        return survivor

    def run(self) -> "MergeForest":
        params = self.params
        xmin, ymin, xmax, ymax = self.workspace.bounds
        limit_sq = params.connect_radius * params.connect_radius
        while self.iterations_used < params.max_iterations and len(self._live) > 1:
            self.iterations_used += 1
            self._cursor %= len(self._live)
            tree = self._live[self._cursor]
            self._cursor += 1
            x = self._rng.uniform(xmin, xmax)
            y = self._rng.uniform(ymin, ymax)
            new_id = self._extend(tree, x, y)
            if new_id is None:
                continue
            new = self.nodes[new_id]
            for other in [t for t in self._live if t != tree]:
                if other not in self._tree_nodes:
                    continue
                fid, d2 = self._indices[other].nearest(new.config.x, new.config.y)
                if d2 < limit_sq and self.meter.segment_free(new.config, self.nodes[fid].config):
                    tree = self._merge(tree, new_id, other, fid)
        return self


def multi_t_rrt(workspace: Workspace, targets, params: PlannerParams) -> MergeForest:
    """Grow one RRT per target round-robin, merging trees until one remains
    (or the iteration budget runs out)."""
    return MergeForest(workspace, targets, params).run()


@dataclass
class PathResult:
    """Outcome of a single start-to-goal query."""

    path: list[Configuration] | None
    cost: float
    iterations: int
    point_checks: int

    @property
    def found(self) -> bool:
        return self.path is not None


def rrt_star(workspace: Workspace, start: Configuration, goal: Configuration,
             params: PlannerParams) -> PathResult:
    """Plan start → goal with RRT* (step extension, best-parent choice and
    rewiring over the `samples` nearest neighbours).

    Returns as soon as a node connects to the goal (within `connect_radius`
    over a free segment) — the verification workload cares about how fast a
    path is found, not about polishing it afterwards.  `iterations` counts
    loop passes actually spent.
    """
    if not isinstance(start, Configuration):
        start = Configuration(*start)
    if not isinstance(goal, Configuration):
        goal = Configuration(*goal)
    if not point_free(workspace, start):
        raise ValueError(f"start {start.as_tuple()} is in collision")
    if not point_free(workspace, goal):
        raise ValueError(f"goal {goal.as_tuple()} is in collision")
    meter = CollisionMeter(workspace, params.check_points)
    rng = random.Random(params.seed)
    limit_sq = params.connect_radius * params.connect_radius
    step = params.step

    gd = distance(start, goal)
    if gd * gd < limit_sq and meter.segment_free(start, goal):
        return PathResult([start, goal], gd, 0, meter.point_checks)

    configs = [start]
    parent: list[int | None] = [None]
    cost = [0.0]
    edge_len = [0.0]
    children: list[set[int]] = [set()]
    index = SpatialIndex()
    index.insert(0, start.x, start.y)
    xmin, ymin, xmax, ymax = workspace.bounds

    for it in range(1, params.max_iterations + 1):
        x = rng.uniform(xmin, xmax)
        y = rng.uniform(ymin, ymax)
        nid, d2 = index.nearest(x, y)
        if d2 == 0.0:
            continue
        nc = configs[nid]
        dist = math.sqrt(d2)
        if dist <= step:
            cand = Configuration(x, y)
        else:
            f = step / dist
            cand = Configuration(nc.x + (x - nc.x) * f, nc.y + (y - nc.y) * f)
        if not meter.segment_free(nc, cand):
            continue
        near = index.k_nearest(cand.x, cand.y, params.samples)
        best_parent = nid
        best_cost = cost[nid] + distance(nc, cand)
        for _, cid in near:
            if cid == nid:
                continue
            c = cost[cid] + distance(configs[cid], cand)
            if c < best_cost and meter.segment_free(configs[cid], cand):
                best_parent = cid
                best_cost = c
        new_id = len(configs)
        configs.append(cand)
        parent.append(best_parent)
        cost.append(best_cost)
        edge_len.append(distance(configs[best_parent], cand))
        children.append(set())
        children[best_parent].add(new_id)
        index.insert(new_id, cand.x, cand.y)
        for _, cid in near:
            d = distance(cand, configs[cid])
            if cost[new_id] + d < cost[cid] and meter.segment_free(cand, configs[cid]):
                old_parent = parent[cid]
                if old_parent is not None:
                    children[old_parent].discard(cid)
                parent[cid] = new_id
                edge_len[cid] = d
                children[new_id].add(cid)
                stack = [cid]
                while stack:
                    k = stack.pop()
                    cost[k] = cost[parent[k]] + edge_len[k]
                    stack.extend(children[k])
        gd2 = (cand.x - goal.x) ** 2 + (cand.y - goal.y) ** 2
        if gd2 < limit_sq and meter.segment_free(cand, goal):
            ids = [new_id]
            while parent[ids[-1]] is not None:
                ids.append(parent[ids[-1]])
            path = [configs[k] for k in reversed(ids)] + [goal]
            return PathResult(path, cost[new_id] + distance(cand, goal), it, meter.point_checks)
    return PathResult(None, math.inf, params.max_iterations, meter.point_checks)


@dataclass
class LazyResult:
    """Verified tour, the matrix that produced it, and the effort spent."""

    tour: Tour
    cost_matrix: np.ndarray
    verified: set[tuple[int, int]]
    paths: dict[tuple[int, int], list[Configuration]]
    total_iterations: int
    point_checks: int
    targets: list[Configuration] = field(default_factory=list)


def _default_tour_solver(matrix: np.ndarray) -> Tour:
    """Exact solve up to 20 targets; +inf entries are treated as forbidden."""
    if matrix.shape[0] <= 20:
        return _min_cost_cycle(matrix)
    return heuristic_tour(matrix)


def lazy_tsp(workspace: Workspace, targets, params: PlannerParams,
             tsp_solver=None) -> LazyResult:
    """Tour first, paths later: plan only the pairs the current tour uses.

    The matrix starts as straight-line distances.  Each round solves the
    tour, plans every unverified tour edge with `rrt_star`, overwrites those
    entries with the true costs and repeats until the tour is fully
    verified.  A pair that fails to plan twice is marked +inf permanently.
    Seeds for the individual queries are drawn in call order from one
    `random.Random(seed)` stream.
    """
    targets = check_targets(workspace, targets, minimum=2)
    n = len(targets)
    solver = tsp_solver or _default_tour_solver
    matrix = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            d = distance(targets[i], targets[j])
            matrix[i, j] = d
            matrix[j, i] = d
    rng = random.Random(params.seed)
    verified: set[tuple[int, int]] = set()
    failures: dict[tuple[int, int], int] = {}
    paths: dict[tuple[int, int], list[Configuration]] = {}
    total_iterations = 0
    point_checks = 0
    while True:
        try:
            tour = solver(matrix)
        except ValueError as exc:
            raise PlanningFailure(f"no plannable tour remains: {exc}") from exc
        seq = tour.sequence
        pending = []
        for k in range(n):
            i, j = seq[k], seq[(k + 1) % n]
            pair = (min(i, j), max(i, j))
            if pair not in verified and pair not in pending:
                pending.append(pair)
        if not pending:
            return LazyResult(tour, matrix, verified, paths,
                              total_iterations, point_checks, targets)
        for pair in pending:
            i, j = pair
            sub_params = replace(params, seed=rng.randrange(2**63))
            result = rrt_star(workspace, targets[i], targets[j], sub_params)
            total_iterations += result.iterations
            point_checks += result.point_checks
            if result.found:
                matrix[i, j] = matrix[j, i] = result.cost
                verified.add(pair)
                paths[pair] = result.path
            else:
                failures[pair] = failures.get(pair, 0) + 1
                if failures[pair] >= 2:
                    matrix[i, j] = matrix[j, i] = math.inf
                    verified.add(pair)  # permanently unusable; never retried
