"""Space-filling forest planner for multi-goal path planning.

One tree is grown per target.  Each iteration picks a node (biased toward
nodes whose frozen straight-line distance to some other target is small),
samples up to ``samples`` candidate points on the circle of radius ``step``
around it, and accepts the first candidate that is reachable over a free
segment and lies strictly closer to its source node than to every other
node of the same tree — so trees expand outward instead of folding back on
themselves.  Accepted nodes are optionally rewired against their nearest
same-tree neighbours to shorten root paths, and connected to other trees by
*virtual edges* whenever another tree has a node within ``connect_radius``
reachable over a free segment.  Trees are never merged; the virtual edges
record the inter-tree connectivity.

Nodes start on the open list and move to the closed list after their first
failed expansion; closed nodes stay selectable (a later attempt may succeed
thanks to fresh random angles) but leave the per-target priority queues for
good.

Randomness
----------
A single ``random.Random(seed)`` stream drives every stochastic choice.
Per iteration the draws happen in this order:

1. selection coin ``rng.random()`` compared against ``queue_bias`` (drawn
   only when the open list is nonempty and queues are enabled);
2. queue branch: tree pick ``rng.randrange(n)``, then queue pick
   ``rng.randrange(#nonempty queues of that tree)``; when the picked tree
   has no live queue entry the queue pick is skipped and one
   ``rng.randrange(len(open))`` pick follows instead;
3. plain branch: one ``rng.randrange(len(open))`` (or ``len(closed)`` when
   the open list is empty) pick;
4. expansion: one ``rng.random()`` angle draw per sample attempt.

Identical workspace, targets and parameters therefore reproduce the forest
bit for bit.
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

from .geometry import (
    CollisionMeter,
    Configuration,
    Workspace,
    check_targets,
    distance,
)
from .nn import SpatialIndex, TargetQueue
from .unionfind import UnionFind

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PlannerParams:
    """Knobs shared by every planner in the toolkit.

    step            sampling radius for expansion / RRT extension step
    connect_radius  max straight-line distance for inter-tree connections
    samples         candidate samples per expansion; doubles as the
                    rewiring neighbourhood size
    queue_bias      probability of queue-driven node selection
    max_iterations  iteration budget
    rewire          enable cost-shortening reparenting
    use_queues      enable distance-to-target priority queues
    check_points    sample points per segment collision check
    seed            root seed of the planner's random stream
    """

    step: float = 1.0
    connect_radius: float = 2.0
    samples: int = 10
    queue_bias: float = 0.95
    max_iterations: int = 10_000
    rewire: bool = True
    use_queues: bool = True
    check_points: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.step) and self.step > 0.0):
            raise ValueError(f"step must be finite and > 0, got {self.step}")
        if not (math.isfinite(self.connect_radius) and self.connect_radius > 0.0):
            raise ValueError(f"connect_radius must be finite and > 0, got {self.connect_radius}")
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if not (0.0 <= self.queue_bias <= 1.0):
            raise ValueError(f"queue_bias must lie in [0, 1], got {self.queue_bias}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.check_points < 2:
            raise ValueError(f"check_points must be >= 2, got {self.check_points}")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "PlannerParams":
        return cls(**data)


@dataclass(slots=True)
class Node:
    """A tree node.  `source` is the node it was expanded from, which is
    immutable history; `parent` starts equal to `source` but may change
    through rewiring."""

    id: int
    tree: int
    config: Configuration
    parent: int | None
    cost: float
    edge_len: float
    source: int | None
    children: set[int] = field(default_factory=set)


@dataclass(frozen=True, slots=True)
class VirtualEdge:
    """Inter-tree connection between node `a` (existing) and node `b` (new)."""

    a: int
    b: int
    length: float


class _RandomBag:
    """Set with O(1) add/discard and uniform random picks (swap-remove list)."""

    __slots__ = ("_items", "_pos")

    def __init__(self):
        self._items: list[int] = []
        self._pos: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, id_: int) -> bool:
        return id_ in self._pos

    def add(self, id_: int) -> None:
        self._pos[id_] = len(self._items)
        self._items.append(id_)

    def discard(self, id_: int) -> None:
        pos = self._pos.pop(id_)
        last = self._items.pop()
        if pos < len(self._items):
            self._items[pos] = last
            self._pos[last] = pos

    def pick(self, rng: random.Random) -> int:
        return self._items[rng.randrange(len(self._items))]


class Forest:
    """Planner state: trees, lists, queues, virtual edges and instrumentation.

    Construct it (which validates the problem and plants one root per
    target), then call :meth:`run`.  The module-level :func:`plan` does both.
    """

    def __init__(
        self,
        workspace: Workspace,
        targets: Iterable[Configuration | Sequence[float]],
        params: PlannerParams,
    ):
        self.workspace = workspace
        self.targets = check_targets(workspace, targets)
        self.params = params
        n = len(self.targets)

        self.nodes: list[Node] = []
        self._indices = [SpatialIndex() for _ in range(n)]
        # queues[i][j]: nodes of tree i keyed by straight-line distance to target j
        self._queues: list[dict[int, TargetQueue]] = [
            {j: TargetQueue() for j in range(n) if j != i} for i in range(n)
        ]
        self._open = _RandomBag()
        self._closed: list[int] = []
        self._closed_set: set[int] = set()
        self.components = UnionFind(n)
        self.virtual_edges: list[VirtualEdge] = []
        self._rng = random.Random(params.seed)
        self.meter = CollisionMeter(workspace, params.check_points)

        self.iterations_used = 0
        self.iterations_to_single_component: int | None = 0 if n == 1 else None
        self.checks_expand_connect: list[int] = []  # per-iteration point checks
        self.checks_rewire: list[int] = []
        self.rewire_count = 0
        self.rewire_cost_increases = 0
        self._phase_checks = (0, 0)

        for i, t in enumerate(self.targets):
            self._add_node(tree=i, config=t, parent=None, source=None)

    # -- structure -----------------------------------------------------

    @property
    def n_targets(self) -> int:
        return len(self.targets)

    def _add_node(self, tree: int, config: Configuration, parent: int | None,
                  source: int | None) -> Node:
        nid = len(self.nodes)
        if parent is None:
            cost = 0.0
            edge_len = 0.0
        else:
            edge_len = distance(self.nodes[parent].config, config)
            cost = self.nodes[parent].cost + edge_len
        node = Node(nid, tree, config, parent, cost, edge_len, source)
        self.nodes.append(node)
        if parent is not None:
            self.nodes[parent].children.add(nid)
        self._indices[tree].insert(nid, config.x, config.y)
        self._open.add(nid)
        if self.params.use_queues:
            for j, q in self._queues[tree].items():
                q.insert(nid, distance(config, self.targets[j]))
        return node

    def is_open(self, nid: int) -> bool:
        return nid in self._open

    def is_closed(self, nid: int) -> bool:
        return nid in self._closed_set

    def open_ids(self) -> list[int]:
        return list(self._open._items)

    def closed_ids(self) -> list[int]:
        return list(self._closed)

    def is_single_component(self) -> bool:
        return self.components.count == 1

    # -- planner operations ---------------------------------------------

    def select_node(self) -> int:
        """Pick the node to expand next; see the module docstring for the draw order."""
        rng = self._rng
        if len(self._open) > 0:
            if self.params.use_queues and rng.random() < self.params.queue_bias:
                tree = rng.randrange(self.n_targets)
                live = [(j, q.peek_best()) for j, q in self._queues[tree].items()]
                live = [(j, nid) for j, nid in live if nid is not None]
                if live:
                    return live[rng.randrange(len(live))][1]
            return self._open.pick(rng)
        return self._closed[rng.randrange(len(self._closed))]

    def expand_node(self, eid: int) -> int | None:
        """Try to grow a new node out of `eid`; returns the new node id or None.

        On success the new node is rewired (when enabled) and offered to
        every other tree for a virtual connection, mirroring one full
        planner iteration minus the open/closed bookkeeping.
        """
        e = self.nodes[eid]
        params = self.params
        meter = self.meter
        before = meter.point_checks
        accepted: Configuration | None = None
        for _ in range(params.samples):
            theta = self._rng.random() * _TWO_PI
            cand = Configuration(
                e.config.x + params.step * math.cos(theta),
                e.config.y + params.step * math.sin(theta),
            )
            if not meter.segment_free(e.config, cand):
                continue
            if self._grows_outward(e, cand):
                accepted = cand
                break
        if accepted is None:
            self._phase_checks = (meter.point_checks - before, 0)
            return None
        node = self._add_node(tree=e.tree, config=accepted, parent=eid, source=eid)
        after_expand = meter.point_checks
        self.try_rewire(node.id)
        after_rewire = meter.point_checks
        self.try_connect_trees(node.id)
        connect = meter.point_checks - after_rewire
        self._phase_checks = (after_expand - before + connect, after_rewire - after_expand)
        return node.id

    def _grows_outward(self, e: Node, cand: Configuration) -> bool:
        """True when `cand` is strictly closer to `e` than to any other node of e's tree."""
        found = self._indices[e.tree].k_nearest(cand.x, cand.y, 2)
        if found[0][1] != e.id:
            return False  # some other node is at least as close (ties included)
        if len(found) < 2:
            return True
        return found[1][0] > found[0][0]

    def try_rewire(self, new_id: int) -> None:
        """Reparent `new_id` or its nearest same-tree neighbours when that
        strictly shortens a root path.  No-op when rewiring is disabled."""
        if not self.params.rewire:
            return
        node = self.nodes[new_id]
        near = self._indices[node.tree].k_nearest(
            node.config.x, node.config.y, self.params.samples + 1
        )
        near = [(d2, nid) for d2, nid in near if nid != new_id][: self.params.samples]
        for _, hid in near:
            h = self.nodes[hid]
            d = distance(node.config, h.config)
            if node.cost > h.cost + d and self.meter.segment_free(node.config, h.config):
                self._reparent(node, h, d)
            if h.cost > node.cost + d and self.meter.segment_free(node.config, h.config):
                self._reparent(h, node, d)

    def _reparent(self, child: Node, parent: Node, edge_len: float) -> None:
        if child.parent is not None:
            self.nodes[child.parent].children.discard(child.id)
        child.parent = parent.id
        child.edge_len = edge_len
        parent.children.add(child.id)
        self.rewire_count += 1
        stack = [child.id]
        while stack:
            nid = stack.pop()
            n = self.nodes[nid]
            old = n.cost
            n.cost = self.nodes[n.parent].cost + n.edge_len
            if n.cost > old:
                self.rewire_cost_increases += 1
            stack.extend(n.children)

    def try_connect_trees(self, new_id: int) -> list[VirtualEdge]:
        """Add a virtual edge to every other tree whose nearest node lies
        strictly within `connect_radius` and is reachable over a free segment."""
        node = self.nodes[new_id]
        limit_sq = self.params.connect_radius * self.params.connect_radius
        added = []
        for tree in range(self.n_targets):
            if tree == node.tree:
                continue
            fid, d2 = self._indices[tree].nearest(node.config.x, node.config.y)
            if d2 < limit_sq and self.meter.segment_free(node.config, self.nodes[fid].config):
                edge = VirtualEdge(a=fid, b=new_id, length=distance(node.config, self.nodes[fid].config))
                self.virtual_edges.append(edge)
                self.components.union(node.tree, tree)
                added.append(edge)
        return added

    # -- main loop -------------------------------------------------------

    def run(self, iteration_hook: Callable[["Forest"], None] | None = None) -> "Forest":
        """Run the planner loop up to `max_iterations`.

        Stops early only when the open list is empty and all trees form a
        single component.  `iteration_hook`, when given, is called with the
        forest after every iteration (handy for audits and progress)."""
        params = self.params
        while self.iterations_used < params.max_iterations:
            eid = self.select_node()
            new_id = self.expand_node(eid)
            if new_id is None and eid in self._open:
                self._open.discard(eid)
                self._closed.append(eid)
                self._closed_set.add(eid)
                tree = self.nodes[eid].tree
                for q in self._queues[tree].values():
                    q.tombstone(eid)
            self.iterations_used += 1
            self.checks_expand_connect.append(self._phase_checks[0])
            self.checks_rewire.append(self._phase_checks[1])
            if self.iterations_to_single_component is None and self.components.count == 1:
                self.iterations_to_single_component = self.iterations_used
            if iteration_hook is not None:
                iteration_hook(self)
            if len(self._open) == 0 and self.components.count == 1:
                break
        return self

    # -- serialization ----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "targets": [[t.x, t.y] for t in self.targets],
            "params": self.params.to_dict(),
            "nodes": [
                {
                    "id": n.id,
                    "tree": n.tree,
                    "x": n.config.x,
                    "y": n.config.y,
                    "parent": n.parent,
                    "source": n.source,
                    "cost": n.cost,
                }
                for n in self.nodes
            ],
            "virtual_edges": [
                {"a": e.a, "b": e.b, "length": e.length} for e in self.virtual_edges
            ],
            "components": self.components.count,
            "iterations_used": self.iterations_used,
            "iterations_to_single_component": self.iterations_to_single_component,
            "point_checks": {
                "expand_connect": self.checks_expand_connect,
                "rewire": self.checks_rewire,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def plan(
    workspace: Workspace,
    targets: Iterable[Configuration | Sequence[float]],
    params: PlannerParams,
    iteration_hook: Callable[[Forest], None] | None = None,
) -> Forest:
    """Grow a space-filling forest over `targets` inside `workspace`."""
    return Forest(workspace, targets, params).run(iteration_hook)
