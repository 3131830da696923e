"""Exact nearest-neighbour search and key-frozen priority queues.

`SpatialIndex` is an incrementally grown 2-d tree whose answers are defined
to match a brute-force linear scan exactly, including tie handling: when two
entries sit at the same distance the smaller id wins.  That determinism is
what lets planner runs replay bit for bit, so the search compares squared
distances (no square roots) and only prunes a subtree when the splitting
plane is strictly farther than the current best.

`TargetQueue` is a binary heap with lazy deletion.  Keys are frozen at
insertion time and never reordered afterwards; removed ids are tombstoned
and physically dropped once they outnumber half the heap.
"""
from __future__ import annotations

import heapq
from bisect import insort


class _KDNode:
    __slots__ = ("x", "y", "id", "left", "right")

    def __init__(self, x: float, y: float, id_: int):
        self.x = x
        self.y = y
        self.id = id_
        self.left: _KDNode | None = None
        self.right: _KDNode | None = None


class SpatialIndex:
    """2-d tree over (id, point) entries with deterministic tie-breaking."""

    def __init__(self):
        self._root: _KDNode | None = None
        self._ids: set[int] = set()

    def __len__(self) -> int:
        return len(self._ids)

    def __contains__(self, id_: int) -> bool:
        return id_ in self._ids

    def insert(self, id_: int, x: float, y: float) -> None:
        if id_ in self._ids:
            raise ValueError(f"id {id_} already present in index")
        self._ids.add(id_)
        new = _KDNode(x, y, id_)
        if self._root is None:
            self._root = new
            return
        node = self._root
        axis = 0
        while True:
            if (x if axis == 0 else y) < (node.x if axis == 0 else node.y):
                if node.left is None:
                    node.left = new
                    return
                node = node.left
            else:
                if node.right is None:
                    node.right = new
                    return
                node = node.right
            axis ^= 1

    def nearest(self, x: float, y: float) -> tuple[int, float]:
        """(id, squared distance) of the closest entry; distance ties go to the smaller id."""
        if self._root is None:
            raise ValueError("nearest() on an empty index")
        best_id = -1
        best_d2 = float("inf")
        stack = [(self._root, 0)]
        while stack:
            node, axis = stack.pop()
            while node is not None:
                dx = x - node.x
                dy = y - node.y
                d2 = dx * dx + dy * dy
                if d2 < best_d2 or (d2 == best_d2 and node.id < best_id):
                    best_d2 = d2
                    best_id = node.id
                delta = dx if axis == 0 else dy
                near, far = (node.left, node.right) if delta < 0 else (node.right, node.left)
                # the far side can still hold an equal-distance smaller id,
                # so only prune when it is strictly farther
                if far is not None and delta * delta <= best_d2:
                    stack.append((far, axis ^ 1))
                node = near
                axis ^= 1
        return best_id, best_d2

    def k_nearest(self, x: float, y: float, k: int) -> list[tuple[float, int]]:
        """Up to `k` closest entries as (squared distance, id), ascending.

        Ordering and the cut at the k-th place are lexicographic on
        (squared distance, id), matching a sorted linear scan.
        """
        if k <= 0:
            raise ValueError(f"k must be positive, got {k}")
        best: list[tuple[float, int]] = []
        if self._root is None:
            return best
        stack = [(self._root, 0)]
        while stack:
            node, axis = stack.pop()
            while node is not None:
                dx = x - node.x
                dy = y - node.y
                d2 = dx * dx + dy * dy
                if len(best) < k:
                    insort(best, (d2, node.id))
                elif (d2, node.id) < best[-1]:
                    insort(best, (d2, node.id))
                    best.pop()
                delta = dx if axis == 0 else dy
                near, far = (node.left, node.right) if delta < 0 else (node.right, node.left)
                if far is not None and (len(best) < k or delta * delta <= best[-1][0]):
                    stack.append((far, axis ^ 1))
                node = near
                axis ^= 1
        return best


class TargetQueue:
    """Min-heap of (key, id) with tombstoned removal and frozen keys."""

    def __init__(self):
        self._heap: list[tuple[float, int]] = []
        self._queued: set[int] = set()  # live ids
        self._retired: set[int] = set()  # tombstoned ids, barred forever

    def __len__(self) -> int:
        """Number of live entries."""
        return len(self._queued)

    def insert(self, id_: int, key: float) -> None:
        if id_ in self._queued or id_ in self._retired:
            raise ValueError(f"id {id_} already queued")
        self._queued.add(id_)
        heapq.heappush(self._heap, (key, id_))

    def tombstone(self, id_: int) -> None:
        """Mark an entry removed; no effect if it is not live."""
        if id_ not in self._queued:
            return
        self._queued.discard(id_)
        self._retired.add(id_)
        if len(self._heap) > 2 * len(self._queued) + 8:
            self._heap = [(k, i) for (k, i) in self._heap if i in self._queued]
            heapq.heapify(self._heap)

    def peek_best(self) -> int | None:
        """Id of the live entry with the minimal key (ties: smaller id); None if empty.

        Does not remove the returned entry.  Stale heap tops left behind by
        tombstoning are discarded on the way.
        """
        heap = self._heap
        while heap and heap[0][1] not in self._queued:
            heapq.heappop(heap)
        if not heap:
            return None
        return heap[0][1]
