"""Closed-tour solvers over symmetric cost matrices.

`held_karp` is the exact subset dynamic program (practical up to n = 20,
where the table holds ~10M states); `heuristic_tour` is nearest-neighbour
construction followed by first-improvement 2-opt.  Both return tours in a
canonical form — starting at index 0, with the smaller-indexed neighbour of
0 in second place — so equal cycles compare equal as sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Tour:
    """A closed visiting order (canonical) and its cycle cost."""

    sequence: tuple[int, ...]
    cost: float


def canonical_sequence(sequence: Sequence[int]) -> tuple[int, ...]:
    """Rotate to start at 0 and fix the orientation (second < last)."""
    seq = list(sequence)
    k = seq.index(0)
    seq = seq[k:] + seq[:k]
    if len(seq) > 2 and seq[1] > seq[-1]:
        seq = [seq[0]] + seq[:0:-1]
    return tuple(seq)


def tour_cost(matrix: np.ndarray, sequence: Sequence[int]) -> float:
    """Cycle cost of visiting `sequence` in order and returning to the start."""
    m = np.asarray(matrix, dtype=np.float64)
    n = m.shape[0]
    if sorted(sequence) != list(range(n)):
        raise ValueError(f"sequence must be a permutation of 0..{n - 1}, got {list(sequence)}")
    total = 0.0
    for k in range(n):
        total += float(m[sequence[k], sequence[(k + 1) % n]])
    return total


def _validated(matrix, require_finite: bool) -> np.ndarray:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"cost matrix must be square, got shape {m.shape}")
    if m.shape[0] < 2:
        raise ValueError(f"need at least 2 targets, got {m.shape[0]}")
    if np.isnan(m).any():
        raise ValueError("cost matrix contains NaN")
    if not np.array_equal(m, m.T):
        raise ValueError("cost matrix is asymmetric")
    if require_finite and not np.isfinite(m).all():
        raise ValueError("cost matrix contains an infinite entry")
    return m


def _min_cost_cycle(m: np.ndarray) -> Tour:
    """Exact subset DP.  +inf entries act as forbidden edges; raises when
    every tour crosses one.

    States are processed in layers of equal subset size with the transition
    vectorized over (subset, last city), which keeps the Python overhead to
    O(n^2) numpy calls.
    """
    n = m.shape[0]
    if n > 20:
        raise ValueError(f"exact solver handles at most 20 targets, got {n}")
    nsub = n - 1  # cities 1..n-1 mapped to bits 0..nsub-1
    size = 1 << nsub
    dp = np.full((size, nsub), np.inf)
    parent = np.full((size, nsub), -1, dtype=np.int8)
    for j in range(nsub):
        dp[1 << j, j] = m[0, j + 1]
    masks = np.arange(size, dtype=np.int64)
    popcount = np.zeros(size, dtype=np.int8)
    for b in range(nsub):
        popcount += ((masks >> b) & 1).astype(np.int8)
    inner = m[1:, 1:]
    for s in range(2, nsub + 1):
        layer = masks[popcount == s]
        for j in range(nsub):
            bit = 1 << j
            with_j = layer[(layer & bit) != 0]
            if with_j.size == 0:
                continue
            prev = with_j ^ bit
            cand = dp[prev] + inner[:, j]
            best = np.argmin(cand, axis=1)
            rows = np.arange(with_j.size)
            dp[with_j, j] = cand[rows, best]
            parent[with_j, j] = best
    full = size - 1
    closing = dp[full] + m[1:, 0]
    last = int(np.argmin(closing))
    if math.isinf(float(closing[last])):
        raise ValueError("no tour with finite cost exists")
    chain = []
    mask, j = full, last
    while True:
        chain.append(j + 1)
        nxt = int(parent[mask, j])
        mask ^= 1 << j
        if mask == 0:
            break
        j = nxt
    chain.reverse()
    seq = canonical_sequence([0] + chain)
    return Tour(sequence=seq, cost=tour_cost(m, seq))


def held_karp(matrix) -> Tour:
    """Optimal closed tour of a finite symmetric matrix, 2 <= n <= 20."""
    m = _validated(matrix, require_finite=True)
    return _min_cost_cycle(m)


def heuristic_tour(matrix) -> Tour:
    """Nearest-neighbour tour from index 0 improved by first-improvement 2-opt.

    The 2-opt scan walks reversal candidates in a fixed order, applies the
    first strict improvement and restarts; improvements smaller than 1e-12
    are ignored so floating-point noise cannot cycle the scan forever.
    """
    m = _validated(matrix, require_finite=True)
    n = m.shape[0]
    visited = [False] * n
    visited[0] = True
    seq = [0]
    cur = 0
    for _ in range(n - 1):
        cur = min((float(m[cur, v]), v) for v in range(n) if not visited[v])[1]
        visited[cur] = True
        seq.append(cur)
    improved = True
    while improved:
        improved = False
        for i in range(1, n - 1):
            for j in range(i + 1, n):
                a, b = seq[i - 1], seq[i]
                c, d = seq[j], seq[(j + 1) % n]
                delta = (m[a, c] + m[b, d]) - (m[a, b] + m[c, d])
                if delta < -1e-12:
                    seq[i:j + 1] = seq[i:j + 1][::-1]
                    improved = True
                    break
            if improved:
                break
    seq = canonical_sequence(seq)
    return Tour(sequence=seq, cost=tour_cost(m, seq))


def solve_tour(matrix) -> Tour:
    """Exact tour up to 20 targets, heuristic beyond."""
    m = _validated(matrix, require_finite=True)
    if m.shape[0] <= 20:
        return _min_cost_cycle(m)
    return heuristic_tour(m)
