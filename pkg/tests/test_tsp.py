"""Exact and heuristic tour solving against permutation brute force."""
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from forestplan import Tour, held_karp, heuristic_tour, solve_tour, tour_cost
from forestplan.tsp import canonical_sequence
from helpers import brute_force_tours


def random_symmetric(n, rng, low=0.1, high=10.0):
    m = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            m[i, j] = m[j, i] = rng.uniform(low, high)
    return m


def test_tour_cost_known_square():
    m = np.array([
        [0, 1, 2**0.5, 1],
        [1, 0, 1, 2**0.5],
        [2**0.5, 1, 0, 1],
        [1, 2**0.5, 1, 0],
    ])
    assert tour_cost(m, [0, 1, 2, 3]) == pytest.approx(4.0)
    assert tour_cost(m, [0, 2, 1, 3]) == pytest.approx(2 + 2 * 2**0.5)


def test_tour_cost_rejects_non_permutations():
    m = np.ones((3, 3))
    with pytest.raises(ValueError):
        tour_cost(m, [0, 1, 1])
    with pytest.raises(ValueError):
        tour_cost(m, [0, 1])


def test_canonical_sequence_normalizes_rotation_and_direction():
    assert canonical_sequence([2, 0, 1, 3]) == (0, 1, 3, 2)
    assert canonical_sequence([0, 3, 1, 2]) == (0, 2, 1, 3)
    # all rotations/reversals of one cycle agree
    base = [0, 1, 4, 2, 3]
    variants = [base[i:] + base[:i] for i in range(5)]
    variants += [list(reversed(v)) for v in variants]
    assert {canonical_sequence(v) for v in variants} == {canonical_sequence(base)}


@given(st.permutations(list(range(6))))
def test_tour_cost_invariant_under_rotation_and_reversal(seq):
    rng = random.Random(0)
    m = random_symmetric(6, rng)
    base = tour_cost(m, seq)
    rotated = list(seq[2:]) + list(seq[:2])
    assert tour_cost(m, rotated) == pytest.approx(base, rel=1e-12)
    assert tour_cost(m, list(reversed(seq))) == pytest.approx(base, rel=1e-12)


def test_held_karp_matches_brute_force():
    rng = random.Random(7)
    for trial in range(12):
        n = rng.randint(2, 8)
        m = random_symmetric(n, rng)
        tour = held_karp(m)
        best, winners = brute_force_tours(m)
        assert tour.cost == pytest.approx(best, rel=1e-12)
        assert tuple(tour.sequence) in winners


def test_held_karp_tour_is_canonical_and_cost_consistent():
    rng = random.Random(3)
    m = random_symmetric(7, rng)
    tour = held_karp(m)
    assert tour.sequence == canonical_sequence(tour.sequence)
    assert tour.cost == tour_cost(m, tour.sequence)


def test_held_karp_input_validation():
    with pytest.raises(ValueError):
        held_karp(np.zeros((1, 1)))
    with pytest.raises(ValueError):
        held_karp(np.ones((2, 3)))
    asym = np.array([[0.0, 1.0], [2.0, 0.0]])
    with pytest.raises(ValueError):
        held_karp(asym)
    inf = np.array([[0.0, math.inf], [math.inf, 0.0]])
    with pytest.raises(ValueError):
        held_karp(inf)
    nan = np.array([[0.0, math.nan], [math.nan, 0.0]])
    with pytest.raises(ValueError):
        held_karp(nan)
    with pytest.raises(ValueError):
        held_karp(random_symmetric(21, random.Random(0)))


def test_forbidden_edges_route_around_or_fail():
    from forestplan.tsp import _min_cost_cycle

    # a 4-cycle where the two diagonals are unusable
    m = np.full((4, 4), math.inf)
    np.fill_diagonal(m, 0.0)
    ring = [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]
    for i, j, w in ring:
        m[i, j] = m[j, i] = w
    tour = _min_cost_cycle(m)
    assert tour.cost == pytest.approx(4.0)
    m[1, 2] = m[2, 1] = math.inf  # break the only ring
    with pytest.raises(ValueError, match="finite"):
        _min_cost_cycle(m)


class TestHeuristic:
    def test_valid_permutation_and_at_least_optimal(self):
        rng = random.Random(11)
        for _ in range(10):
            n = rng.randint(4, 8)
            m = random_symmetric(n, rng)
            tour = heuristic_tour(m)
            assert sorted(tour.sequence) == list(range(n))
            best, _ = brute_force_tours(m)
            assert tour.cost >= best - 1e-9

    def test_two_opt_untangles_a_crossing(self):
        pts = [(0, 0), (10, 0), (0, 1), (10, 1)]
        m = np.array([[math.dist(a, b) for b in pts] for a in pts])
        tour = heuristic_tour(m)
        best, winners = brute_force_tours(m)
        assert tour.cost == pytest.approx(best)
        assert tuple(tour.sequence) in winners

    def test_deterministic(self):
        m = random_symmetric(9, random.Random(5))
        assert heuristic_tour(m) == heuristic_tour(m)


def test_solve_tour_dispatches_on_size():
    rng = random.Random(2)
    small = random_symmetric(8, rng)
    assert solve_tour(small) == held_karp(small)
    pts = [(math.cos(2 * math.pi * i / 23) * 10, math.sin(2 * math.pi * i / 23) * 10)
           for i in range(23)]
    big = np.array([[math.dist(a, b) for b in pts] for a in pts])
    tour = solve_tour(big)
    assert tour == heuristic_tour(big)
    assert sorted(tour.sequence) == list(range(23))


def test_tour_is_hashable_value_object():
    t1 = Tour((0, 1, 2), 3.0)
    t2 = Tour((0, 1, 2), 3.0)
    assert t1 == t2 and hash(t1) == hash(t2)
