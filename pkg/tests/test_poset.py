import itertools
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmloss.errors import CycleError, DuplicateElement, NotConnected, NotConvex, NotLinear
from pmloss.poset import build_poset, chain, grid, interval_check
from pmloss.generate import random_poset


def test_singleton():
    P = build_poset(["a"], [])
    assert len(P) == 1 and len(P.hasse_edges) == 0


def test_three_chain():
    P = build_poset([0, 1, 2], [(0, 1), (1, 2)])
    assert P.is_linear()
    assert sorted(P.hasse_edges) == [(0, 1), (1, 2)]
    assert P.max_predecessors == 1
    assert P.leq(0, 2)


def test_cycle_rejected():
    with pytest.raises(CycleError):
        build_poset(["a", "b", "c"], [("a", "b"), ("b", "c"), ("c", "a")])


def test_duplicate_rejected():
    with pytest.raises(DuplicateElement):
        build_poset([1, 1], [])


def test_grid_one_axis_is_chain():
    P = grid([3])
    assert P.is_linear() and P.chain_order() == [(0,), (1,), (2,)]


def test_grid_2x2():
    P = grid([2, 2])
    assert len(P) == 4
    assert not P.comparable((0, 1), (1, 0))
    assert P.max_predecessors == 2
    assert len(P.predecessors((1, 1))) == 2


def test_chain_order_needs_linear():
    with pytest.raises(NotLinear):
        grid([2, 2]).chain_order()


def test_interval_closed():
    interval_check(chain(5), {1, 2, 3})


def test_interval_gap_witness():
    with pytest.raises(NotConvex) as e:
        interval_check(chain(5), {1, 3})
    assert e.value.witness == (1, 2, 3)


def test_interval_corner_of_grid():
    interval_check(grid([2, 2]), {(0, 0), (0, 1), (1, 0)})


def test_interval_disconnected():
    P = build_poset(["a", "b"], [])
    with pytest.raises(NotConnected):
        interval_check(P, {"a", "b"})


def _brute_hasse(P):
    els = P.elements
    return {(p, q) for p in els for q in els
            if P.lt(p, q) and not any(P.lt(p, r) and P.lt(r, q) for r in els)}


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 9), st.floats(0, 1), st.integers(0, 10**6))
def test_order_axioms_and_hasse(n, density, seed):
    P = random_poset(random.Random(seed), n, density)
    L = P.leq_matrix
    assert L.diagonal().all()
    assert not (L & L.T & ~np.eye(n, dtype=bool)).any()
    assert ((L.astype(int) @ L.astype(int) > 0) <= L).all()
    assert set(P.hasse_edges) == _brute_hasse(P)
    assert P.max_predecessors == max(len(P.predecessors(q)) for q in P.elements)
    ext = P.linear_extension()
    pos = {p: i for i, p in enumerate(ext)}
    assert all(pos[p] < pos[q] for p, q in P.comparable_pairs(strict=True))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.integers(1, 4), min_size=1, max_size=3))
def test_grid_is_product_order(shape):
    P = grid(shape)
    for p, q in itertools.product(P.elements, repeat=2):
        assert P.leq(p, q) == all(a <= b for a, b in zip(p, q))
