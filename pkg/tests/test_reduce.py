import itertools
import random

import pytest

from pmloss import backend as bk
from pmloss import generate as gen
from pmloss.errors import NotAGrid, NotConstructible, NotConstructibleInputShape, NotLinear
from pmloss.flow import floor_shift, grid_flow
from pmloss.loss import PAR_L, loss_par_left, loss_tri_down, total_loss, verify_interleaving
from pmloss.pmodule import PersModule
from pmloss.poset import chain, grid
from pmloss.reduce import (check_constructible, decompose_grid, decompose_linear, extend_constructible,
                           grid_diagram_bound, representative_points, total_loss_grid, total_loss_linear)
from helpers import constructible_instance
from test_metric import finset_chain
from test_pmodule import constant_module


def line_modules():
    """F non-iso on edges (1,2) and (8,9); G non-iso on (4,5); chain 0..9."""
    F = finset_chain([("a", "b")] * 2 + [("a",)] * 7 + [("a", "c")],
                     [{"a": "a", "b": "b"}, {"a": "a", "b": "a"}] + [{"a": "a"}] * 7)
    G = finset_chain([("a", "b")] * 5 + [("a",)] * 5,
                     [{"a": "a", "b": "b"}] * 4 + [{"a": "a", "b": "a"}] + [{"a": "a"}] * 4)
    G = PersModule(F.poset, G.backend, G.objects, G.edge_maps)
    return F, G, floor_shift(F.poset)


def test_constant_modules_single_interval():
    F = constant_module(chain(5))
    dec = decompose_linear(F, F, floor_shift(F.poset), 1)
    assert dec.criticals_F == [] and dec.B_F == [0]
    assert dec.intervals_F == [[[0, 1, 2, 3, 4]]]


def test_stretch_split_in_three():
    F, G, fl = line_modules()
    dec = decompose_linear(F, G, fl, 1)
    assert dec.criticals_F == [1, 2, 8, 9] and dec.criticals_G == [4, 5]
    assert dec.intervals_F[1] == [[3], [4], [5, 6, 7]]


def test_example_decomposition(example):
    dec = decompose_linear(example.F, example.G, example.flow, 1)
    assert dec.criticals_F == [2, 3]
    assert dec.B_F == [0, 2, 3, 4]
    assert 3 in dec.R_F
    pieces = [x for iv in dec.intervals_F for piece in iv for x in piece]
    assert sorted(pieces + dec.criticals_F) == list(example.poset.elements)
    S = example.flow(1)
    g = dec.grid
    for iv in dec.intervals_F:
        for piece in iv:
            assert len({g.cells_G.cell_of[0][S(x)] for x in piece}) == 1


def test_linear_true_interleaving():
    F, G, fl = line_modules()
    A = gen.identity_assignment(F, fl, 0)
    rep = total_loss_linear(A)
    assert rep.total == 0
    assert rep.counters["parallelograms_left"] == len(rep.decomposition["B_F"]) - 1


def test_linear_counts_bounded():
    for seed in range(20):
        A = constructible_instance(seed, "finset", "linear")
        rep = total_loss_linear(A)
        m, n = len(rep.decomposition["criticals_F"]), len(rep.decomposition["criticals_G"])
        assert rep.counters["parallelograms_left"] == len(rep.decomposition["B_F"]) - 1 <= 2 * m
        assert rep.counters["parallelograms_right"] == len(rep.decomposition["B_G"]) - 1 <= 2 * n


def test_example_is_not_constructible(example):
    with pytest.raises(NotConstructible) as e:
        total_loss_linear(example.assignment)
    assert e.value.witness == (PAR_L, (0, 1))


def test_linear_needs_chain():
    A = constructible_instance(0, "finset", (2, 2))
    with pytest.raises(NotLinear):
        total_loss_linear(A)
    with pytest.raises(NotAGrid):
        C = constant_module(gen.random_poset(random.Random(0), 4))
        total_loss_grid(gen.identity_assignment(C, gen.threshold_flow(C.poset)))


def test_extend_example(example):
    A = example.assignment
    B_F = representative_points(A.F)
    B_G = representative_points(A.G)
    E = extend_constructible(A.F, A.G, A.flow, 1, {p: A.phi[p] for p in B_F}, {p: A.psi[p] for p in B_G})
    for p in A.poset.elements:
        m = max(b for b in B_F if b <= p)
        same = m == p or loss_par_left(A, m, p) == 0
        assert (E.phi[p] == A.phi[p]) == same
    assert E.phi[1] != A.phi[1]
    total = total_loss(E, "naive").total
    assert total_loss_linear(E).total == total


def test_extend_constant_modules():
    F = constant_module(chain(4), ("x", "y"))
    fl = floor_shift(F.poset)
    sw = bk.FinSetMap.from_dict(F.obj(0), F.obj(1), {"x": "y", "y": "x"})
    E = extend_constructible(F, F, fl, 1, {0: sw}, {0: sw})
    assert all(E.phi[p].as_dict() == {"x": "y", "y": "x"} for p in F.poset.elements)


def test_extend_wrong_keys(example):
    A = example.assignment
    with pytest.raises(NotConstructibleInputShape):
        extend_constructible(A.F, A.G, A.flow, 1, {0: A.phi[0]}, {p: A.psi[p] for p in range(5)})


@pytest.mark.parametrize("seed", range(100))
def test_random_extensions_constructible(seed):
    A = constructible_instance(seed, "finset" if seed % 2 else "vec", "linear" if seed % 3 else (3, 3))
    dec = decompose_grid(A.F, A.G, A.flow, A.epsilon) if A.poset.is_grid else None
    if dec is not None:
        check_constructible(A, dec)
    else:
        total_loss_linear(A)


def test_cube_count_from_criticals():
    P = grid([4, 4])
    F = constant_module(P)
    one, two = bk.FinSetObj(("x",)), bk.FinSetObj(("x", "y"))
    objs = {p: (two if p[0] >= 2 and p[1] >= 2 else one) for p in P.elements}
    edges = {(p, q): (bk.identity(objs[p]) if objs[p] == objs[q]
                      else bk.FinSetMap.from_dict(one, two, {"x": "x"})) for p, q in P.hasse_edges}
    G = PersModule(P, bk.FINSET, objs, edges)
    dec = decompose_grid(F, G, grid_flow(P), 0)
    assert len(dec.B_F) == 1
    assert dec.cells_G.criticals == [(1, 2), (1, 2)]
    # two adjacent criticals leave the stretch between them empty: 4 of 5 cells per axis
    assert len(dec.B_G) == 16 <= (2 * 2 + 1) ** 2


def test_cell_labels():
    P = grid([7, 7])
    one, two = bk.FinSetObj(("x",)), bk.FinSetObj(("x", "y"))
    inside = lambda p: p[0] >= 2 and p[1] >= 2 and p[0] <= 4 and p[1] <= 4
    objs = {p: (two if inside(p) else one) for p in P.elements}
    edges = {}
    for p, q in P.hasse_edges:
        if objs[p] == objs[q]:
            edges[(p, q)] = bk.identity(objs[p])
        else:
            edges[(p, q)] = bk.FinSetMap.from_dict(objs[p], objs[q], {l: "x" for l in objs[p].labels})
    F = PersModule(P, bk.FINSET, objs, edges)
    dec = decompose_grid(F, F, grid_flow(P), 0)
    cells = dec.cells_F
    assert cells.criticals == [(1, 2, 4, 5), (1, 2, 4, 5)]
    by_label = {cells.label(I): I for I in cells.cubes()}
    open_cube = list(cells.cube_points(by_label[(5, 5)]))
    assert open_cube == [(3, 3)]
    edge_cube = list(cells.cube_points(by_label[(5, 4)]))
    assert edge_cube == [(3, 2)]


@pytest.mark.parametrize("seed", range(15))
def test_index_order_compatible(seed):
    A = constructible_instance(seed, "finset", (4, 4))
    dec = decompose_grid(A.F, A.G, A.flow, A.epsilon)
    fr, cF, cG = dec.frame, dec.cells_F, dec.cells_G
    S = A.S
    P = A.poset
    for p, q in P.comparable_pairs(strict=False):
        I, I2 = cF.cube_of(fr.coords(p)), cF.cube_of(fr.coords(q))
        J, J2 = cG.cube_of(fr.coords(S(p))), cG.cube_of(fr.coords(S(q)))
        assert all(a <= b for a, b in zip(I + J, I2 + J2))


@pytest.mark.parametrize("seed", range(15))
def test_cone_property(seed):
    A = constructible_instance(seed, "vec" if seed % 2 else "finset", (4, 3))
    F = A.F
    dec = decompose_grid(A.F, A.G, A.flow, A.epsilon)
    fr, cells = dec.frame, dec.cells_F
    for I in cells.cubes():
        m = fr.at(cells.cube_min(I))
        pts = [fr.at(c) for c in cells.cube_points(I)]
        for p, q in itertools.product(pts, repeat=2):
            if F.poset.leq(p, q):
                assert bk.is_iso(F(p, q))
                assert F(m, q) == bk.compose(F(m, p), F(p, q))


def _piece_rep(dec, S, p):
    fr, cF, cG = dec.frame, dec.cells_F, dec.cells_G
    return dec.R_F[(cF.cube_of(fr.coords(p)), cG.cube_of(fr.coords(S(p))))]


@pytest.mark.parametrize("seed", range(12))
def test_representatives_dominate(seed):
    A = constructible_instance(seed, "finset", (3, 3) if seed % 2 else "linear")
    dec = decompose_grid(A.F, A.G, A.flow, A.epsilon) if A.poset.is_grid else \
        decompose_linear(A.F, A.G, A.flow, A.epsilon).grid
    P = A.poset
    for p in P.elements:
        assert loss_tri_down(A, p) <= loss_tri_down(A, _piece_rep(dec, A.S, p))
    for p, q in P.comparable_pairs(strict=True):
        mp, mq = _piece_rep(dec, A.S, p), _piece_rep(dec, A.S, q)
        if mp != mq:
            assert loss_par_left(A, p, q) <= loss_par_left(A, mp, mq)


@pytest.mark.parametrize("seed", range(20))
def test_same_loss_in_interval(seed):
    A = constructible_instance(seed, "finset" if seed % 2 else "vec", "linear")
    dec = decompose_linear(A.F, A.G, A.flow, A.epsilon)
    order = A.poset.chain_order()
    for lo, hi in [(c[1], c[2]) for c in dec.grid.cells_F.cells[0] if c[0] % 2 == 1]:
        if hi + 1 >= len(order):
            continue
        c2 = order[hi + 1]
        vals = {loss_par_left(A, order[s], c2) for s in range(lo, hi + 1)}
        assert len(vals) == 1


def test_grid_true_interleaving():
    F = gen.random_finset_module(random.Random(1), grid([4, 4]), collapse_top=True)
    A = gen.identity_assignment(F, grid_flow(F.poset), 0)
    assert total_loss_grid(A).total == 0 and verify_interleaving(A).ok


def test_grid_5x5_matches_naive():
    for seed in range(10):
        A = constructible_instance(seed, "finset", (5, 5))
        rep = total_loss_grid(A)
        assert rep.total == total_loss(A, "naive").total
        assert rep.counters["representatives_F"] <= (2 * rep.counters["critical_max"] + 1) ** 4
        assert rep.counters["diagrams"] <= grid_diagram_bound(rep.counters["critical_max"], 2)
