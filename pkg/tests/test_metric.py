import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from pmloss import backend as bk
from pmloss.errors import ElementNotInObject
from pmloss.flow import floor_shift
from pmloss.metric import INF, ext_max, merging_distance, morphism_distance, reducing_constants
from pmloss.pmodule import PersModule
from pmloss.poset import chain
from helpers import load, random_frame, random_module


def finset_chain(objs, maps):
    P = chain(len(objs))
    o = {i: bk.FinSetObj(tuple(l)) for i, l in enumerate(objs)}
    e = {(i, i + 1): bk.FinSetMap.from_dict(o[i], o[i + 1], maps[i]) for i in range(len(objs) - 1)}
    return PersModule(P, bk.FINSET, o, e)


def vec_chain(dims, mats, p=2):
    P = chain(len(dims))
    o = {i: bk.VecObj(d, p) for i, d in enumerate(dims)}
    e = {(i, i + 1): bk.VecMap(o[i], o[i + 1], np.array(mats[i], dtype=np.int64).reshape(dims[i + 1], dims[i]))
         for i in range(len(dims) - 1)}
    return PersModule(P, bk.VecF(p), o, e)


def test_inf_behaviour():
    assert INF > Fraction(10**9) and INF + 1 is INF and 1 + INF is INF
    assert ext_max([Fraction(1), INF]) is INF
    assert ext_max([]) == 0


def test_self_distance_zero(example):
    assert merging_distance(example.F, example.flow, 0, "a0", "a0") == 0


def test_example_distances(example):
    F, G, fl = example.F, example.G, example.flow
    assert [merging_distance(F, fl, i, f"a{i}", f"b{i}") for i in range(3)] == [3, 2, 1]
    assert merging_distance(G, fl, 0, "c0", "d0") == 1
    assert merging_distance(G, fl, 2, "c2", "d2") == 1


def test_two_points_merging_at_three():
    # a and b merge when entering 3 on {0..6}
    labels = [("a", "b")] * 3 + [("a",)] * 4
    maps = [{"a": "a", "b": "b"}] * 2 + [{"a": "a", "b": "a"}] + [{"a": "a"}] * 3
    F = finset_chain(labels, maps)
    fl = floor_shift(F.poset)
    assert [merging_distance(F, fl, i, "a", "b") for i in range(3)] == [3, 2, 1]


def test_unknown_label(example):
    with pytest.raises(ElementNotInObject):
        merging_distance(example.F, example.flow, 0, "a0", "zz")


def test_vector_merging():
    F = vec_chain([2, 2, 1], [[[1, 0], [0, 1]], [[1, 1]]])
    fl = floor_shift(F.poset)
    assert merging_distance(F, fl, 0, [1, 0], [0, 1]) == 2
    assert merging_distance(F, fl, 0, [1, 0], [1, 0]) == 0
    assert merging_distance(F, fl, 0, [1, 0], [0, 0]) is INF


def test_morphism_distance_equal_maps(example):
    f = bk.identity(example.F.obj(0))
    assert morphism_distance(f, f, example.F, example.flow, 0) == 0


def test_morphism_distance_vec_killed_at_two():
    F = vec_chain([1, 1, 0, 0], [[[1]], [], []])
    fl = floor_shift(F.poset)
    A = bk.VecObj(1, 2)
    f = bk.VecMap(A, F.obj(0), [[1]])
    g = bk.VecMap(A, F.obj(0), [[0]])
    assert morphism_distance(f, g, F, fl, 0) == 2


def test_reducing_constants_example(example):
    assert reducing_constants(example.F, example.flow, 1).constants == (2,)


def test_reducing_constants_constant_module():
    F = finset_chain([("x",)] * 4, [{"x": "x"}] * 3)
    assert reducing_constants(F, floor_shift(F.poset), 0).constants == ()


def test_reducing_constants_two_collapses():
    labels = [("a", "b", "c"), ("a", "c"), ("a", "c"), ("a",), ("a",), ("a",)]
    maps = [{"a": "a", "b": "a", "c": "c"}, {"a": "a", "c": "c"}, {"a": "a", "c": "a"}, {"a": "a"}, {"a": "a"}]
    F = finset_chain(labels, maps)
    assert reducing_constants(F, floor_shift(F.poset), 0).constants == (1, 3)


def test_reducing_constants_checks_all_earlier_orbit_points():
    # F[1<=2] collapses a point born at 1, but F[0<=2] is injective: 2 is not reducing at 0
    F = finset_chain([("a",), ("a", "n"), ("a",)], [{"a": "a"}, {"a": "a", "n": "a"}])
    assert reducing_constants(F, floor_shift(F.poset), 0).constants == ()
    assert reducing_constants(F, floor_shift(F.poset), 1).constants == (1,)


def _all_members(obj):
    if isinstance(obj, bk.FinSetObj):
        return list(obj.labels)
    return [list(v) for v in itertools.product(range(obj.field_char), repeat=obj.dim)]


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("backend", ["finset", "vec"])
def test_merging_distances_are_reducing_constants(seed, backend):
    rng = random.Random(seed)
    P, fl = random_frame(rng, rng.choice(["poset", "chain", "grid"]))
    F = random_module(rng, P, backend, 2)
    for q in P.elements:
        D = set(reducing_constants(F, fl, q)) | {0}
        xs = _all_members(F.obj(q))[:8]
        for a, b in itertools.combinations(xs, 2):
            d = merging_distance(F, fl, q, a, b)
            assert d is INF or d in D
