import itertools
import random

from hypothesis import given, settings, strategies as st

from pmloss.errors import InfiniteLoss, InsufficientFlowRange
from pmloss.flow import validate_flow
from pmloss.loss import (loss_par_left, loss_par_right, total_loss, translate_assignment,
                         verify_interleaving, deinterleave)
from pmloss.metric import INF, merging_distance
from pmloss.pmodule import validate_module
from helpers import random_frame, random_instance, random_module
from test_loss import _functor_inequalities
from test_metric import _all_members

seeds = st.integers(0, 10**6)
backends = st.sampled_from(["finset", "vec"])
shapes = st.sampled_from(["poset", "chain", "grid"])
settings.register_profile("pmloss", deadline=None, max_examples=40)
settings.load_profile("pmloss")


@given(seeds, backends, shapes)
def test_generated_frames_and_modules_are_valid(seed, backend, shape):
    rng = random.Random(seed)
    P, fl = random_frame(rng, shape)
    assert validate_flow(fl).ok
    assert validate_module(random_module(rng, P, backend, rng.choice([2, 3]))).ok


@given(seeds, backends, shapes)
def test_ultrametric(seed, backend, shape):
    rng = random.Random(seed)
    P, fl = random_frame(rng, shape)
    F = random_module(rng, P, backend, 2)
    for q in P.elements:
        xs = _all_members(F.obj(q))[:6]
        d = {(i, j): merging_distance(F, fl, q, xs[i], xs[j]) for i in range(len(xs)) for j in range(len(xs))}
        for i, j, k in itertools.product(range(len(xs)), repeat=3):
            assert d[i, i] == 0 and d[i, j] == d[j, i]
            assert d[i, k] <= max(d[i, j], d[j, k])


@given(seeds, backends, shapes)
def test_parallelogram_losses_split_along_chains(seed, backend, shape):
    F, G, fl, A = random_instance(seed, backend, shape)
    P = A.poset
    for p, q, r in itertools.permutations(P.elements, 3):
        if P.lt(p, q) and P.lt(q, r):
            assert loss_par_left(A, p, r) <= max(loss_par_left(A, p, q), loss_par_left(A, q, r))
            assert loss_par_right(A, p, r) <= max(loss_par_right(A, p, q), loss_par_right(A, q, r))


@given(seeds, backends, shapes, st.integers(0, 3))
def test_translation_is_monotone(seed, backend, shape, k):
    F, G, fl, A = random_instance(seed, backend, shape)
    _functor_inequalities(A, fl.translations[min(k, len(fl.translations) - 1)])


@given(seeds, backends, shapes)
def test_fast_searches_match_naive(seed, backend, shape):
    F, G, fl, A = random_instance(seed, backend, shape)
    naive = total_loss(A, "naive", "naive")
    fast = total_loss(A, "naive", "auto")
    assert [e.value for e in naive.entries] == [e.value for e in fast.entries]
    assert fast.counters["search_within_bound"]


@given(seeds, backends, shapes)
def test_predecessor_equals_naive(seed, backend, shape):
    F, G, fl, A = random_instance(seed, backend, shape)
    assert total_loss(A, "predecessor").total == total_loss(A, "naive").total


@given(seeds, backends, shapes)
def test_deinterleave_sound(seed, backend, shape):
    F, G, fl, A = random_instance(seed, backend, shape)
    try:
        B, delta = deinterleave(A)
    except (InfiniteLoss, InsufficientFlowRange):
        assert total_loss(A).total is INF or total_loss(A).total >= fl.horizon
        return
    assert verify_interleaving(B).ok
    assert delta > total_loss(A).total or delta == 0
