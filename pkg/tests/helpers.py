"""Seeded instance builders shared by the test modules."""

import random
from pathlib import Path

from pmloss import generate as gen
from pmloss import io
from pmloss.flow import floor_shift, grid_flow
from pmloss.poset import chain, grid

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
VALID_FIXTURES = ["example_F_G.json", "linear_constructible.json", "grid_constructible.json", "vec_gf3.json"]
PRIMES = (2, 3, 5)


def load(name):
    return io.load_problem(FIXTURES / name)


def random_frame(rng, shape):
    """A poset with a commutative flow: random poset, chain, or 2-d grid."""
    if shape == "poset":
        P = gen.random_poset(rng, rng.randint(3, 7), rng.choice([0.2, 0.4, 0.6]))
        return P, gen.threshold_flow(P)
    if shape == "chain":
        P = chain(rng.randint(3, 8))
        return P, floor_shift(P)
    P = grid([rng.randint(2, 4), rng.randint(2, 4)])
    return P, grid_flow(P)


def random_module(rng, P, backend, p=2, **kw):
    top = kw.pop("collapse_top", rng.random() < 0.7)
    if backend == "finset":
        return gen.random_finset_module(rng, P, n_points=rng.randint(1, 4), n_merges=rng.randint(0, 4),
                                        collapse_top=top, **kw)
    return gen.random_vec_module(rng, P, p=p, n_gens=rng.randint(1, 4), n_rels=rng.randint(0, 3),
                                 collapse_top=top, **kw)


def random_instance(seed, backend, shape=None):
    """(F, G, flow, assignment) for one seed."""
    rng = random.Random(seed)
    shape = shape or rng.choice(["poset", "chain", "grid"])
    P, flow = random_frame(rng, shape)
    p = rng.choice(PRIMES)
    F = random_module(rng, P, backend, p)
    G = random_module(rng, P, backend, p)
    eps = rng.choice(flow.breakpoints[:3])
    return F, G, flow, gen.random_assignment(rng, F, G, flow, eps)


def constructible_instance(seed, backend, shape):
    """Constructible assignment over a chain ("linear") or a grid of the given shape tuple."""
    rng = random.Random(seed)
    if shape == "linear":
        P = chain(rng.randint(3, 9))
        flow = floor_shift(P)
    else:
        P = grid(list(shape))
        flow = grid_flow(P)
    p = rng.choice(PRIMES)
    births = rng.sample(list(P.elements), min(len(P), rng.randint(1, 3)))
    kw = {"births": births, "collapse_top": True}
    F = random_module(rng, P, backend, p, **kw)
    G = random_module(rng, P, backend, p, **kw)
    eps = rng.choice(flow.breakpoints[:3])
    return gen.random_constructible_assignment(rng, F, G, flow, eps)
