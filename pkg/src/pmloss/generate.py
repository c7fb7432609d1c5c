"""Seeded random posets, flows, modules, and assignments for testing.

Set modules are built from points born at elements and merge events: the
object at q is the set of points born at or below q modulo the merges that
happened at or below q. Vector modules are the analogue with generators and
relations. Both constructions are functorial by design.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import backend as bk
from . import gfp
from .flow import StepFlow, Translation
from .loss import Assignment
from .pmodule import PersModule
from .poset import FinitePoset, build_poset

__all__ = [
    "random_poset", "threshold_flow", "random_finset_module", "random_vec_module",
    "random_assignment", "random_constructible_assignment", "identity_assignment",
]


def random_poset(rng: random.Random, n: int, density: float = 0.3) -> FinitePoset:
    """A random poset on ``0..n-1`` whose element ``n-1`` is a top."""
    rels = [(i, j) for i in range(n - 1) for j in range(i + 1, n - 1) if rng.random() < density]
    rels += [(i, n - 1) for i in range(n - 1)]
    return build_poset(list(range(n)), rels)


def _ranks(P: FinitePoset) -> dict:
    rank = {}
    for q in P.linear_extension():
        rank[q] = max((rank[p] + 1 for p in P.predecessors(q)), default=0)
    return rank


def threshold_flow(P: FinitePoset) -> StepFlow:
    """``T_k p = p`` while ``rank(p) + k < R``, else the top; R is one past the top rank.

    Strict rank growth along ``<`` makes each T_k order-preserving, and the
    rule depends on k only through a threshold, so the family commutes.
    Breakpoints run to R + 1, one past saturation, so every finite loss has a
    breakpoint strictly above it.
    """
    top = _top(P)
    if top is None:
        raise ValueError("threshold flow needs a top element")
    rank = _ranks(P)
    R = max(rank.values()) + 1
    ts = []
    for k in range(R + 2):
        ts.append(Translation(P, {p: (p if rank[p] + k < R else top) for p in P.elements}))
    return StepFlow(P, list(range(R + 2)), ts)


def _top(P: FinitePoset):
    return next((p for p in P.elements if all(P.leq(q, p) for q in P.elements)), None)


def _pick_births(rng, P, n, births):
    pool = list(births) if births is not None else list(P.elements)
    return [rng.choice(pool) for _ in range(n)]


def _join_candidates(P: FinitePoset, a, b) -> list:
    return [q for q in P.elements if P.leq(a, q) and P.leq(b, q)]


def random_finset_module(rng: random.Random, P: FinitePoset, n_points: int = 4, n_merges: int = 3,
                         births: Optional[Sequence] = None, cover_minimal: bool = True,
                         collapse_top: bool = False) -> PersModule:
    """Merge-tree style set module.

    ``cover_minimal`` puts a point at every minimal element so no object is
    empty; ``collapse_top`` merges everything at the top element, which keeps
    all merging distances finite under an Archimedean flow.
    """
    born = _pick_births(rng, P, n_points, births)
    if cover_minimal:
        for m in P.minimal(P.elements):
            born.append(m)
    pool = list(births) if births is not None else list(P.elements)
    merges = []
    for _ in range(n_merges):
        if len(born) < 2:
            break
        x, y = rng.sample(range(len(born)), 2)
        cand = [q for q in _join_candidates(P, born[x], born[y]) if q in pool] or \
            _join_candidates(P, born[x], born[y])
        if cand:
            merges.append((x, y, rng.choice(cand)))
    top = _top(P)
    if collapse_top and top is not None:
        merges += [(0, i, top) for i in range(1, len(born))]
    classes = {}
    for q in P.elements:
        alive = [i for i, b in enumerate(born) if P.leq(b, q)]
        parent = {i: i for i in alive}

        def find(i):
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i
        for x, y, m in merges:
            if P.leq(m, q):
                rx, ry = find(x), find(y)
                if rx != ry:
                    parent[max(rx, ry)] = min(rx, ry)
        classes[q] = {i: find(i) for i in alive}
    objs = {q: bk.FinSetObj(tuple(f"x{r}" for r in sorted(set(c.values())))) for q, c in classes.items()}
    edges = {}
    for p, q in P.hasse_edges:
        src, tgt = objs[p], objs[q]
        mapping = {f"x{r}": f"x{classes[q][r]}" for r in set(classes[p].values())}
        edges[(p, q)] = bk.FinSetMap.from_dict(src, tgt, mapping)
    return PersModule(P, bk.FINSET, objs, edges)


def random_vec_module(rng: random.Random, P: FinitePoset, p: int = 2, n_gens: int = 3, n_rels: int = 2,
                      births: Optional[Sequence] = None, collapse_top: bool = False) -> PersModule:
    """Generators born at elements modulo relations imposed later.

    ``collapse_top`` kills every generator at the top element.
    """
    born = _pick_births(rng, P, n_gens, births)
    pool = list(births) if births is not None else list(P.elements)
    rels = []
    for _ in range(n_rels):
        support = rng.sample(range(n_gens), rng.randint(1, min(2, n_gens)))
        cand = [q for q in P.elements if all(P.leq(born[i], q) for i in support)]
        cand = [q for q in cand if q in pool] or cand
        if not cand:
            continue
        vec = np.zeros(n_gens, dtype=np.int64)
        for i in support:
            vec[i] = rng.randint(1, p - 1)
        rels.append((vec, rng.choice(cand)))
    top = _top(P)
    if collapse_top and top is not None:
        for i in range(n_gens):
            e = np.zeros(n_gens, dtype=np.int64)
            e[i] = 1
            rels.append((e, top))
    info = {}
    for q in P.elements:
        alive = [i for i in range(n_gens) if P.leq(born[i], q)]
        K = [v for v, m in rels if P.leq(m, q)]
        if K:
            red, piv = gfp.rref(np.array(K), p)
            red = red[: len(piv)]
        else:
            red, piv = np.zeros((0, n_gens), dtype=np.int64), []
        basis = [i for i in alive if i not in piv]
        info[q] = (red, piv, basis)

    def coords(q, v):
        red, piv, basis = info[q]
        v = v.copy()
        for row, c in zip(red, piv):
            if v[c]:
                v = np.mod(v - v[c] * row, p)
        return [int(v[i]) for i in basis]

    objs = {q: bk.VecObj(len(info[q][2]), p) for q in P.elements}
    edges = {}
    for a, b in P.hasse_edges:
        cols = []
        for i in info[a][2]:
            e = np.zeros(n_gens, dtype=np.int64)
            e[i] = 1
            cols.append(coords(b, e))
        mat = np.array(cols, dtype=np.int64).T if cols else np.zeros((objs[b].dim, 0), dtype=np.int64)
        edges[(a, b)] = bk.VecMap(objs[a], objs[b], mat.reshape(objs[b].dim, objs[a].dim))
    return PersModule(P, bk.VecF(p), objs, edges)


def _random_map(rng: random.Random, src, tgt):
    if isinstance(src, bk.FinSetObj):
        if len(tgt) == 0:
            if len(src):
                raise ValueError("no map from a nonempty set to the empty set")
            return bk.FinSetMap(src, tgt, ())
        return bk.FinSetMap(src, tgt, tuple(rng.randrange(len(tgt)) for _ in range(len(src))))
    mat = [[rng.randrange(src.field_char) for _ in range(src.dim)] for _ in range(tgt.dim)]
    return bk.VecMap(src, tgt, np.array(mat, dtype=np.int64).reshape(tgt.dim, src.dim))


def random_assignment(rng: random.Random, F: PersModule, G: PersModule, flow: StepFlow, epsilon) -> Assignment:
    S = flow(epsilon)
    P = F.poset
    phi = {p: _random_map(rng, F.obj(p), G.obj(S(p))) for p in P.elements}
    psi = {p: _random_map(rng, G.obj(p), F.obj(S(p))) for p in P.elements}
    return Assignment(F, G, flow, S, phi, psi, epsilon)


def random_constructible_assignment(rng: random.Random, F: PersModule, G: PersModule, flow: StepFlow,
                                    epsilon) -> Assignment:
    """Random maps at cell minima, extended over each cell."""
    from .reduce import extend_constructible, representative_points
    S = flow(epsilon)
    phi = {p: _random_map(rng, F.obj(p), G.obj(S(p))) for p in representative_points(F)}
    psi = {p: _random_map(rng, G.obj(p), F.obj(S(p))) for p in representative_points(G)}
    return extend_constructible(F, G, flow, epsilon, phi, psi)


def identity_assignment(F: PersModule, flow: StepFlow, epsilon=0) -> Assignment:
    """F against itself with ``phi = psi = F[p <= T_eps p]``."""
    S = flow(epsilon)
    maps = {p: F.map_between(p, S(p)) for p in F.poset.elements}
    return Assignment(F, F, flow, S, maps, dict(maps), Fraction(str(epsilon)))
