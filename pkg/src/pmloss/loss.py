"""Assignments, diagram losses, total loss, translation, and de-interleaving.

An S-assignment carries ``phi_p: F(p) -> G(S p)`` and ``psi_p: G(p) -> F(S p)``
with no naturality promised. Each diagram loss compares the two composites
of a parallelogram or triangle with the merging distance at their common
target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import backend as bk
from .errors import (
    InfiniteLoss,
    InsufficientFlowRange,
    LossError,
    NoEpsilonLabel,
    NotComparable,
    ShapeMismatch,
    WrongBackend,
)
from .flow import StepFlow, Translation, as_rational, compose_translations
from .metric import INF, ExtDistance, ext_max, morphism_distance, reducing_constants
from .pmodule import PersModule
from .report import Verdict

__all__ = [
    "Assignment", "LossEntry", "LossReport", "PAR_L", "PAR_R", "TRI_DOWN", "TRI_UP",
    "diagram", "loss_par_left", "loss_par_right", "loss_tri_down", "loss_tri_up",
    "loss_par_left_fc", "loss_par_left_vec", "diagram_loss", "search_fc", "search_vec",
    "total_loss", "translate_assignment", "deinterleave", "verify_interleaving", "bound",
    "search_bound",
]

PAR_L, PAR_R, TRI_DOWN, TRI_UP = "ParL", "ParR", "TriDown", "TriUp"
KINDS = (PAR_L, PAR_R, TRI_DOWN, TRI_UP)


class Assignment:
    """An S-assignment of F and G.

    ``epsilon`` is the nominal flow amount: ``S = T_eps`` for a plain
    assignment, ``S = T_delta T_eps <= T_{eps+delta}`` after a translation.
    """

    def __init__(self, F: PersModule, G: PersModule, flow: StepFlow, S: Translation,
                 phi: dict, psi: dict, epsilon=None):
        P = F.poset
        if G.poset is not P or flow.poset is not P or S.poset is not P:
            raise ShapeMismatch("F, G, flow and S must share one poset")
        if F.backend != G.backend:
            raise WrongBackend("F and G use different backends")
        self.F, self.G, self.flow, self.S = F, G, flow, S
        self.epsilon = None if epsilon is None else as_rational(epsilon)
        self.phi, self.psi = {}, {}
        for p in P.elements:
            if p not in phi or p not in psi:
                raise ShapeMismatch(f"assignment is missing a component at {p!r}")
            f, g = phi[p], psi[p]
            if f.source != F.obj(p) or f.target != G.obj(S(p)):
                raise ShapeMismatch(f"phi at {p!r} must map F({p!r}) to G({S(p)!r})")
            if g.source != G.obj(p) or g.target != F.obj(S(p)):
                raise ShapeMismatch(f"psi at {p!r} must map G({p!r}) to F({S(p)!r})")
            self.phi[p], self.psi[p] = f, g

    @classmethod
    def at_epsilon(cls, F, G, flow, epsilon, phi, psi) -> "Assignment":
        return cls(F, G, flow, flow(epsilon), phi, psi, epsilon)

    @property
    def poset(self):
        return self.F.poset

    @property
    def backend(self):
        return self.F.backend

    def __repr__(self):
        return f"Assignment(epsilon={self.epsilon}, {len(self.poset)} elements)"


def diagram(asgn: Assignment, kind: str, p, q=None):
    """The two composites of a diagram and where they are compared.

    Returns ``(f, g, module, point)`` with ``f, g: source -> module(point)``.
    """
    F, G, S = asgn.F, asgn.G, asgn.S
    if kind in (PAR_L, PAR_R):
        if not asgn.poset.leq(p, q):
            raise NotComparable(p, q)
        A, B, m = (F, G, asgn.phi) if kind == PAR_L else (G, F, asgn.psi)
        f = bk.compose(A.map_between(p, q), m[q])
        g = bk.compose(m[p], B.map_between(S(p), S(q)))
        return f, g, B, S(q)
    if kind in (TRI_DOWN, TRI_UP):
        A, m1, m2 = (F, asgn.phi, asgn.psi) if kind == TRI_DOWN else (G, asgn.psi, asgn.phi)
        ssp = S(S(p))
        f = A.map_between(p, ssp)
        g = bk.compose(m1[p], m2[S(p)])
        return f, g, A, ssp
    raise ValueError(f"unknown diagram kind {kind!r}")


def loss_par_left(asgn, p, q) -> ExtDistance:
    f, g, M, pt = diagram(asgn, PAR_L, p, q)
    return morphism_distance(f, g, M, asgn.flow, pt)


def loss_par_right(asgn, p, q) -> ExtDistance:
    f, g, M, pt = diagram(asgn, PAR_R, p, q)
    return morphism_distance(f, g, M, asgn.flow, pt)


def loss_tri_down(asgn, p) -> ExtDistance:
    f, g, M, pt = diagram(asgn, TRI_DOWN, p)
    return morphism_distance(f, g, M, asgn.flow, pt)


def loss_tri_up(asgn, p) -> ExtDistance:
    f, g, M, pt = diagram(asgn, TRI_UP, p)
    return morphism_distance(f, g, M, asgn.flow, pt)


# -- binary searches over reducing constants ----------------------------

def _gammas(deltas) -> list[Fraction]:
    """``0 = g_0 < d_1 < g_1 < ... < d_m < g_m`` with midpoints in between."""
    m = len(deltas)
    gs = [Fraction(0)]
    for i in range(1, m):
        gs.append((deltas[i - 1] + deltas[i]) / 2)
    if m:
        gs.append(deltas[-1] + 1)
    return gs


def search_bound(m: int) -> int:
    """Iteration budget ``ceil(log2(m + 1)) + 1`` for a search over m constants."""
    return math.ceil(math.log2(m + 1)) + 1


def search_fc(f, g, M: PersModule, flow: StepFlow, point, deltas, stats: Optional[dict] = None) -> ExtDistance:
    """Finite-set binary search keeping the elements whose images still differ."""
    if not isinstance(f, bk.FinSetMap):
        raise WrongBackend("the set search needs FinSet maps")
    deltas = tuple(deltas)
    m = len(deltas)
    gam = _gammas(deltas)
    lo, hi = 0, m + 1
    alive = list(range(len(f.source)))
    it = 0
    while lo != hi:
        it += 1
        i = (hi + lo) // 2
        h = M.map_between(point, flow(gam[i])(point)).table
        nxt = [a for a in alive if h[f.table[a]] != h[g.table[a]]]
        if not nxt:
            hi = i
        else:
            lo = i + 1
            alive = nxt
    if stats is not None:
        stats["iterations"] = it
        stats["m"] = m
    if lo == 0:
        return Fraction(0)
    if lo <= m:
        return deltas[lo - 1]
    return INF


def search_vec(f, g, M: PersModule, flow: StepFlow, point, deltas, stats: Optional[dict] = None) -> ExtDistance:
    """Linear binary search shrinking ``V = Im(f - g)`` along the flow."""
    if not isinstance(f, bk.VecMap):
        raise WrongBackend("the linear search needs VecF maps")
    deltas = tuple(deltas)
    m = len(deltas)
    gam = _gammas(deltas)
    V = bk.image_basis(bk.difference(f, g))
    it = 0
    if V.shape[0] == 0:
        if stats is not None:
            stats["iterations"] = 0
            stats["m"] = m
        return Fraction(0)
    lo, hi = 1, m + 1
    while lo != hi:
        it += 1
        i = (hi + lo) // 2
        start = flow(gam[lo - 1])(point)
        N = M.map_between(start, flow(gam[i])(point))
        V2 = bk.restrict_image(N, V)
        if V2.shape[0] == 0:
            hi = i
        else:
            lo = i + 1
            V = V2
    if stats is not None:
        stats["iterations"] = it
        stats["m"] = m
    return deltas[lo - 1] if lo <= m else INF


def _search(algorithm, f, g, M, flow, point, D, stats):
    if algorithm == "fc":
        return search_fc(f, g, M, flow, point, D, stats)
    if algorithm == "vec":
        return search_vec(f, g, M, flow, point, D, stats)
    raise ValueError(f"unknown search algorithm {algorithm!r}")


def loss_par_left_fc(asgn, p, q, D=None, stats: Optional[dict] = None) -> ExtDistance:
    f, g, M, pt = diagram(asgn, PAR_L, p, q)
    if D is None:
        D = reducing_constants(M, asgn.flow, pt)
    return search_fc(f, g, M, asgn.flow, pt, tuple(D), stats)


def loss_par_left_vec(asgn, p, q, D=None, stats: Optional[dict] = None) -> ExtDistance:
    f, g, M, pt = diagram(asgn, PAR_L, p, q)
    if D is None:
        D = reducing_constants(M, asgn.flow, pt)
    return search_vec(f, g, M, asgn.flow, pt, tuple(D), stats)


# -- reports ------------------------------------------------------------

@dataclass(frozen=True)
class LossEntry:
    kind: str
    indices: tuple
    value: ExtDistance


@dataclass
class LossReport:
    entries: list
    total: ExtDistance
    strategy: str
    algorithm: str = "naive"
    epsilon: Optional[Fraction] = None
    counters: dict = field(default_factory=dict)
    searches: list = field(default_factory=list)
    decomposition: Optional[dict] = None

    @property
    def bound(self) -> Optional[ExtDistance]:
        if self.epsilon is None:
            return None
        return self.epsilon + self.total if self.total is not INF else INF

    def nonzero(self) -> dict:
        return {(e.kind, e.indices): e.value for e in self.entries if e.value != 0}

    def by_kind(self, kind: str) -> dict:
        return {e.indices: e.value for e in self.entries if e.kind == kind}


class _Evaluator:
    """Evaluates diagram losses with one algorithm, caching reducing sets."""

    def __init__(self, asgn: Assignment, algorithm: str):
        if algorithm == "auto":
            algorithm = "fc" if isinstance(asgn.backend, bk.FinSet) else "vec"
        if algorithm == "fc" and not isinstance(asgn.backend, bk.FinSet):
            raise WrongBackend("algorithm 'fc' needs the FinSet backend")
        if algorithm == "vec" and not isinstance(asgn.backend, bk.VecF):
            raise WrongBackend("algorithm 'vec' needs the VecF backend")
        if algorithm not in ("naive", "fc", "vec"):
            raise ValueError(f"unknown algorithm {algorithm!r}")
        self.asgn = asgn
        self.algorithm = algorithm
        self.entries: list[LossEntry] = []
        self.searches: list[tuple[int, int]] = []
        self.counts = {k: 0 for k in KINDS}
        self._D: dict = {}

    def reducing(self, M, pt):
        key = (id(M), pt)
        if key not in self._D:
            self._D[key] = reducing_constants(M, self.asgn.flow, pt).constants
        return self._D[key]

    def __call__(self, kind, p, q=None) -> ExtDistance:
        f, g, M, pt = diagram(self.asgn, kind, p, q)
        if self.algorithm == "naive":
            v = morphism_distance(f, g, M, self.asgn.flow, pt)
        else:
            stats: dict = {}
            v = _search(self.algorithm, f, g, M, self.asgn.flow, pt, self.reducing(M, pt), stats)
            self.searches.append((stats["iterations"], stats["m"]))
        idx = (p,) if q is None else (p, q)
        self.entries.append(LossEntry(kind, idx, v))
        self.counts[kind] += 1
        return v

    def report(self, strategy, **extra) -> LossReport:
        total = ext_max(e.value for e in self.entries)
        counters = {
            "parallelograms_left": self.counts[PAR_L],
            "parallelograms_right": self.counts[PAR_R],
            "triangles_down": self.counts[TRI_DOWN],
            "triangles_up": self.counts[TRI_UP],
            "diagrams": len(self.entries),
            "binary_searches": len(self.searches),
            "search_iterations": sum(i for i, _ in self.searches),
            "search_iterations_max": max((i for i, _ in self.searches), default=0),
            "search_within_bound": all(i <= search_bound(m) for i, m in self.searches),
        }
        return LossReport(self.entries, total, strategy, self.algorithm, self.asgn.epsilon,
                          counters, list(self.searches), **extra)


def diagram_loss(asgn, kind, p, q=None, algorithm="naive") -> ExtDistance:
    return _Evaluator(asgn, algorithm)(kind, p, q)


def total_loss(asgn: Assignment, strategy: str = "predecessor", algorithm: str = "naive") -> LossReport:
    """Max of all diagram losses.

    ``naive`` evaluates parallelograms on every pair p < q, ``predecessor``
    only on Hasse edges; both evaluate triangles at every element. ``linear``
    and ``grid`` use the interval and cube reductions.
    """
    if strategy == "linear":
        from .reduce import total_loss_linear
        return total_loss_linear(asgn, algorithm=algorithm)
    if strategy == "grid":
        from .reduce import total_loss_grid
        return total_loss_grid(asgn, algorithm=algorithm)
    P = asgn.poset
    ev = _Evaluator(asgn, algorithm)
    if strategy == "naive":
        pairs = list(P.comparable_pairs(strict=True))
    elif strategy == "predecessor":
        pairs = list(P.hasse_edges)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    for p, q in pairs:
        ev(PAR_L, p, q)
        ev(PAR_R, p, q)
    for p in P.elements:
        ev(TRI_DOWN, p)
        ev(TRI_UP, p)
    return ev.report(strategy)


# -- translation, interleavings, bounds ---------------------------------

def translate_assignment(asgn: Assignment, R: Translation, delta=None) -> Assignment:
    """The R-translation: ``phi'_p = G[Sp <= RSp] phi_p``, ``psi'_p = F[Sp <= RSp] psi_p``.

    ``delta`` is the flow amount of R when known; the new nominal epsilon is
    then ``epsilon + delta``.
    """
    F, G, S = asgn.F, asgn.G, asgn.S
    RS = compose_translations(R, S)
    phi, psi = {}, {}
    for p in asgn.poset.elements:
        phi[p] = bk.compose(asgn.phi[p], G.map_between(S(p), RS(p)))
        psi[p] = bk.compose(asgn.psi[p], F.map_between(S(p), RS(p)))
    eps = None
    if asgn.epsilon is not None and delta is not None:
        eps = asgn.epsilon + as_rational(delta)
    return Assignment(F, G, asgn.flow, RS, phi, psi, eps)


def verify_interleaving(asgn: Assignment) -> Verdict:
    """Exact naturality on all comparable pairs and both triangle identities.

    ``witness`` lists every failing diagram as ``(kind, indices)``.
    """
    P = asgn.poset
    bad = []
    for p, q in P.comparable_pairs(strict=True):
        for kind in (PAR_L, PAR_R):
            f, g, _, _ = diagram(asgn, kind, p, q)
            if f != g:
                bad.append((kind, (p, q)))
    for p in P.elements:
        for kind in (TRI_DOWN, TRI_UP):
            f, g, _, _ = diagram(asgn, kind, p)
            if f != g:
                bad.append((kind, (p,)))
    return Verdict(not bad, bad)


def _saturation_certificate(asgn: Assignment, L) -> dict:
    flow = asgn.flow
    top = flow.translations[-1]
    saturated = all(compose_translations(top, t) == top for t in flow.translations)
    moved = translate_assignment(asgn, top, flow.horizon)
    return {
        "horizon": flow.horizon,
        "loss": L,
        "saturated": saturated,
        "horizon_translation_verifies": verify_interleaving(moved).ok,
    }


def deinterleave(asgn: Assignment, strategy: str = "predecessor") -> tuple[Assignment, Fraction]:
    """Translate by the least breakpoint above the loss, yielding an interleaving.

    Already-interleaved inputs come back unchanged with delta 0.
    """
    L = total_loss(asgn, strategy).total
    if L is INF:
        raise InfiniteLoss("loss is infinite; no translation can interleave")
    if L == 0:
        return asgn, Fraction(0)
    flow = asgn.flow
    above = [b for b in flow.breakpoints if b > L]
    if not above:
        raise InsufficientFlowRange(
            f"no breakpoint exceeds the loss {L}; the flow stops at {flow.horizon}",
            _saturation_certificate(asgn, L))
    delta = above[0]
    out = translate_assignment(asgn, flow(delta), delta)
    if not verify_interleaving(out).ok:
        raise LossError("translated assignment failed to interleave; is the flow commutative?")
    return out, delta


def bound(asgn: Assignment, strategy: str = "predecessor", algorithm: str = "naive") -> ExtDistance:
    """``epsilon + L``, an upper bound on the interleaving distance (not claimed tight)."""
    if asgn.epsilon is None:
        raise NoEpsilonLabel("assignment carries no epsilon label")
    total = total_loss(asgn, strategy, algorithm).total
    return INF if total is INF else asgn.epsilon + total
