"""Diagram reduction over linear orders and grids.

Each axis is cut at the critical coordinates of a module into cells: the
singletons ``{x}`` and the open stretches between them. Products of cells are
constant cubes. A cube of F is further split by which cube of G its image
under ``T_eps`` lands in. Every piece is a sub-cube with a least element,
and that minimum stands in for the whole piece. The limit over a diagram
with an initial object is the value there, so ``F(min)`` realizes the
representative object.

A linear order is the one-axis case, with coordinates given by position in
the chain.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import backend as bk
from .errors import (
    NonInvertibleStructureMap,
    NotAGrid,
    NotConstructible,
    NotConstructibleInputShape,
    NotLinear,
    NotLinePreserving,
    ShapeMismatch,
)
from .flow import StepFlow, Translation, is_line_preserving
from .loss import PAR_L, PAR_R, TRI_DOWN, TRI_UP, Assignment, LossReport, _Evaluator
from .pmodule import PersModule, critical_coordinates, critical_values
from .poset import FinitePoset

__all__ = [
    "Cells", "LinearDecomposition", "GridDecomposition", "decompose_linear", "decompose_grid",
    "total_loss_linear", "total_loss_grid", "extend_constructible", "check_constructible",
    "grid_diagram_bound",
]


class _Frame:
    """Coordinates for a linear order (position) or a grid (its coords)."""

    def __init__(self, poset: FinitePoset, linear: bool):
        self.poset = poset
        if linear:
            self.order = poset.chain_order()
            self.shape = (len(self.order),)
            self._pos = {p: (i,) for i, p in enumerate(self.order)}
        else:
            if not poset.is_grid:
                raise NotAGrid("grid reduction needs a grid poset")
            self.order = None
            self.shape = poset.grid_shape
            self._pos = {p: poset.coords(p) for p in poset.elements}
        self._at = {c: p for p, c in self._pos.items()}

    @property
    def k(self):
        return len(self.shape)

    def coords(self, p):
        return self._pos[p]

    def at(self, c):
        return self._at[tuple(c)]

    def axis_maps(self, t: Translation) -> list[tuple]:
        if self.order is not None:
            return [tuple(self._pos[t(p)][0] for p in self.order)]
        v = is_line_preserving(t, self.poset)
        if not v:
            raise NotLinePreserving(f"translation is not line-preserving; witness {v.witness!r}")
        return v.detail

    def criticals(self, F: PersModule) -> list[tuple]:
        if self.order is not None:
            return [tuple(self._pos[c][0] for c in critical_values(F).values)]
        return [critical_coordinates(F, a).values for a in range(self.k)]


@dataclass
class Cells:
    """Per-axis cells cut at critical coordinates.

    ``cells[a]`` lists ``(j, lo, hi)`` inclusive coordinate ranges, j being
    the cell number (even for a critical singleton, odd for a stretch);
    ``cell_of[a][x]`` is the position of coordinate x in that list.
    """

    criticals: list
    cells: list
    cell_of: list

    @classmethod
    def build(cls, shape, criticals) -> "Cells":
        all_cells, all_of = [], []
        for n, crit in zip(shape, criticals):
            crit = sorted(crit)
            cuts, prev = [], -1
            for i, x in enumerate(crit):
                cuts.append((2 * i + 1, prev + 1, x - 1))
                cuts.append((2 * i + 2, x, x))
                prev = x
            cuts.append((2 * len(crit) + 1, prev + 1, n - 1))
            cuts = [c for c in cuts if c[1] <= c[2]]
            of = [None] * n
            for pos, (_, lo, hi) in enumerate(cuts):
                for x in range(lo, hi + 1):
                    of[x] = pos
            all_cells.append(cuts)
            all_of.append(of)
        return cls([tuple(sorted(c)) for c in criticals], all_cells, all_of)

    def cube_of(self, c) -> tuple:
        return tuple(self.cell_of[a][x] for a, x in enumerate(c))

    def cubes(self):
        return itertools.product(*(range(len(c)) for c in self.cells))

    def cube_min(self, I) -> tuple:
        return tuple(self.cells[a][i][1] for a, i in enumerate(I))

    def cube_points(self, I):
        return itertools.product(*(range(self.cells[a][i][1], self.cells[a][i][2] + 1)
                                   for a, i in enumerate(I)))

    def label(self, I) -> tuple:
        return tuple(self.cells[a][i][0] for a, i in enumerate(I))


def _subdivide(cells: Cells, other: Cells, axis_maps) -> dict:
    """Split each cube of ``cells`` by the cube of ``other`` hit under the translation.

    Returns ``{(I, J): min coordinates}`` for nonempty pieces.
    """
    # per axis and per cell: runs of coordinates with the same target cell
    runs = []
    for a, cuts in enumerate(cells.cells):
        per = []
        for _, lo, hi in cuts:
            groups: dict = {}
            for x in range(lo, hi + 1):
                j = other.cell_of[a][axis_maps[a][x]]
                groups.setdefault(j, []).append(x)
            per.append({j: (xs[0], xs[-1]) for j, xs in groups.items()})
        runs.append(per)
    out = {}
    for I in cells.cubes():
        choices = [runs[a][i].items() for a, i in enumerate(I)]
        for combo in itertools.product(*choices):
            J = tuple(j for j, _ in combo)
            out[(I, J)] = tuple(lo for _, (lo, _) in combo)
    return out


def _min_covers(cells: Cells, fr: "_Frame") -> list:
    """Hasse covers among cube minima.

    Minima are ordered exactly as their cube indices, componentwise, so the
    covers step one axis index up by one.
    """
    covers = []
    for I in cells.cubes():
        for a in range(len(I)):
            if I[a] + 1 < len(cells.cells[a]):
                J = I[:a] + (I[a] + 1,) + I[a + 1:]
                covers.append((fr.at(cells.cube_min(I)), fr.at(cells.cube_min(J))))
    return covers


@dataclass
class GridDecomposition:
    """Constant cubes and subdivision pieces for F and G.

    ``B_F``/``B_G`` hold cube minima (elements); ``R_F``/``R_G`` map each
    nonempty subdivision piece ``(I, J)`` to its minimum element;
    ``covers_F``/``covers_G`` are the Hasse covers among the cube minima.
    """

    frame: _Frame = field(repr=False)
    cells_F: Cells
    cells_G: Cells
    B_F: list
    B_G: list
    R_F: dict
    R_G: dict
    covers_F: list
    covers_G: list

    @property
    def E(self) -> int:
        return max((len(c) for c in self.cells_F.criticals + self.cells_G.criticals), default=0)

    def dump(self) -> dict:
        lab_F, lab_G = self.cells_F.label, self.cells_G.label
        return {
            "criticals_F": [list(c) for c in self.cells_F.criticals],
            "criticals_G": [list(c) for c in self.cells_G.criticals],
            "B_F": list(self.B_F),
            "B_G": list(self.B_G),
            "R_F": [[list(lab_F(I)), list(lab_G(J)), m] for (I, J), m in sorted(self.R_F.items())],
            "R_G": [[list(lab_G(J)), list(lab_F(I)), m] for (J, I), m in sorted(self.R_G.items())],
        }


def _decompose(F: PersModule, G: PersModule, S: Translation, linear: bool) -> GridDecomposition:
    if F.poset is not G.poset or S.poset is not F.poset:
        raise ShapeMismatch("modules and translation must share one poset")
    fr = _Frame(F.poset, linear)
    maps = fr.axis_maps(S)
    cF = Cells.build(fr.shape, fr.criticals(F))
    cG = Cells.build(fr.shape, fr.criticals(G))
    B_F = [fr.at(cF.cube_min(I)) for I in cF.cubes()]
    B_G = [fr.at(cG.cube_min(J)) for J in cG.cubes()]
    R_F = {k: fr.at(m) for k, m in _subdivide(cF, cG, maps).items()}
    R_G = {k: fr.at(m) for k, m in _subdivide(cG, cF, maps).items()}
    return GridDecomposition(fr, cF, cG, B_F, B_G, R_F, R_G,
                             _min_covers(cF, fr), _min_covers(cG, fr))


def decompose_grid(F: PersModule, G: PersModule, flow: StepFlow, epsilon) -> GridDecomposition:
    return _decompose(F, G, flow(epsilon), linear=False)


@dataclass
class LinearDecomposition:
    """Interval decomposition of a linear order.

    ``intervals_F[i]`` lists the pieces of the i-th open stretch between
    consecutive critical values of F, each piece a list of elements;
    representatives are piece minima.
    """

    criticals_F: list
    criticals_G: list
    intervals_F: list
    intervals_G: list
    B_F: list
    R_F: list
    B_G: list
    R_G: list
    grid: GridDecomposition = field(repr=False)

    def dump(self) -> dict:
        return {
            "criticals_F": self.criticals_F, "criticals_G": self.criticals_G,
            "intervals_F": self.intervals_F, "intervals_G": self.intervals_G,
            "B_F": self.B_F, "R_F": self.R_F, "B_G": self.B_G, "R_G": self.R_G,
        }


def _pieces(fr: _Frame, cells: Cells, other: Cells, maps) -> list:
    out = []
    for pos, (j, lo, hi) in enumerate(cells.cells[0]):
        if j % 2 == 0:
            continue
        groups: dict = {}
        for x in range(lo, hi + 1):
            groups.setdefault(other.cell_of[0][maps[0][x]], []).append(fr.order[x])
        out.append([groups[k] for k in sorted(groups)])
    return out


def decompose_linear(F: PersModule, G: PersModule, flow: StepFlow, epsilon) -> LinearDecomposition:
    if not F.poset.is_linear():
        raise NotLinear("linear decomposition needs a linear order")
    S = flow(epsilon)
    g = _decompose(F, G, S, linear=True)
    maps = g.frame.axis_maps(S)
    order = g.frame.order
    pos = {p: i for i, p in enumerate(order)}
    byorder = lambda xs: sorted(xs, key=pos.__getitem__)
    return LinearDecomposition(
        criticals_F=[order[x] for x in g.cells_F.criticals[0]],
        criticals_G=[order[x] for x in g.cells_G.criticals[0]],
        intervals_F=_pieces(g.frame, g.cells_F, g.cells_G, maps),
        intervals_G=_pieces(g.frame, g.cells_G, g.cells_F, maps),
        B_F=byorder(g.B_F), R_F=byorder(set(g.R_F.values())),
        B_G=byorder(g.B_G), R_G=byorder(set(g.R_G.values())),
        grid=g,
    )


def check_constructible(asgn: Assignment, dec: GridDecomposition):
    """Raise NotConstructible unless both parallelogram losses vanish inside every cell cube.

    Losses split over chains, so Hasse edges inside a cube suffice.
    """
    fr = dec.frame
    P = asgn.poset
    from .loss import diagram
    for kind, cells in ((PAR_L, dec.cells_F), (PAR_R, dec.cells_G)):
        for p, q in P.hasse_edges:
            if cells.cube_of(fr.coords(p)) != cells.cube_of(fr.coords(q)):
                continue
            f, g, _, _ = diagram(asgn, kind, p, q)
            if f != g:
                raise NotConstructible(f"{kind} loss is nonzero inside a constant cell at {(p, q)!r}",
                                       (kind, (p, q)))


def grid_diagram_bound(E: int, k: int) -> int:
    return 4 * (2 * E + 1) ** (2 * k)


def _reduced_total(asgn: Assignment, dec: GridDecomposition, strategy: str, algorithm: str) -> LossReport:
    check_constructible(asgn, dec)
    ev = _Evaluator(asgn, algorithm)
    for p, q in dec.covers_F:
        ev(PAR_L, p, q)
    for p in sorted(set(dec.R_F.values()), key=asgn.poset.index):
        ev(TRI_DOWN, p)
    for p, q in dec.covers_G:
        ev(PAR_R, p, q)
    for p in sorted(set(dec.R_G.values()), key=asgn.poset.index):
        ev(TRI_UP, p)
    rep = ev.report(strategy)
    rep.counters["representatives_F"] = len(dec.R_F)
    rep.counters["representatives_G"] = len(dec.R_G)
    rep.counters["critical_max"] = dec.E
    rep.counters["diagram_bound"] = grid_diagram_bound(dec.E, dec.frame.k)
    return rep


def total_loss_linear(asgn: Assignment, algorithm: str = "naive") -> LossReport:
    """Loss from consecutive pairs of B and triangles on R, for a linear order."""
    if not asgn.poset.is_linear():
        raise NotLinear("linear strategy needs a linear order")
    g = _decompose(asgn.F, asgn.G, asgn.S, linear=True)
    rep = _reduced_total(asgn, g, "linear", algorithm)
    order = g.frame.order
    pos = {p: i for i, p in enumerate(order)}
    rep.decomposition = {
        "B_F": sorted(g.B_F, key=pos.__getitem__), "B_G": sorted(g.B_G, key=pos.__getitem__),
        "R_F": sorted(set(g.R_F.values()), key=pos.__getitem__),
        "R_G": sorted(set(g.R_G.values()), key=pos.__getitem__),
        "criticals_F": [order[x] for x in g.cells_F.criticals[0]],
        "criticals_G": [order[x] for x in g.cells_G.criticals[0]],
    }
    return rep


def total_loss_grid(asgn: Assignment, algorithm: str = "naive") -> LossReport:
    """Loss from covers among cube minima and triangles at subdivision minima."""
    if not asgn.poset.is_grid:
        raise NotAGrid("grid strategy needs a grid poset")
    g = _decompose(asgn.F, asgn.G, asgn.S, linear=False)
    rep = _reduced_total(asgn, g, "grid", algorithm)
    rep.decomposition = g.dump()
    return rep


def _extend_side(A: PersModule, B: PersModule, S: Translation, cells: Cells, fr: _Frame,
                 given: dict, name: str) -> dict:
    reps = {fr.at(cells.cube_min(I)) for I in cells.cubes()}
    if set(given) != reps:
        missing = sorted(map(repr, reps - set(given)))
        extra = sorted(map(repr, set(given) - reps))
        raise NotConstructibleInputShape(
            f"{name} must be given exactly at the cell minima; missing {missing}, extra {extra}")
    out = {}
    for p in A.poset.elements:
        if p in given:
            out[p] = given[p]
            continue
        m = fr.at(cells.cube_min(cells.cube_of(fr.coords(p))))
        up = A.map_between(m, p)
        if not bk.is_iso(up):
            raise NonInvertibleStructureMap(f"structure map {m!r} -> {p!r} is not invertible")
        out[p] = bk.compose(bk.compose(bk.inverse(up), given[m]), B.map_between(S(m), S(p)))
    return out


def extend_constructible(F: PersModule, G: PersModule, flow: StepFlow, epsilon,
                         phi_B: dict, psi_B: dict) -> Assignment:
    """Extend maps given at cell minima to a constructible assignment.

    For p in a cell with minimum m: ``phi_p = G[Sm <= Sp] phi_m F[m <= p]^-1``;
    psi likewise with the roles of F and G swapped.
    """
    S = flow(epsilon)
    linear = F.poset.is_linear()
    fr = _Frame(F.poset, linear)
    cF = Cells.build(fr.shape, fr.criticals(F))
    cG = Cells.build(fr.shape, fr.criticals(G))
    phi = _extend_side(F, G, S, cF, fr, phi_B, "phi")
    psi = _extend_side(G, F, S, cG, fr, psi_B, "psi")
    return Assignment(F, G, flow, S, phi, psi, epsilon)


def representative_points(F: PersModule) -> list:
    """Cell minima of F: the elements where extension needs a given map."""
    linear = F.poset.is_linear()
    fr = _Frame(F.poset, linear)
    c = Cells.build(fr.shape, fr.criticals(F))
    return [fr.at(c.cube_min(I)) for I in c.cubes()]
