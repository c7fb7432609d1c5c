"""JSON problem and report files.

Element ids are JSON ints, strings, or arrays (read back as tuples). Anything
keyed by element is a list of ``[element, value]`` records, since JSON object
keys must be strings. Rationals are ``"n/d"`` strings and infinity is
``"inf"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Optional

from . import backend as bk
from .errors import PmlossError, ProblemFileError
from .flow import GridFlow, StepFlow, Translation, as_rational, floor_shift
from .loss import Assignment, LossReport
from .metric import INF
from .pmodule import PersModule
from .poset import FinitePoset, build_poset, chain, grid

__all__ = ["Problem", "parse_problem", "load_problem", "dumps", "to_json", "element_id",
           "module_to_json", "assignment_to_json", "report_to_json", "problem_to_json"]


def element_id(x):
    if isinstance(x, list):
        return tuple(element_id(y) for y in x)
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return x
    raise TypeError(f"element ids must be ints, strings or arrays, got {x!r}")


def to_json(x):
    """Convert library values into JSON-ready data."""
    if x is INF:
        return "inf"
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, tuple):
        return [to_json(y) for y in x]
    if isinstance(x, list):
        return [to_json(y) for y in x]
    if isinstance(x, dict):
        return {str(k): to_json(v) for k, v in x.items()}
    if hasattr(x, "tolist"):
        return x.tolist()
    return x


def dumps(data) -> str:
    return json.dumps(to_json(data), sort_keys=True, indent=2) + "\n"


@dataclass
class Problem:
    poset: FinitePoset
    flow: StepFlow
    backend: Any
    F: PersModule
    G: PersModule
    epsilon: Optional[Fraction] = None
    assignment: Optional[Assignment] = None
    partial_phi: dict = field(default_factory=dict)
    partial_psi: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    raw: dict = field(default_factory=dict)


def _get(d, key, loc):
    if not isinstance(d, dict):
        raise ProblemFileError(loc, "expected an object")
    if key not in d:
        raise ProblemFileError(f"{loc}.{key}" if loc else key, "missing field")
    return d[key]


def _records(seq, loc):
    if not isinstance(seq, list):
        raise ProblemFileError(loc, "expected a list of [element, value] records")
    out = {}
    for i, rec in enumerate(seq):
        if not isinstance(rec, list) or len(rec) != 2:
            raise ProblemFileError(f"{loc}[{i}]", "expected [element, value]")
        try:
            out[element_id(rec[0])] = rec[1]
        except TypeError as e:
            raise ProblemFileError(f"{loc}[{i}]", str(e)) from None
    return out


def _parse_poset(d, loc="poset") -> FinitePoset:
    try:
        if isinstance(d, dict) and "grid" in d:
            return grid(d["grid"])
        if isinstance(d, dict) and "chain" in d:
            return chain(int(d["chain"]))
        els = [element_id(e) for e in _get(d, "elements", loc)]
        rels = [(element_id(a), element_id(b)) for a, b in d.get("relations", [])]
        return build_poset(els, rels)
    except ProblemFileError:
        raise
    except (TypeError, ValueError) as e:
        raise ProblemFileError(loc, str(e)) from None


def _parse_flow(d, P: FinitePoset, loc="flow") -> StepFlow:
    gen = d.get("generator") if isinstance(d, dict) else None
    try:
        if gen == "floor_shift":
            return floor_shift(P, d.get("horizon"), d.get("step", 1))
        if gen == "grid":
            axes = _get(d, "axes", loc)
            if not P.is_grid or len(axes) != len(P.grid_shape):
                raise ProblemFileError(f"{loc}.axes", "need one axis flow per grid axis")
            flows = [_parse_flow(a, chain(n), f"{loc}.axes[{i}]")
                     for i, (a, n) in enumerate(zip(axes, P.grid_shape))]
            return GridFlow(P, flows)
        if gen is not None:
            raise ProblemFileError(f"{loc}.generator", f"unknown generator {gen!r}")
        bps = _get(d, "breakpoints", loc)
        maps = _get(d, "maps", loc)
        if len(maps) != len(bps):
            raise ProblemFileError(f"{loc}.maps", "need one map per breakpoint")
        ts = []
        for i, m in enumerate(maps):
            table = {k: element_id(v) for k, v in _records(m, f"{loc}.maps[{i}]").items()}
            ts.append(Translation(P, table))
        return StepFlow(P, [as_rational(b) for b in bps], ts)
    except ProblemFileError:
        raise
    except (PmlossError, TypeError, ValueError, ZeroDivisionError) as e:
        raise ProblemFileError(loc, str(e)) from None


def _make_map(B, src, tgt, data, loc):
    try:
        if isinstance(B, bk.FinSet):
            if not isinstance(data, dict):
                raise ProblemFileError(loc, "set maps are objects from source to target labels")
            return bk.FinSetMap.from_dict(src, tgt, data)
        return bk.VecMap(src, tgt, data if data else [[0] * src.dim for _ in range(tgt.dim)])
    except ProblemFileError:
        raise
    except (PmlossError, TypeError, ValueError) as e:
        raise ProblemFileError(loc, str(e)) from None


def _parse_module(d, P: FinitePoset, B, loc) -> PersModule:
    objs_raw = _records(_get(d, "objects", loc), f"{loc}.objects")
    objs = {}
    for p, v in objs_raw.items():
        try:
            objs[p] = B.make_object(v)
        except (TypeError, ValueError) as e:
            raise ProblemFileError(f"{loc}.objects[{p!r}]", str(e)) from None
    edges = {}
    maps = _get(d, "maps", loc)
    if not isinstance(maps, list):
        raise ProblemFileError(f"{loc}.maps", "expected a list of [p, q, map] records")
    for i, rec in enumerate(maps):
        if not isinstance(rec, list) or len(rec) != 3:
            raise ProblemFileError(f"{loc}.maps[{i}]", "expected [p, q, map]")
        p, q = element_id(rec[0]), element_id(rec[1])
        if p not in objs or q not in objs:
            raise ProblemFileError(f"{loc}.maps[{i}]", "edge mentions an element without an object")
        edges[(p, q)] = _make_map(B, objs[p], objs[q], rec[2], f"{loc}.maps[{i}]")
    try:
        return PersModule(P, B, objs, edges)
    except PmlossError as e:
        raise ProblemFileError(loc, str(e)) from None


def _parse_components(d, F, G, S, name, loc, partial=False):
    recs = _records(d.get(name, []), f"{loc}.{name}")
    src, tgt = (F, G) if name.startswith("phi") else (G, F)
    out = {}
    for p, data in recs.items():
        if p not in F.poset:
            raise ProblemFileError(f"{loc}.{name}", f"unknown element {p!r}")
        out[p] = _make_map(F.backend, src.obj(p), tgt.obj(S(p)), data, f"{loc}.{name}[{p!r}]")
    return out


def parse_problem(data: dict, field_char: Optional[int] = None) -> Problem:
    if not isinstance(data, dict):
        raise ProblemFileError("", "top level must be an object")
    P = _parse_poset(_get(data, "poset", ""))
    flow = _parse_flow(_get(data, "flow", ""), P)
    kind = data.get("backend", "finset")
    if kind == "finset":
        B = bk.FINSET
    elif kind == "vec":
        try:
            B = bk.VecF(int(field_char or data.get("field_char", 2)))
        except ValueError as e:
            raise ProblemFileError("field_char", str(e)) from None
    else:
        raise ProblemFileError("backend", f"unknown backend {kind!r}")
    F = _parse_module(_get(data, "F", ""), P, B, "F")
    G = _parse_module(_get(data, "G", ""), P, B, "G")
    prob = Problem(P, flow, B, F, G, options=dict(data.get("options", {})), raw=data)
    a = data.get("assignment")
    if a is not None:
        eps = a.get("epsilon")
        if eps is None:
            raise ProblemFileError("assignment.epsilon", "missing field")
        try:
            prob.epsilon = as_rational(eps)
        except (ValueError, ZeroDivisionError) as e:
            raise ProblemFileError("assignment.epsilon", str(e)) from None
        S = flow(prob.epsilon)
        phi = _parse_components(a, F, G, S, "phi", "assignment")
        psi = _parse_components(a, F, G, S, "psi", "assignment")
        if len(phi) == len(P) and len(psi) == len(P):
            try:
                prob.assignment = Assignment(F, G, flow, S, phi, psi, prob.epsilon)
            except PmlossError as e:
                raise ProblemFileError("assignment", str(e)) from None
        else:
            prob.partial_phi, prob.partial_psi = phi, psi
    return prob


def load_problem(path, field_char: Optional[int] = None) -> Problem:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"line {e.lineno} column {e.colno}", e.msg) from None
    return parse_problem(data, field_char)


# -- writers ------------------------------------------------------------

def _map_json(m):
    if isinstance(m, bk.FinSetMap):
        return m.as_dict()
    return m.matrix.tolist()


def _obj_json(o):
    return list(o.labels) if isinstance(o, bk.FinSetObj) else o.dim


def module_to_json(F: PersModule) -> dict:
    P = F.poset
    return {
        "objects": [[to_json(p), _obj_json(F.obj(p))] for p in P.elements],
        "maps": [[to_json(p), to_json(q), _map_json(F.edge_maps[(p, q)])] for p, q in P.hasse_edges],
    }


def assignment_to_json(asgn: Assignment) -> dict:
    P = asgn.poset
    out = {
        "phi": [[to_json(p), _map_json(asgn.phi[p])] for p in P.elements],
        "psi": [[to_json(p), _map_json(asgn.psi[p])] for p in P.elements],
        "S": [[to_json(p), to_json(asgn.S(p))] for p in P.elements],
    }
    if asgn.epsilon is not None:
        out["epsilon"] = str(asgn.epsilon)
    return out


def problem_to_json(prob: Problem, asgn: Optional[Assignment] = None) -> dict:
    """A problem dict with the given assignment replacing the stored one."""
    out = {k: v for k, v in prob.raw.items() if k != "assignment"}
    asgn = asgn or prob.assignment
    if asgn is not None:
        a = assignment_to_json(asgn)
        a.pop("S")
        out["assignment"] = a
    return out


def report_to_json(rep: LossReport) -> dict:
    out = {
        "strategy": rep.strategy,
        "algorithm": rep.algorithm,
        "total": rep.total,
        "epsilon": rep.epsilon,
        "bound": rep.bound,
        "counters": rep.counters,
        "nonzero": [
            {"kind": e.kind, "indices": list(e.indices), "value": e.value}
            for e in rep.entries if e.value != 0
        ],
    }
    if rep.decomposition is not None:
        out["decomposition"] = rep.decomposition
    return to_json(out)
