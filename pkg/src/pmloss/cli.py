"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 computation error.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import io
from .errors import PmlossError, ProblemFileError
from .flow import validate_flow
from .loss import deinterleave, total_loss, verify_interleaving
from .metric import merging_distance, reducing_constants
from .pmodule import validate_module
from .reduce import check_constructible, extend_constructible, _decompose

OK, INVALID, FAILED = 0, 1, 2


def _emit(data, out):
    text = io.dumps(data)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error(exc) -> dict:
    d = {"ok": False, "error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, ProblemFileError):
        d["location"] = exc.location
    for attr in ("witness", "certificate"):
        if getattr(exc, attr, None) is not None:
            d[attr] = getattr(exc, attr)
    return d


def _load(args):
    return io.load_problem(args.path, args.field)


def _validation(prob) -> dict:
    out = {}
    for name, rep in (("flow", validate_flow(prob.flow)),
                      ("F", validate_module(prob.F)),
                      ("G", validate_module(prob.G))):
        out[name] = {k: {"ok": v.ok, "witness": v.witness} for k, v in rep.checks.items()}
    out["assignment"] = {"present": prob.assignment is not None,
                         "partial": bool(prob.partial_phi or prob.partial_psi)}
    return out


def _all_ok(val) -> bool:
    return all(v["ok"] for sec in ("flow", "F", "G") for v in val[sec].values())


def cmd_validate(args) -> int:
    try:
        prob = _load(args)
    except PmlossError as e:
        _emit(_error(e), args.output)
        return INVALID
    val = _validation(prob)
    ok = _all_ok(val)
    _emit({"ok": ok, "validation": val}, args.output)
    return OK if ok else INVALID


def _prepare(args):
    """Load and validate; returns (problem, None) or (None, exit code)."""
    try:
        prob = _load(args)
    except PmlossError as e:
        _emit(_error(e), args.output)
        return None, INVALID
    val = _validation(prob)
    if not _all_ok(val):
        _emit({"ok": False, "validation": val}, args.output)
        return None, INVALID
    return prob, None


def _need_assignment(prob, args):
    if prob.assignment is None:
        _emit({"ok": False, "error": "MissingAssignment",
               "message": "problem has no complete assignment"}, args.output)
        return False
    return True


def cmd_loss(args) -> int:
    prob, code = _prepare(args)
    if prob is None:
        return code
    if not _need_assignment(prob, args):
        return INVALID
    strategy = args.strategy or prob.options.get("strategy", "predecessor")
    algorithm = args.algorithm or prob.options.get("algorithm", "naive")
    try:
        rep = total_loss(prob.assignment, strategy, algorithm)
        out = {"ok": True, "report": io.report_to_json(rep)}
        if args.check_oracle:
            oracle = total_loss(prob.assignment, "naive", "naive")
            match = oracle.total == rep.total
            out["oracle"] = {"total": oracle.total, "match": match}
            if not match:
                out["ok"] = False
                _emit(out, args.output)
                return FAILED
    except (PmlossError, ValueError) as e:
        _emit(_error(e), args.output)
        return FAILED
    _emit(out, args.output)
    return OK


def cmd_bound(args) -> int:
    prob, code = _prepare(args)
    if prob is None:
        return code
    if not _need_assignment(prob, args):
        return INVALID
    try:
        rep = total_loss(prob.assignment, args.strategy or "predecessor", args.algorithm or "naive")
        if rep.bound is None:
            raise PmlossError("assignment carries no epsilon label")
        out = {"ok": True, "epsilon": rep.epsilon, "loss": rep.total, "bound": rep.bound}
        if args.certify:
            moved, delta = deinterleave(prob.assignment)
            v = verify_interleaving(moved)
            out["certificate"] = {
                "delta": delta,
                "verifies": v.ok,
                "certified_bound": prob.assignment.epsilon + delta,
                "assignment": io.assignment_to_json(moved),
            }
            if not v.ok:
                out["ok"] = False
                _emit(out, args.output)
                return FAILED
    except PmlossError as e:
        _emit(_error(e), args.output)
        return FAILED
    _emit(out, args.output)
    return OK


def cmd_extend(args) -> int:
    prob, code = _prepare(args)
    if prob is None:
        return code
    try:
        asgn = extend_constructible(prob.F, prob.G, prob.flow, prob.epsilon,
                                    prob.partial_phi, prob.partial_psi)
        check_constructible(asgn, _decompose(asgn.F, asgn.G, asgn.S, asgn.poset.is_linear()))
    except PmlossError as e:
        _emit(_error(e), args.output)
        return FAILED
    _emit(io.problem_to_json(prob, asgn), args.output)
    return OK


def _module(prob, name):
    return prob.F if name == "F" else prob.G


def _point(text):
    return io.element_id(json.loads(text))


def _member(text):
    try:
        v = json.loads(text)
    except json.JSONDecodeError:
        return text
    return v if isinstance(v, list) else text


def cmd_reducing(args) -> int:
    prob, code = _prepare(args)
    if prob is None:
        return code
    try:
        rs = reducing_constants(_module(prob, args.module), prob.flow, _point(args.point))
    except (PmlossError, ValueError) as e:
        _emit(_error(e), args.output)
        return FAILED
    _emit({"ok": True, "module": args.module, "point": rs.point, "constants": list(rs.constants)},
          args.output)
    return OK


def cmd_merging(args) -> int:
    prob, code = _prepare(args)
    if prob is None:
        return code
    try:
        d = merging_distance(_module(prob, args.module), prob.flow, _point(args.point),
                             _member(args.a), _member(args.b))
    except (PmlossError, ValueError) as e:
        _emit(_error(e), args.output)
        return FAILED
    _emit({"ok": True, "module": args.module, "point": _point(args.point), "distance": d}, args.output)
    return OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pmloss", description="Assignment loss and interleaving bounds "
                                 "for persistence modules over finite posets.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("path", help="JSON problem file")
    common.add_argument("--field", type=int, default=None, help="prime for the vector backend")
    common.add_argument("-o", "--output", default=None, help="write the JSON result here")
    strat = argparse.ArgumentParser(add_help=False)
    strat.add_argument("--strategy", choices=["naive", "predecessor", "linear", "grid"])
    strat.add_argument("--algorithm", choices=["naive", "fc", "vec", "auto"])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check poset, flow, and modules")
    p.set_defaults(func=cmd_validate)
    p = sub.add_parser("loss", parents=[common, strat], help="total loss of the assignment")
    p.add_argument("--check-oracle", action="store_true", help="compare with the naive total")
    p.set_defaults(func=cmd_loss)
    p = sub.add_parser("bound", parents=[common, strat], help="epsilon + loss bound")
    p.add_argument("--certify", action="store_true", help="de-interleave and verify")
    p.set_defaults(func=cmd_bound)
    p = sub.add_parser("extend", parents=[common], help="extend representative maps to a full assignment")
    p.set_defaults(func=cmd_extend)
    p = sub.add_parser("reducing-constants", parents=[common], help="reducing constants at a point")
    p.add_argument("--module", choices=["F", "G"], default="F")
    p.add_argument("--point", required=True, help="element id as JSON")
    p.set_defaults(func=cmd_reducing)
    p = sub.add_parser("merging-distance", parents=[common], help="merging distance of two members")
    p.add_argument("--module", choices=["F", "G"], default="F")
    p.add_argument("--point", required=True, help="element id as JSON")
    p.add_argument("a", help="label, or a JSON vector")
    p.add_argument("b", help="label, or a JSON vector")
    p.set_defaults(func=cmd_merging)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as e:
        sys.stderr.write(f"pmloss: {e}\n")
        return INVALID


if __name__ == "__main__":
    sys.exit(main())
