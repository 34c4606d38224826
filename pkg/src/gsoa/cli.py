"""Command-line front end.

Inputs are single-file JSON workspaces; every command writes one JSON report
(canonical key order, no timings) to --out or stdout and a one-line summary
to stderr.

Exit codes: 0 ok, 1 schema error, 2 precondition or verification failure,
3 budget exhausted (the report is still written).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import chains as ch
from . import equichain as eq
from . import fincat as fc
from . import fp
from . import jsonio as J
from . import procalc as pc
from . import profactor as pf
from .soa import Budget, BudgetExhausted, Opposite, replay, soa_factorize

ENV = {"p": "GSOA_P", "budget": "GSOA_BUDGET", "probes": "GSOA_PROBES",
       "seed": "GSOA_SEED", "out": "GSOA_OUT"}
DEFAULTS = {"p": 2, "budget": 8, "probes": "all", "seed": 0, "out": None}


class PreconditionFailed(Exception):
    pass


class BudgetReport(Exception):
    """Carries a finished report whose factorization did not stabilize."""

    def __init__(self, result, verdicts):
        super().__init__("budget exhausted")
        self.result, self.verdicts = result, verdicts


# -- workspace ----------------------------------------------------------------

SECTIONS = ("categories", "diagrams", "complexes", "chain_maps", "pro_objects", "pro_maps")


class Workspace:
    """Named documents with references resolved by name."""

    def __init__(self, doc, p):
        J.check_version(doc, "workspace")
        for s in SECTIONS:
            if s in doc and not isinstance(doc[s], dict):
                raise J.SchemaError(f"workspace: {s!r} should be an object")
        self.doc = doc
        self.p = p
        self._cats = {}

    def names(self, section):
        return sorted(self.doc.get(section, {}))

    def raw(self, section, name):
        items = self.doc.get(section, {})
        if name not in items:
            raise J.SchemaError(f"workspace: no {section[:-1].replace('_', ' ')} named {name!r}")
        return items[name]

    def pick(self, section, name):
        if name is not None:
            return name
        names = self.names(section)
        if not names:
            raise J.SchemaError(f"workspace has no {section}")
        return names[0]

    def category(self, ref, where="category"):
        if isinstance(ref, dict):
            return J.category_in(ref, where)
        if not isinstance(ref, str):
            raise J.SchemaError(f"{where}: expected a category name or object")
        if ref not in self._cats:
            self._cats[ref] = J.category_in(self.raw("categories", ref), f"categories.{ref}")
        return self._cats[ref]

    def diagram(self, name):
        d = self.raw("diagrams", name)
        c = self.category(J.need(d, "category", None, f"diagrams.{name}"), f"diagrams.{name}")
        return J.diagram_in(d, c, f"diagrams.{name}")

    def _complex_doc(self, d, where):
        d = dict(d)
        d.setdefault("p", self.p)
        if d["p"] != self.p:
            raise PreconditionFailed(f"{where}: p = {d['p']} but the run uses p = {self.p}")
        if not fp.is_prime(d["p"]):
            raise PreconditionFailed(f"{where}: p = {d['p']} is not prime")
        return d

    def complex(self, ref, where="complex"):
        if isinstance(ref, str):
            where = f"complexes.{ref}"
            ref = self.raw("complexes", ref)
        d = self._complex_doc(ref, where)
        c = self.category(J.need(d, "category", None, where), where)
        return J.complex_in(d, c, where)

    def chain_map(self, name):
        where = f"chain_maps.{name}"
        d = self.raw("chain_maps", name)
        X = self.complex(J.need(d, "source", None, where), where + ".source")
        Y = self.complex(J.need(d, "target", None, where), where + ".target")
        return J.chain_map_in(d, X, Y, where)

    def _inline_pro(self, d, where):
        if not isinstance(d, dict):
            raise J.SchemaError(f"{where}: expected an object")
        d = dict(d)
        d["index"] = J.category_out(self.category(J.need(d, "index", None, where), where))
        if J.need(d, "base", str, where) == "chain":
            d["levels"] = {k: J.complex_out(self.complex(v, f"{where}.levels[{k}]"))
                           for k, v in J.need(d, "levels", dict, where).items()}
        return d

    def pro_object(self, name):
        where = f"pro_objects.{name}"
        return J.pro_in(self._inline_pro(self.raw("pro_objects", name), where), where)

    def pro_map(self, name):
        where = f"pro_maps.{name}"
        d = self.raw("pro_maps", name)
        X = self.pro_object(J.need(d, "source", str, where))
        Y = self.pro_object(J.need(d, "target", str, where))
        return J.promap_in(d, X, Y, where)


# -- commands -------------------------------------------------------------------

def cmd_validate(ws, args):
    items = []
    checks = [
        ("categories", ws.category, lambda c: fc.validate_category(c).violations),
        ("diagrams", ws.diagram, lambda X: fc.validate_diagram(X)),
        ("complexes", ws.complex, lambda X: ch.validate_complex(X)),
        ("chain_maps", ws.chain_map, lambda f: [] if ch.is_chain_map(f) else ["not a chain map"]),
        ("pro_objects", ws.pro_object, _pro_violations),
        ("pro_maps", ws.pro_map, _promap_violations),
    ]
    for section, load, check in checks:
        for name in ws.names(section):
            bad = _violations_out(check(load(name)))
            items.append({"section": section, "name": name, "ok": not bad, "violations": bad})
    ok = all(i["ok"] for i in items)
    result = {"items": items, "count": len(items)}
    verdicts = {"valid": ok}
    if not ok:
        raise PreconditionFailed(result)
    return result, verdicts


def _violations_out(v):
    if hasattr(v, "violations"):
        v = v.violations
    return [str(x) for x in v]


def _pro_violations(X):
    bad = list(pc.validate_pro(X))
    if not pc.validate_cofiltering(X.index).ok:
        bad.append("index is not cofiltering")
    return bad


def _promap_violations(f):
    bad = [] if pc.is_representative(f.source, f.target, f.rep) else ["not a representative"]
    if isinstance(f.source.base, pc.ChainBase):
        bad += [f"level map {k} is not a chain map" for k, m in f.rep.maps.items()
                if not ch.is_chain_map(m)]
    return bad


def cmd_colim(ws, args):
    name = ws.pick("diagrams", args.name)
    X = ws.diagram(name)
    col = fc.colim_set(X)
    result = {"diagram": name,
              "apex": [J.label_out(a) for a in col.apex],
              "classes": [{"point": J.label_out(a),
                           "members": [J.label_out(m) for m in col.classes[a]]} for a in col.apex]}
    return result, {"points": len(col.apex)}


def cmd_orbits(ws, args):
    name = ws.pick("diagrams", args.name)
    X = ws.diagram(name)
    obs = fc.orbits(X)
    result = {"diagram": name, "apex_points": len(obs),
              "orbits": [{"point": J.label_out(o.point), "diagram": J.diagram_out(o.diagram)}
                         for o in obs]}
    def keys(xs):
        return sorted(json.dumps(J.label_out(x)) for x in xs)
    partition = all(keys(x for o in obs for x in o.diagram.values[k]) == keys(X.values[k])
                    for k in X.base.objects)
    return result, {"orbits_are_orbits": all(fc.is_orbit(o.diagram) for o in obs),
                    "partition": partition}


def _probe_selector(args, system):
    if args.probes == "all":
        return None
    try:
        kind, k = args.probes.split(":")
        k = int(k)
        assert kind == "sample" and k > 0
    except (ValueError, AssertionError):
        raise PreconditionFailed(f"--probes must be 'all' or 'sample:K', not {args.probes!r}")

    def probes(rho):
        sq = system.squares(rho)
        rng = np.random.default_rng(args.seed)
        keep = sorted(rng.permutation(len(sq))[:k].tolist())
        return [sq[i] for i in keep]
    return probes


def cmd_factorize(ws, args):
    if args.cls not in ("I", "J"):
        raise PreconditionFailed("factorize needs --class I or J")
    name = ws.pick("chain_maps", args.name)
    f = ws.chain_map(name)
    if not ch.is_chain_map(f):
        raise PreconditionFailed(f"{name} is not a chain map")
    system = eq.EquivariantSystem("sphere" if args.cls == "I" else "disk", reduced=True)
    budget = Budget(args.budget, _probe_selector(args, system))
    A = eq.ChainAdapter()
    cert = soa_factorize(A, f, system, budget)
    verdicts = {"stabilized": cert.stabilized,
                "exact": A.equal(A.compose(cert.delta, cert.gamma), f),
                "replay": replay(A, cert)}
    if cert.stabilized:
        verdicts["rlp_probes"] = all(A.find_lift(cert.delta, sq) is not None
                                     for sq in system.squares(cert.delta))
    result = {"map": name, "class": args.cls, "kind": "chain",
              "certificate": J.certificate_out(cert)}
    if not cert.stabilized:
        raise BudgetReport(result, verdicts)
    return result, verdicts


def cmd_pro_factorize(ws, args):
    if args.cls not in ("M", "N"):
        raise PreconditionFailed("pro-factorize needs --class M or N")
    name = ws.pick("pro_maps", args.name)
    f = ws.pro_map(name)
    try:
        F = pf.pro_factorize(f, args.cls, Budget(args.budget), levels=args.levels)
    except BudgetExhausted as e:
        raise BudgetReport({"map": name, "class": args.cls, "kind": "pro", "levels": args.levels},
                           {"stabilized": False, "reason": str(e)})
    A = F.adapter
    verdicts = {"stabilized": F.cert.stabilized,
                "exact": A.base.equal(A.base.compose(F.fibration, F.lifting_part), f),
                "replay": replay(A, F.cert)}
    result = {"map": name, "class": args.cls, "kind": "pro", "levels": args.levels,
              "stages": F.stages,
              "certificate": J.certificate_out(F.cert, dual=True)}
    if not F.cert.stabilized:
        raise BudgetReport(result, verdicts)
    return result, verdicts


def cmd_check_lift(ws, args):
    """Replay a certificate from a factorize or pro-factorize report."""
    rep = ws.doc
    res = J.need(rep, "result", dict, "report")
    kind = J.need(res, "kind", str, "report.result")
    cls = J.need(res, "class", str, "report.result")
    cert = J.certificate_in(J.need(res, "certificate", dict, "report.result"))
    if kind == "chain":
        A = eq.ChainAdapter()
        system = eq.EquivariantSystem("sphere" if cls == "I" else "disk", reduced=True)
        probe = lambda sq: A.find_lift(cert.delta, sq)  # noqa: E731
        squares = system.squares(cert.delta)
    elif kind == "pro":
        A = Opposite(pf.ProAdapter())
        levels = res.get("levels", "cofinal")
        if levels not in ("all", "cofinal"):
            raise J.SchemaError(f"report.result: unknown levels {levels!r}")
        system = pf.ProSystem(cls, levels=levels)
        squares = system.cosquares(cert.delta)
        probe = lambda sq: A.base.find_colift(cert.delta, sq)  # noqa: E731
    else:
        raise J.SchemaError(f"report.result: unknown kind {kind!r}")
    ok_replay = replay(A, cert)
    lifts = [probe(sq) is not None for sq in squares] if cert.stabilized else []
    verdicts = {"replay": ok_replay, "stabilized": cert.stabilized,
                "probes": len(lifts), "lifts": sum(lifts)}
    result = {"kind": kind, "class": cls, "stages": cert.stages_used}
    if not ok_replay or not all(lifts):
        raise PreconditionFailed({"result": result, "verdicts": verdicts})
    return result, verdicts


def cmd_pro_hom(ws, args):
    sname = args.source or ws.pick("pro_objects", None)
    tname = args.target or sname
    X, Y = ws.pro_object(sname), ws.pro_object(tname)
    _require_cofiltering(X, Y)
    H = pc.hom_pro(X, Y)
    classes = pc.representative_classes(X, Y)
    maps = [J.promap_out(f, with_ends=False) for f in H.maps]
    return ({"source": sname, "target": tname, "count": len(H), "maps": maps},
            {"agrees_with_class_count": len(H) == len(classes)})


def _require_cofiltering(*objs):
    for X in objs:
        if not pc.validate_cofiltering(X.index).ok:
            raise PreconditionFailed("index is not cofiltering")


def cmd_pro_reindex(ws, args):
    name = ws.pick("pro_objects", args.name)
    X = ws.pro_object(name)
    _require_cofiltering(X)
    r = pc.mardesic_reindex(X)
    return ({"object": name, "reindexed": J.pro_out(r.obj)},
            {"directed_poset": pc.is_directed_poset(r.obj.index), "isomorphism": r.verified})


def cmd_pro_levelwise(ws, args):
    name = ws.pick("pro_maps", args.name)
    f = ws.pro_map(name)
    _require_cofiltering(f.source, f.target)
    L = pc.levelwise_replace(f)
    kinds = pc.classify_representative(L.map)
    return ({"map": name, "replacement": J.promap_out(L.map)},
            {"levelwise": bool(kinds["levelwise"]), "verified": L.verified})


COMMANDS = {
    "validate": cmd_validate, "colim": cmd_colim, "orbits": cmd_orbits,
    "factorize": cmd_factorize, "check-lift": cmd_check_lift, "pro-hom": cmd_pro_hom,
    "pro-reindex": cmd_pro_reindex, "pro-levelwise": cmd_pro_levelwise,
    "pro-factorize": cmd_pro_factorize,
}


# -- driver ---------------------------------------------------------------------

def parser():
    ap = argparse.ArgumentParser(prog="gsoa", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input", help="workspace JSON (for check-lift: a factorize report)")
    ap.add_argument("--name", help="item to run on (default: first by name)")
    ap.add_argument("--class", dest="cls", help="I|J for factorize, M|N for pro-factorize")
    ap.add_argument("--source", help="pro-hom source object")
    ap.add_argument("--target", help="pro-hom target object")
    ap.add_argument("--levels", choices=["cofinal", "all"], default="cofinal",
                    help="pro-factorize: product over the greatest level or every level")
    ap.add_argument("--p", type=int)
    ap.add_argument("--budget", type=int)
    ap.add_argument("--probes")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out")
    return ap


def settings(args, environ=None):
    """Flags win over environment variables, which win over defaults."""
    environ = os.environ if environ is None else environ
    for key, var in ENV.items():
        if getattr(args, key) is None:
            raw = environ.get(var)
            if raw is None:
                val = DEFAULTS[key]
            elif key in ("p", "budget", "seed"):
                try:
                    val = int(raw)
                except ValueError:
                    raise PreconditionFailed(f"{var}={raw!r} is not an integer")
            else:
                val = raw
            setattr(args, key, val)
    if args.budget < 0:
        raise PreconditionFailed("budget must be >= 0")
    if not fp.is_prime(args.p):
        raise PreconditionFailed(f"p = {args.p} is not prime")
    return args


def run(argv=None, environ=None):
    """Execute one command; returns (exit code, report text)."""
    args = parser().parse_args(argv)
    report = {"schema_version": J.SCHEMA_VERSION, "command": args.command}
    code = 0
    try:
        settings(args, environ)
        report["config"] = {"p": args.p, "budget": args.budget, "probes": args.probes,
                            "seed": args.seed, "class": args.cls, "name": args.name,
                            "levels": args.levels}
        try:
            with open(args.input) as fh:
                doc = json.load(fh)
        except json.JSONDecodeError as e:
            raise J.SchemaError(f"input is not JSON: {e}")
        except OSError as e:
            raise J.SchemaError(f"cannot read input: {e.strerror}")
        ws = Workspace(doc, args.p)
        result, verdicts = COMMANDS[args.command](ws, args)
        report["result"], report["verdicts"] = result, verdicts
    except J.SchemaError as e:
        code = 1
        report["error"] = {"type": "schema", "message": str(e)}
    except (PreconditionFailed, pc.PreconditionError) as e:
        code = 2
        detail = e.args[0] if e.args else ""
        if isinstance(detail, dict):
            report.update(detail if "result" in detail else {"result": detail})
            report["error"] = {"type": "precondition", "message": "verification failed"}
        else:
            report["error"] = {"type": "precondition", "message": str(detail)}
    except BudgetReport as e:
        code = 3
        report["result"], report["verdicts"] = e.result, e.verdicts
        report["error"] = {"type": "budget", "message": "factorization did not stabilize"}
    report["exit_code"] = code
    text = J.dumps(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return code, text, args


def main(argv=None):
    code, text, args = run(argv)
    if not args.out:
        sys.stdout.write(text)
    verdicts = json.loads(text).get("verdicts", {})
    summary = ", ".join(f"{k}={v}" for k, v in sorted(verdicts.items()))
    print(f"gsoa {args.command}: exit {code}" + (f" ({summary})" if summary else ""),
          file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
