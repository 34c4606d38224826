"""Canonical JSON encoding of categories, diagrams, complexes, pro-objects and
certificates.

Every document carries ``schema_version``. Output is produced with sorted keys
and fixed separators so equal values give byte-identical text. Matrices are
row-major lists of residues mod p; their shapes come from the surrounding
dimension tables, so empty matrices round-trip.
"""

import json

import numpy as np

from . import chains as ch
from .fincat import FiniteCategory, make_diagram, ssorted
from .procalc import (ChainBase, FinMap, FinSetBase, ProMap, ProObject, Representative,
                      pro_object)

SCHEMA_VERSION = 1


class SchemaError(ValueError):
    """The document does not have the expected shape."""


def dumps(doc):
    return json.dumps(doc, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def need(d, key, kind=None, where=""):
    if not isinstance(d, dict) or key not in d:
        raise SchemaError(f"{where or 'document'}: missing key {key!r}")
    v = d[key]
    if kind is not None and not isinstance(v, kind):
        raise SchemaError(f"{where or 'document'}: {key!r} should be {kind.__name__}")
    return v


def check_version(doc, where="document"):
    v = need(doc, "schema_version", int, where)
    if v != SCHEMA_VERSION:
        raise SchemaError(f"{where}: schema_version {v} is not supported")


# -- labels ----------------------------------------------------------------

def label_out(x):
    if isinstance(x, tuple):
        return [label_out(y) for y in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def label_in(x):
    if isinstance(x, list):
        return tuple(label_in(y) for y in x)
    if isinstance(x, (int, str)) and not isinstance(x, bool):
        return x
    raise SchemaError(f"bad label {x!r}")


def _key(x):
    """JSON object keys must be strings; labels used as keys are stringified."""
    return x if isinstance(x, str) else json.dumps(label_out(x))


def _unkey(k, labels):
    table = {_key(x): x for x in labels}
    if k not in table:
        raise SchemaError(f"unknown label {k!r}")
    return table[k]


# -- categories and set diagrams ------------------------------------------

def category_out(c):
    return {
        "objects": [label_out(o) for o in c.objects],
        "morphisms": {m: [label_out(s), label_out(t)] for m, (s, t) in ssorted(c.morphisms.items())},
        "identities": {_key(o): c.identities[o] for o in c.objects},
        "compose": [list(t) for t in ssorted((g, f, h) for (g, f), h in c.compose.items())],
    }


def category_in(d, where="category"):
    objects = tuple(label_in(o) for o in need(d, "objects", list, where))
    morphisms = {}
    for m, st in need(d, "morphisms", dict, where).items():
        if not (isinstance(st, list) and len(st) == 2):
            raise SchemaError(f"{where}: morphism {m!r} needs [source, target]")
        morphisms[m] = (label_in(st[0]), label_in(st[1]))
    identities = {_unkey(k, objects): v for k, v in need(d, "identities", dict, where).items()}
    compose = {}
    for triple in need(d, "compose", list, where):
        if not (isinstance(triple, list) and len(triple) == 3):
            raise SchemaError(f"{where}: composition entries are [g, f, g o f]")
        g, f, h = triple
        compose[(g, f)] = h
    return FiniteCategory(objects, morphisms, identities, compose)


def diagram_out(X):
    c = X.base
    return {
        "values": {_key(o): [label_out(x) for x in X.values[o]] for o in c.objects},
        "action": {m: [[label_out(x), label_out(X.action[m][x])] for x in X.values[c.src(m)]]
                   for m in c.non_identities()},
    }


def diagram_in(d, c, where="diagram"):
    vals_raw = need(d, "values", dict, where)
    values = {_unkey(k, c.objects): tuple(label_in(x) for x in v) for k, v in vals_raw.items()}
    for o in c.objects:
        values.setdefault(o, ())
    action = {}
    for m, pairs in d.get("action", {}).items():
        if m not in c.morphisms:
            raise SchemaError(f"{where}: unknown morphism {m!r}")
        action[m] = {label_in(x): label_in(y) for x, y in pairs}
    return make_diagram(c, values, action)


# -- matrices, complexes, chain maps ---------------------------------------

def matrix_out(M):
    return np.asarray(M, dtype=np.int64).tolist()


def matrix_in(rows, r, c, p, where="matrix"):
    try:
        A = np.asarray(rows, dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise SchemaError(f"{where}: not an integer matrix") from e
    if A.size != r * c:
        raise SchemaError(f"{where}: expected a {r}x{c} matrix")
    return A.reshape(r, c) % p


def complex_out(X, with_category=True):
    c = X.base
    out = {"p": X.p, "degrees": {}}
    if with_category:
        out["category"] = category_out(c)
    for n in X.degrees():
        M = X.mod(n)
        out["degrees"][str(n)] = {
            "dims": {_key(o): int(M.dims[o]) for o in c.objects},
            "mats": {m: matrix_out(M.mats[m]) for m in c.non_identities()},
            "d": {_key(o): matrix_out(X.d(n, o)) for o in c.objects},
        }
    return out


def complex_in(d, c=None, where="complex"):
    if c is None:
        c = category_in(need(d, "category", dict, where), where + ".category")
    p = need(d, "p", int, where)
    degs = {}
    for k, v in need(d, "degrees", dict, where).items():
        try:
            degs[int(k)] = v
        except ValueError as e:
            raise SchemaError(f"{where}: degree {k!r} is not an integer") from e
    dims = {n: {o: 0 for o in c.objects} for n in degs}
    for n, v in degs.items():
        for k, x in need(v, "dims", dict, f"{where}[{n}]").items():
            dims[n][_unkey(k, c.objects)] = int(x)
    modules, diff = {}, {}
    for n, v in degs.items():
        mats = {}
        for m, rows in v.get("mats", {}).items():
            if m not in c.morphisms:
                raise SchemaError(f"{where}[{n}]: unknown morphism {m!r}")
            s, t = c.morphisms[m]
            mats[m] = matrix_in(rows, dims[n][t], dims[n][s], p, f"{where}[{n}].{m}")
        modules[n] = ch.module_diagram(c, p, dims[n], mats)
        diff[n] = {}
        for k, rows in v.get("d", {}).items():
            o = _unkey(k, c.objects)
            below = dims.get(n - 1, {}).get(o, 0)
            diff[n][o] = matrix_in(rows, below, dims[n][o], p, f"{where}[{n}].d")
    return ch.chain_diagram(c, p, modules, diff)


def chain_map_out(f, with_ends=True):
    c = f.source.base
    out = {"comps": {str(n): {_key(o): matrix_out(f.at(n, o)) for o in c.objects}
                     for n in f.degrees()}}
    if with_ends:
        out["source"] = complex_out(f.source)
        out["target"] = complex_out(f.target)
    return out


def chain_map_in(d, X=None, Y=None, where="chain map"):
    if X is None:
        X = complex_in(need(d, "source", dict, where), where=where + ".source")
    if Y is None:
        Y = complex_in(need(d, "target", dict, where), where=where + ".target")
    c = X.base
    comps = {}
    for k, v in need(d, "comps", dict, where).items():
        n = int(k)
        comps[n] = {}
        for ok, rows in v.items():
            o = _unkey(ok, c.objects)
            comps[n][o] = matrix_in(rows, Y.dim(n, o), X.dim(n, o), X.p, f"{where}[{n}]")
    return ch.chain_map(X, Y, comps)


# -- pro-objects and pro-maps ---------------------------------------------

def _base_name(B):
    return "chain" if isinstance(B, ChainBase) else "set"


def _level_out(B, A):
    return complex_out(A) if isinstance(B, ChainBase) else [label_out(x) for x in A]


def _map_out(B, f):
    if isinstance(B, ChainBase):
        return chain_map_out(f, with_ends=False)
    return [[label_out(x), label_out(f(x))] for x in f.source]


def _map_in(B, d, A, C, where):
    if isinstance(B, ChainBase):
        return chain_map_in(d, A, C, where)
    try:
        table = {label_in(x): label_in(y) for x, y in d}
        return FinMap(A, C, tuple(table[x] for x in A))
    except (KeyError, TypeError, ValueError) as e:
        raise SchemaError(f"{where}: mapping table is not a total function") from e


def pro_out(X):
    B, c = X.base, X.index
    return {
        "base": _base_name(B),
        "index": category_out(c),
        "levels": {_key(i): _level_out(B, X.X(i)) for i in c.objects},
        "bonding": {m: _map_out(B, X.b(m)) for m in c.non_identities()},
    }


def pro_in(d, where="pro-object"):
    kind = need(d, "base", str, where)
    if kind not in ("chain", "set"):
        raise SchemaError(f"{where}: base must be 'chain' or 'set'")
    B = ChainBase() if kind == "chain" else FinSetBase()
    c = category_in(need(d, "index", dict, where), where + ".index")
    levels = {}
    for k, v in need(d, "levels", dict, where).items():
        i = _unkey(k, c.objects)
        levels[i] = complex_in(v, where=f"{where}.levels[{k}]") if kind == "chain" \
            else tuple(label_in(x) for x in v)
    missing = [i for i in c.objects if i not in levels]
    if missing:
        raise SchemaError(f"{where}: no level for {missing}")
    bonding = {}
    for m, v in need(d, "bonding", dict, where).items():
        if m not in c.morphisms:
            raise SchemaError(f"{where}: unknown index arrow {m!r}")
        s, t = c.morphisms[m]
        bonding[m] = _map_in(B, v, levels[s], levels[t], f"{where}.bonding[{m}]")
    try:
        return pro_object(B, c, levels, bonding)
    except ValueError as e:
        raise SchemaError(f"{where}: {e}") from e


def promap_out(f, with_ends=True):
    B = f.source.base
    K = f.target.index
    out = {"theta": {_key(k): label_out(f.rep.theta[k]) for k in K.objects},
           "maps": {_key(k): _map_out(B, f.rep.maps[k]) for k in K.objects}}
    if with_ends:
        out["source"] = pro_out(f.source)
        out["target"] = pro_out(f.target)
    return out


def promap_in(d, X=None, Y=None, where="pro-map"):
    if X is None:
        X = pro_in(need(d, "source", dict, where), where + ".source")
    if Y is None:
        Y = pro_in(need(d, "target", dict, where), where + ".target")
    B = X.base
    theta, maps = {}, {}
    th = need(d, "theta", dict, where)
    mp = need(d, "maps", dict, where)
    for k in Y.index.objects:
        if _key(k) not in th or _key(k) not in mp:
            raise SchemaError(f"{where}: no representative data at level {k!r}")
        i = label_in(th[_key(k)])
        if i not in X.index.objects:
            raise SchemaError(f"{where}: theta({k!r}) = {i!r} is not a level of the source")
        theta[k] = i
        maps[k] = _map_in(B, mp[_key(k)], X.X(i), Y.X(k), f"{where}.maps[{k}]")
    return ProMap(X, Y, Representative(theta, maps))


# -- generic values ----------------------------------------------------------

def value_out(x):
    """Tagged encoding of any object or map a certificate may hold."""
    if isinstance(x, ch.ChainDiagram):
        return {"kind": "complex", "data": complex_out(x)}
    if isinstance(x, ch.ChainMap):
        return {"kind": "chain_map", "data": chain_map_out(x)}
    if isinstance(x, ProObject):
        return {"kind": "pro_object", "data": pro_out(x)}
    if isinstance(x, ProMap):
        return {"kind": "pro_map", "data": promap_out(x)}
    raise TypeError(f"cannot encode {type(x).__name__}")


def value_in(d, where="value"):
    kind = need(d, "kind", str, where)
    data = need(d, "data", dict, where)
    if kind == "complex":
        return complex_in(data, where=where)
    if kind == "chain_map":
        return chain_map_in(data, where=where)
    if kind == "pro_object":
        return pro_in(data, where)
    if kind == "pro_map":
        return promap_in(data, where=where)
    raise SchemaError(f"{where}: unknown kind {kind!r}")


# -- certificates -----------------------------------------------------------

STAGE_FIELDS = ("Z", "rho", "S", "top", "bottom", "pushout", "step", "cell")


def certificate_out(cert, dual=False):
    stages = []
    for st in cert.stages:
        m = st.match
        stages.append({"index": st.index, "cells": len(m.cells),
                       "Z": value_out(st.Z), "rho": value_out(st.rho),
                       "S": value_out(m.S), "top": value_out(m.top),
                       "bottom": value_out(m.bottom), "pushout": value_out(st.pushout.obj),
                       "step": value_out(st.step), "cell": value_out(st.cell)})
    return {"schema_version": SCHEMA_VERSION, "dual": dual, "f": value_out(cert.f),
            "stages": stages, "Z": value_out(cert.Z), "gamma": value_out(cert.gamma),
            "delta": value_out(cert.delta), "stabilized": cert.stabilized,
            "stages_used": cert.stages_used, "functorial": cert.functorial}


class _Pushed:
    def __init__(self, obj):
        self.obj = obj


def certificate_in(d, where="certificate"):
    """A FactorizationCertificate rebuilt from JSON, ready for soa.replay."""
    from .soa import FactorizationCertificate, Match, Stage
    check_version(d, where)
    stages = []
    for k, s in enumerate(need(d, "stages", list, where)):
        w = f"{where}.stages[{k}]"
        v = {name: value_in(need(s, name, dict, w), f"{w}.{name}") for name in STAGE_FIELDS}
        m = Match(v["S"], v["top"], v["bottom"], [None] * need(s, "cells", int, w))
        stages.append(Stage(need(s, "index", int, w), v["Z"], v["rho"], m, _Pushed(v["pushout"]),
                            v["step"], v["cell"]))
    f = value_in(need(d, "f", dict, where), where + ".f")
    Z = value_in(need(d, "Z", dict, where), where + ".Z")
    gamma = value_in(need(d, "gamma", dict, where), where + ".gamma")
    delta = value_in(need(d, "delta", dict, where), where + ".delta")
    return FactorizationCertificate(f, stages, Z, gamma, delta,
                                    bool(need(d, "stabilized", bool, where)), [],
                                    [st.rho for st in stages] + [delta],
                                    bool(d.get("functorial", False)))
