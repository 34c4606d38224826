"""Finite categories and Set-valued diagrams on them.

A FiniteCategory is given by explicit tables. Diagrams send objects to
finite tuples of labels and morphisms to lookup tables. Elements of a
disjoint union are tagged ``(object, label)`` pairs, and colimit classes
are named by their least tagged member so output is deterministic.
"""

from dataclasses import dataclass, field
import itertools


def skey(x):
    """Total order on the mixed labels we use (str, int, tuples of ints)."""
    if isinstance(x, tuple):
        return (2, tuple(skey(y) for y in x))
    if isinstance(x, (int,)) and not isinstance(x, bool):
        return (0, x)
    return (1, str(x))


def ssorted(xs):
    return sorted(xs, key=skey)


@dataclass(frozen=True, eq=False)
class FiniteCategory:
    objects: tuple
    morphisms: dict  # id -> (src, tgt)
    identities: dict  # object -> id
    compose: dict  # (g, f) -> g o f, for tgt(f) == src(g)

    def src(self, m):
        return self.morphisms[m][0]

    def tgt(self, m):
        return self.morphisms[m][1]

    def comp(self, g, f):
        return self.compose[(g, f)]

    def hom(self, a, b):
        return [m for m, (s, t) in self.morphisms.items() if s == a and t == b]

    def out_of(self, a):
        return [m for m, (s, _) in self.morphisms.items() if s == a]

    def non_identities(self):
        ids = set(self.identities.values())
        return [m for m in self.morphisms if m not in ids]

    def opposite(self):
        comp = {(f, g): h for (g, f), h in self.compose.items()}
        morph = {m: (t, s) for m, (s, t) in self.morphisms.items()}
        return FiniteCategory(self.objects, morph, dict(self.identities), comp)

    def is_thin(self):
        seen = set()
        for s, t in self.morphisms.values():
            if (s, t) in seen:
                return False
            seen.add((s, t))
        return True

    def is_poset(self):
        if not self.is_thin():
            return False
        return all(s == t for s, t in self.morphisms.values() if (t, s) in
                   {v for v in self.morphisms.values()})

    def leq(self, a, b):
        """For a thin category: True when there is an arrow b -> a.

        Pro-object conventions: i >= j means a bonding map X_i -> X_j.
        """
        return bool(self.hom(b, a))

    def __eq__(self, other):
        return (isinstance(other, FiniteCategory)
                and self.objects == other.objects
                and self.morphisms == other.morphisms
                and self.identities == other.identities
                and self.compose == other.compose)

    def __repr__(self):
        return f"FiniteCategory(objects={list(self.objects)}, morphisms={len(self.morphisms)})"


@dataclass
class ValidationReport:
    ok: bool
    violations: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def validate_category(c):
    """Check identity, closure, typing and associativity laws; never raises."""
    bad = []
    for o in c.objects:
        i = c.identities.get(o)
        if i is None or c.morphisms.get(i) != (o, o):
            bad.append(("identity missing", o))
    for m, (s, t) in c.morphisms.items():
        if s not in c.objects or t not in c.objects:
            bad.append(("endpoint not an object", m))
    for f, (fs, ft) in c.morphisms.items():
        for g, (gs, gt) in c.morphisms.items():
            if gs != ft:
                continue
            h = c.compose.get((g, f))
            if h is None:
                bad.append(("composition not total", (g, f)))
            elif c.morphisms.get(h) != (fs, gt):
                bad.append(("composite has wrong endpoints", (g, f, h)))
    for (g, f), h in c.compose.items():
        if f not in c.morphisms or g not in c.morphisms or c.tgt(f) != c.src(g):
            bad.append(("composite of non-composable pair", (g, f)))
    if bad:
        return ValidationReport(False, bad)
    for m, (s, t) in c.morphisms.items():
        if c.compose[(m, c.identities[s])] != m or c.compose[(c.identities[t], m)] != m:
            bad.append(("identity law fails", m))
    for f, g, h in itertools.product(c.morphisms, repeat=3):
        if c.tgt(f) == c.src(g) and c.tgt(g) == c.src(h):
            if c.comp(h, c.comp(g, f)) != c.comp(c.comp(h, g), f):
                bad.append(("associativity fails", (h, g, f)))
    return ValidationReport(not bad, bad)


def idempotent_category():
    """One object with a non-identity idempotent e (e o e = e); cofiltering."""
    return FiniteCategory(("m",), {"id_m": ("m", "m"), "e": ("m", "m")}, {"m": "id_m"},
                          {("id_m", "id_m"): "id_m", ("e", "id_m"): "e",
                           ("id_m", "e"): "e", ("e", "e"): "e"})


def equalized_pair():
    """c -w-> b =u,v=> a with u w = v w: cofiltering but not a poset."""
    morph = {"id_a": ("a", "a"), "id_b": ("b", "b"), "id_c": ("c", "c"),
             "u": ("b", "a"), "v": ("b", "a"), "w": ("c", "b"), "uw": ("c", "a")}
    comp = {("u", "w"): "uw", ("v", "w"): "uw"}
    for m, (s, t) in morph.items():
        comp[(m, f"id_{s}")] = m
        comp[(f"id_{t}", m)] = m
    return FiniteCategory(("a", "b", "c"), morph, {o: f"id_{o}" for o in "abc"}, comp)


def poset(elements, covers):
    """Thin category of a finite poset.

    ``covers`` lists pairs (i, j) meaning i >= j, i.e. an arrow i -> j.
    The reflexive-transitive closure is taken.
    """
    elements = tuple(elements)
    geq = {(e, e) for e in elements} | set(map(tuple, covers))
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(geq), repeat=2):
            if b == c and (a, d) not in geq:
                geq.add((a, d))
                changed = True
    morphisms = {f"{a}>{b}": (a, b) for a, b in sorted(geq, key=skey)}
    identities = {e: f"{e}>{e}" for e in elements}
    compose = {}
    for (a, b) in geq:
        for (c, d) in geq:
            if b == c:
                compose[(f"{c}>{d}", f"{a}>{b}")] = f"{a}>{d}"
    return FiniteCategory(elements, morphisms, identities, compose)


def terminal():
    return poset(["*"], [])


def walking_arrow():
    return poset(["a", "b"], [("a", "b")])


def span():
    """b <- a -> c."""
    return poset(["a", "b", "c"], [("a", "b"), ("a", "c")])


def tower(n):
    """Truncated tower 0 < 1 < ... < n with bonding arrows i -> j for i >= j."""
    els = [str(i) for i in range(n + 1)]
    return poset(els, [(els[i + 1], els[i]) for i in range(n)])


# -- set-valued diagrams ---------------------------------------------------

@dataclass(frozen=True, eq=False)
class SetDiagram:
    base: FiniteCategory
    values: dict  # object -> tuple of labels
    action: dict  # morphism -> {label: label}

    def apply(self, m, x):
        return self.action[m][x]

    def size(self):
        return sum(len(v) for v in self.values.values())

    def elements(self):
        """Tagged elements of the disjoint union, canonical order."""
        return [(o, x) for o in self.base.objects for x in self.values[o]]

    def __eq__(self, other):
        return (isinstance(other, SetDiagram) and self.base == other.base
                and self.values == other.values and self.action == other.action)


def make_diagram(base, values, action=None):
    """Build a SetDiagram; identity actions may be omitted."""
    values = {o: tuple(values[o]) for o in base.objects}
    act = {}
    action = action or {}
    for m, (s, t) in base.morphisms.items():
        if m in action:
            act[m] = dict(action[m])
        elif m == base.identities[s]:
            act[m] = {x: x for x in values[s]}
        else:
            raise ValueError(f"no action given for morphism {m}")
    return SetDiagram(base, values, act)


def constant_diagram(base, labels):
    labels = tuple(labels)
    return make_diagram(base, {o: labels for o in base.objects},
                        {m: {x: x for x in labels} for m in base.morphisms})


def validate_diagram(X):
    bad = []
    c = X.base
    for m, (s, t) in c.morphisms.items():
        table = X.action.get(m)
        if table is None or set(table) != set(X.values[s]):
            bad.append(("action not total", m))
            continue
        if any(v not in X.values[t] for v in table.values()):
            bad.append(("action leaves target", m))
    if bad:
        return ValidationReport(False, bad)
    for o in c.objects:
        i = c.identities[o]
        if any(X.action[i][x] != x for x in X.values[o]):
            bad.append(("identity not preserved", o))
    for (g, f), h in c.compose.items():
        for x in X.values[c.src(f)]:
            if X.action[g][X.action[f][x]] != X.action[h][x]:
                bad.append(("composition not preserved", (g, f, x)))
                break
    return ValidationReport(not bad, bad)


@dataclass(frozen=True, eq=False)
class DiagramMap:
    source: SetDiagram
    target: SetDiagram
    components: dict  # object -> {label: label}

    def __call__(self, o, x):
        return self.components[o][x]


def is_natural(f):
    X, Y = f.source, f.target
    for m, (s, t) in X.base.morphisms.items():
        for x in X.values[s]:
            if f(t, X.apply(m, x)) != Y.apply(m, f(s, x)):
                return False
    return True


def compose_maps(g, f):
    return DiagramMap(f.source, g.target, {
        o: {x: g(o, f(o, x)) for x in f.source.values[o]} for o in f.source.base.objects})


def identity_map(X):
    return DiagramMap(X, X, {o: {x: x for x in X.values[o]} for o in X.base.objects})


@dataclass(frozen=True)
class ColimitPresentation:
    apex: tuple  # canonical representatives, sorted
    cocone: dict  # object -> {label: representative}
    classes: dict  # representative -> tuple of tagged members


def _union_find(items):
    parent = {x: x for x in items}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a, b):
        ra, rb = find(a), find(b)
        if ra != rb:
            lo, hi = sorted((ra, rb), key=skey)
            parent[hi] = lo
    return find, union


def colim_set(X):
    """Colimit of a Set-valued diagram as a quotient of the disjoint union."""
    elems = X.elements()
    find, union = _union_find(elems)
    for m, (s, t) in X.base.morphisms.items():
        for x in X.values[s]:
            union((s, x), (t, X.apply(m, x)))
    classes = {}
    for e in elems:
        classes.setdefault(find(e), []).append(e)
    # union-by-least keeps the root the least member of each class
    classes = {r: tuple(ssorted(ms)) for r, ms in classes.items()}
    cocone = {o: {x: find((o, x)) for x in X.values[o]} for o in X.base.objects}
    return ColimitPresentation(tuple(ssorted(classes)), cocone, classes)


def is_orbit(X):
    return len(colim_set(X).apex) == 1


@dataclass(frozen=True, eq=False)
class Orbit:
    diagram: SetDiagram
    projection: DiagramMap
    point: object


def orbit_over_point(X, p, colim=None):
    """Fiber of the colimit cocone over the apex point ``p``."""
    colim = colim or colim_set(X)
    if p not in colim.classes:
        raise KeyError(f"{p!r} is not a point of the colimit")
    vals = {o: tuple(x for x in X.values[o] if colim.cocone[o][x] == p)
            for o in X.base.objects}
    act = {m: {x: X.apply(m, x) for x in vals[X.base.src(m)]} for m in X.base.morphisms}
    T = SetDiagram(X.base, vals, act)
    proj = DiagramMap(T, X, {o: {x: x for x in vals[o]} for o in X.base.objects})
    return Orbit(T, proj, p)


def orbits(X):
    colim = colim_set(X)
    return [orbit_over_point(X, p, colim) for p in colim.apex]


def pullback_set(f, g):
    """Objectwise fiber product A x_C B with its two projections."""
    if f.source.base != g.source.base or f.target.base != g.target.base:
        raise ValueError("mismatched bases")
    A, B, C = f.source, g.source, f.target
    if not (C.values == g.target.values and C.action == g.target.action):
        raise ValueError("maps do not share a codomain")
    base = A.base
    vals = {o: tuple((a, b) for a in A.values[o] for b in B.values[o] if f(o, a) == g(o, b))
            for o in base.objects}
    act = {m: {(a, b): (A.apply(m, a), B.apply(m, b)) for (a, b) in vals[base.src(m)]}
           for m in base.morphisms}
    P = SetDiagram(base, vals, act)
    pa = DiagramMap(P, A, {o: {e: e[0] for e in vals[o]} for o in base.objects})
    pb = DiagramMap(P, B, {o: {e: e[1] for e in vals[o]} for o in base.objects})
    return P, pa, pb


def lim_set(X):
    """Limit of a Set-valued diagram: all compatible families, canonical order.

    A family is a tuple with one label per object, in ``base.objects`` order.
    """
    c = X.base
    objs = list(c.objects)
    arrows = [(m, objs.index(s), objs.index(t)) for m, (s, t) in c.morphisms.items()]
    out = []

    def extend(partial):
        k = len(partial)
        if k == len(objs):
            out.append(tuple(partial))
            return
        for x in X.values[objs[k]]:
            cand = partial + [x]
            ok = True
            for m, s, t in arrows:
                if s <= k and t <= k and (s == k or t == k):
                    if X.apply(m, cand[s]) != cand[t]:
                        ok = False
                        break
            if ok:
                extend(cand)
    extend([])
    return out
