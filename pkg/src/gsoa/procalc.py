"""Pro-objects over finite cofiltering indices and the calculus of pro-maps.

Index conventions: an arrow i -> j in the index category is read as
i >= j and carries a bonding map X_i -> X_j. A representative of a map
X -> Y (indices I and K) is a function theta : K -> I on objects together
with base maps f_k : X_theta(k) -> Y_k.

Over a finite index every pro-object is isomorphic to a constant one
(a finite directed poset has a greatest element); the algorithms below do
not use that shortcut, since their behaviour is the thing being checked.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import chains as ch
from . import fp
from .fincat import (ValidationReport, colim_set, lim_set, make_diagram, poset, terminal,
                     tower)


class PreconditionError(ValueError):
    pass


# -- bases ----------------------------------------------------------------

@dataclass(frozen=True)
class FinMap:
    source: tuple
    target: tuple
    table: tuple  # image of source[j] at position j

    def __call__(self, x):
        return self.table[self.source.index(x)]


class FinSetBase:
    """Finite sets (tuples of labels) and all functions between them."""
    name = "finset"

    def hom(self, A, B):
        return [FinMap(A, B, t) for t in itertools.product(B, repeat=len(A))]

    def compose(self, g, f):
        return FinMap(f.source, g.target, tuple(g(f(x)) for x in f.source))

    def identity(self, A):
        return FinMap(A, A, tuple(A))

    def equal(self, f, g):
        return f == g

    def key(self, f):
        return f.table

    def dom(self, f):
        return f.source

    def cod(self, f):
        return f.target

    def solve(self, A, B, constraints):
        """Some m : A -> B with post o m o pre = rhs for each (pre, post, rhs)."""
        for m in self.hom(A, B):
            if all(self.equal(_sandwich(self, pre, m, post), rhs) for pre, post, rhs in constraints):
                return m
        return None

    def split_idempotent(self, e):
        """(image, r, s) with r o s = id and s o r = e."""
        A = e.source
        image = tuple(x for x in A if e(x) == x)
        r = FinMap(A, image, tuple(e(x) for x in A))
        s = FinMap(image, A, image)
        return image, r, s


class ChainBase:
    """Bounded complexes of F_p vector spaces (terminal diagram shape)."""
    name = "chain"

    def hom(self, A, B):
        H = ch.hom_chain(A, B)
        return [ch.hom_element(H, A, B, v) for v in fp.span_elements(H.basis, A.p)] \
            if H.dim else [ch.zero_chain(A, B)]

    def compose(self, g, f):
        return ch.compose_chain(g, f)

    def identity(self, A):
        return ch.identity_chain(A)

    def equal(self, f, g):
        return ch.chain_equal(f, g)

    def key(self, f):
        return tuple((n, o, f.at(n, o).tobytes()) for n in f.degrees() for o in f.source.base.objects)

    def dom(self, f):
        return f.source

    def cod(self, f):
        return f.target

    def solve(self, A, B, constraints):
        """Some chain map m : A -> B with post o m o pre = rhs for each (pre, post, rhs).

        pre or post may be None for an identity. Solved as one linear system
        over a basis of Hom(A, B).
        """
        H = ch.hom_chain(A, B)
        cols, rhs = [], []
        for pre, post, r in constraints:
            R = ch.hom_chain(r.source, r.target)
            block = [R.flatten(_comps(_sandwich(self, pre, ch.hom_element(H, A, B, H.basis[:, j]),
                                                post)))
                     for j in range(H.dim)]
            cols.append(np.stack(block, axis=1) if block else fp.zeros(R.ambient, 0))
            rhs.append(R.flatten(_comps(r)))
        if not cols:
            return ch.hom_element(H, A, B, H.vector(np.zeros(H.dim, dtype=np.int64)))
        c = fp.solve(np.concatenate(cols, axis=0), np.concatenate(rhs), A.p)
        if c is None:
            return None
        return ch.hom_element(H, A, B, H.vector(c))

    def split_idempotent(self, e):
        X, p = e.source, e.source.p
        (o,) = X.base.objects
        basis = {n: e.at(n, o)[:, fp.column_basis(e.at(n, o), p)] for n in X.degrees()}
        mods = {n: ch.module_diagram(X.base, p, {o: B.shape[1]}) for n, B in basis.items()}
        diff = {n: {o: fp.solve(basis[n - 1], fp.mul(X.d(n, o), basis[n], p), p)}
                for n in basis if n - 1 in basis}
        img = ch.chain_diagram(X.base, p, mods, diff)
        s = ch.chain_map(img, X, {n: {o: B} for n, B in basis.items()})
        r = ch.chain_map(X, img, {n: {o: fp.solve(basis[n], e.at(n, o), p)} for n in basis})
        return img, r, s


def _sandwich(B, pre, m, post):
    out = m if pre is None else B.compose(m, pre)
    return out if post is None else B.compose(post, out)


def _comps(f):
    return {(n, o): f.at(n, o) for n in f.degrees() for o in f.source.base.objects}


# -- indices --------------------------------------------------------------

def arrows(c, a, b):
    """Arrows a -> b, i.e. witnesses of a >= b."""
    return c.hom(a, b)


def validate_cofiltering(c):
    """Pair cones and equalizing arrows, or the violations found."""
    cones, equalizers, bad = {}, {}, []
    for i, j in itertools.product(c.objects, repeat=2):
        w = next(((k, u, v) for k in c.objects for u in arrows(c, k, i) for v in arrows(c, k, j)),
                 None)
        if w is None:
            bad.append(("no cone over pair", (i, j)))
        cones[(i, j)] = w
    for i, j in itertools.product(c.objects, repeat=2):
        for u, v in itertools.combinations(arrows(c, i, j), 2):
            w = next((w for k in c.objects for w in arrows(c, k, i)
                      if c.comp(u, w) == c.comp(v, w)), None)
            if w is None:
                bad.append(("parallel pair not equalized", (u, v)))
            equalizers[(u, v)] = w
    rep = ValidationReport(not bad, bad)
    rep.cones, rep.equalizers = cones, equalizers
    return rep


def is_directed_poset(c):
    return c.is_poset() and validate_cofiltering(c).ok


def predecessors(c, k):
    """Objects strictly below k (arrows k -> k')."""
    return [x for x in c.objects if x != k and arrows(c, k, x)]


# -- pro-objects ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ProObject:
    base: object  # FinSetBase or ChainBase
    index: object  # FiniteCategory
    levels: dict  # index object -> base object
    bonding: dict  # index arrow -> base map

    def X(self, i):
        return self.levels[i]

    def b(self, m):
        return self.bonding[m]


def pro_object(base, index, levels, bonding=None):
    """Fill identity bondings; every other arrow must be given."""
    bonding = dict(bonding or {})
    for o in index.objects:
        bonding.setdefault(index.identities[o], base.identity(levels[o]))
    missing = [m for m in index.morphisms if m not in bonding]
    if missing:
        raise ValueError(f"no bonding map for {missing}")
    return ProObject(base, index, dict(levels), bonding)


def tower_object(base, levels, bonds):
    """Levels X_0 <- X_1 <- ... <- X_N with bonds[i] : X_{i+1} -> X_i."""
    n = len(levels) - 1
    assert len(bonds) == n
    c = tower(n)
    bonding = {}
    for m, (s, t) in c.morphisms.items():
        g = base.identity(levels[int(s)])
        for j in range(int(s), int(t), -1):
            g = base.compose(bonds[j - 1], g)
        bonding[m] = g
    return pro_object(base, c, {str(i): x for i, x in enumerate(levels)}, bonding)


def constant_object(base, A):
    c = terminal()
    return pro_object(base, c, {c.objects[0]: A})


def same_pro(X, Y):
    """Structural equality of pro-objects (same index, levels and bondings)."""
    if X is Y:
        return True
    if X.index != Y.index:
        return False
    B = X.base
    return (all(_same_obj(B, X.X(i), Y.X(i)) for i in X.index.objects)
            and all(B.equal(X.b(m), Y.b(m)) for m in X.index.morphisms))


def validate_pro(X):
    bad = []
    B, c = X.base, X.index
    for o in c.objects:
        if not B.equal(X.b(c.identities[o]), B.identity(X.X(o))):
            bad.append(("identity bonding not identity", o))
    for (g, f), h in c.compose.items():
        if not B.equal(B.compose(X.b(g), X.b(f)), X.b(h)):
            bad.append(("bonding not functorial", (g, f)))
    return bad


# -- representatives and pro-maps -----------------------------------------

@dataclass(frozen=True, eq=False)
class Representative:
    theta: dict  # K object -> I object
    maps: dict  # K object -> base map X_theta(k) -> Y_k


@dataclass(frozen=True, eq=False)
class ProMap:
    source: ProObject
    target: ProObject
    rep: Representative


def same_class(X, i1, g1, i2, g2):
    """(i, u, v) with g1 o X(u) = g2 o X(v), u : i -> i1, v : i -> i2; or None.

    This is equality in colim_i Hom(X_i, Y_k), searched directly.
    """
    B, c = X.base, X.index
    for i in c.objects:
        for u in arrows(c, i, i1):
            left = B.compose(g1, X.b(u))
            for v in arrows(c, i, i2):
                if B.equal(left, B.compose(g2, X.b(v))):
                    return (i, u, v)
    return None


def compatibility_witness(X, Y, rep):
    """Per non-identity arrow a : k -> k' of K, the (i, u, v) making the square commute."""
    B, K = X.base, Y.index
    out = {}
    for a in K.non_identities():
        k, k2 = K.src(a), K.tgt(a)
        w = same_class(X, rep.theta[k], B.compose(Y.b(a), rep.maps[k]),
                       rep.theta[k2], rep.maps[k2])
        if w is None:
            return None
        out[a] = w
    return out


def is_representative(X, Y, rep):
    B = X.base
    for k in Y.index.objects:
        f = rep.maps[k]
        i = rep.theta.get(k)
        if i not in X.index.objects:
            return False
        if B.dom(f) != X.X(i) and not _same_obj(B, B.dom(f), X.X(i)):
            return False
    return compatibility_witness(X, Y, rep) is not None


def _same_obj(B, A1, A2):
    if isinstance(B, ChainBase):
        return ch.same_complex(A1, A2)
    return A1 == A2


def promap(X, Y, theta, maps):
    rep = Representative(dict(theta), dict(maps))
    if not is_representative(X, Y, rep):
        raise ValueError("not a compatible representative")
    return ProMap(X, Y, rep)


def identity_promap(X):
    return ProMap(X, X, Representative({i: i for i in X.index.objects},
                                       {i: X.base.identity(X.X(i)) for i in X.index.objects}))


def compose_promaps(g, f):
    """g o f for f : X -> Y, g : Y -> Z; theta = theta_f o theta_g."""
    if not same_pro(f.target, g.source):
        raise ValueError("endpoints do not match")
    B = f.source.base
    theta = {l: f.rep.theta[g.rep.theta[l]] for l in g.target.index.objects}
    maps = {l: B.compose(g.rep.maps[l], f.rep.maps[g.rep.theta[l]])
            for l in g.target.index.objects}
    return ProMap(f.source, g.target, Representative(theta, maps))


def rarefies(X, r2, r1):
    """Does r2 rarefy r1: theta2(k) >= theta1(k) with g_k = f_k o b for a bonding b."""
    B, c = X.base, X.index
    for k, g in r2.maps.items():
        if not any(B.equal(g, B.compose(r1.maps[k], X.b(u)))
                   for u in arrows(c, r2.theta[k], r1.theta[k])):
            return False
    return True


def reps_equivalent(f1, f2):
    """(True, common rarefaction) or (False, first level k with no witness)."""
    if not (same_pro(f1.source, f2.source) and same_pro(f1.target, f2.target)):
        raise ValueError("representatives of maps with different endpoints")
    X, B = f1.source, f1.source.base
    theta, maps = {}, {}
    for k in f1.target.index.objects:
        w = same_class(X, f1.rep.theta[k], f1.rep.maps[k], f2.rep.theta[k], f2.rep.maps[k])
        if w is None:
            return False, k
        i, u, _ = w
        theta[k] = i
        maps[k] = B.compose(f1.rep.maps[k], X.b(u))
    r3 = Representative(theta, maps)
    assert rarefies(X, r3, f1.rep) and rarefies(X, r3, f2.rep)
    return True, r3


def equivalent(f1, f2):
    return reps_equivalent(f1, f2)[0]


# -- the Hom formula -------------------------------------------------------

@dataclass
class HomPro:
    maps: list  # one ProMap per element, canonical order
    families: list  # compatible tuples of colimit classes, one per element
    colimits: dict  # k -> ColimitPresentation of colim_i Hom(X_i, Y_k)
    homs: dict  # (i, k) -> enumerated Hom(X_i, Y_k)

    def __len__(self):
        return len(self.maps)

    def element_of(self, f):
        """Index of the element a representative belongs to."""
        fam = []
        for k in f.target.index.objects:
            i = f.rep.theta[k]
            j = _index_of(f.source.base, self.homs[(i, k)], f.rep.maps[k])
            fam.append(self.colimits[k].cocone[i][j])
        return self.families.index(tuple(fam))


def _index_of(B, maps, f):
    key = B.key(f)
    for j, g in enumerate(maps):
        if B.key(g) == key:
            return j
    raise KeyError("map not in enumerated hom-set")


def hom_pro(X, Y):
    """Hom(X, Y) = lim_k colim_i Hom(X_i, Y_k), as explicit pro-maps."""
    B, I, K = X.base, X.index, Y.index
    homs = {(i, k): B.hom(X.X(i), Y.X(k)) for i in I.objects for k in K.objects}
    lookup = {(i, k): {B.key(g): j for j, g in enumerate(hs)} for (i, k), hs in homs.items()}
    Iop = I.opposite()
    colims = {}
    for k in K.objects:
        # i |-> Hom(X_i, Y_k) is a functor on I^op: u : i -> i' acts by precomposition
        act = {u: {j: lookup[(s, k)][B.key(B.compose(g, X.b(u)))]
                   for j, g in enumerate(homs[(t, k)])}
               for u, (s, t) in I.morphisms.items()}
        D = make_diagram(Iop, {i: tuple(range(len(homs[(i, k)]))) for i in I.objects}, act)
        colims[k] = colim_set(D)
    act = {}
    for a, (k, k2) in K.morphisms.items():
        act[a] = {}
        for cls in colims[k].apex:
            i, j = cls
            j2 = lookup[(i, k2)][B.key(B.compose(Y.b(a), homs[(i, k)][j]))]
            act[a][cls] = colims[k2].cocone[i][j2]
    C = make_diagram(K, {k: colims[k].apex for k in K.objects}, act)
    families = lim_set(C)
    maps = []
    for fam in families:
        theta, fs = {}, {}
        for k, (i, j) in zip(K.objects, fam):
            theta[k], fs[k] = i, homs[(i, k)][j]
        maps.append(ProMap(X, Y, Representative(theta, fs)))
    return HomPro(maps, families, colims, homs)


def representative_classes(X, Y):
    """Equivalence classes of representatives, found without the Hom formula.

    Equivalence is decided level by level (a common rarefaction exists iff
    it exists at every k), so classes are products of per-level classes of
    pairs (theta(k), f_k) under ``same_class``, kept when compatible.
    """
    B, I, K = X.base, X.index, Y.index
    per_level = []
    for k in K.objects:
        pairs = [(i, g) for i in I.objects for g in B.hom(X.X(i), Y.X(k))]
        reps = []
        for i, g in pairs:
            if not any(same_class(X, i, g, i2, g2) is not None for i2, g2 in reps):
                reps.append((i, g))
        per_level.append(reps)
    # depth-first over the product, checking each arrow once both ends are chosen
    ks = list(K.objects)
    pos = {k: t for t, k in enumerate(ks)}
    due = {t: [] for t in range(len(ks))}
    for a in K.non_identities():
        due[max(pos[K.src(a)], pos[K.tgt(a)])].append(a)
    out, chosen = [], []

    def fits(a):
        (i, g), (i2, g2) = chosen[pos[K.src(a)]], chosen[pos[K.tgt(a)]]
        return same_class(X, i, B.compose(Y.b(a), g), i2, g2) is not None

    def extend(t):
        if t == len(ks):
            rep = Representative({k: c[0] for k, c in zip(ks, chosen)},
                                 {k: c[1] for k, c in zip(ks, chosen)})
            out.append(ProMap(X, Y, rep))
            return
        for c in per_level[t]:
            chosen.append(c)
            if all(fits(a) for a in due[t]):
                extend(t + 1)
            chosen.pop()

    extend(0)
    return out


def all_representatives(X, Y):
    """Every compatible representative (exponential; tiny instances only)."""
    B, I, K = X.base, X.index, Y.index
    ks = list(K.objects)
    for theta in itertools.product(I.objects, repeat=len(ks)):
        for fs in itertools.product(*[B.hom(X.X(i), Y.X(k)) for i, k in zip(theta, ks)]):
            rep = Representative(dict(zip(ks, theta)), dict(zip(ks, fs)))
            if compatibility_witness(X, Y, rep) is not None:
                yield ProMap(X, Y, rep)


# -- strict and levelwise --------------------------------------------------

def functor_extension(X, Y, rep):
    """An arrow map making theta a functor with {f_k} natural, or None."""
    B, I, K = X.base, X.index, Y.index
    theta, fs = rep.theta, rep.maps
    options = {}
    for a, (k, k2) in K.morphisms.items():
        if a == K.identities[k]:
            options[a] = [I.identities[theta[k]]]
            continue
        left = B.compose(Y.b(a), fs[k])
        options[a] = [u for u in arrows(I, theta[k], theta[k2])
                      if B.equal(left, B.compose(fs[k2], X.b(u)))]
        if not options[a]:
            return None
    names = list(K.morphisms)
    for choice in itertools.product(*[options[a] for a in names]):
        F = dict(zip(names, choice))
        if all(I.comp(F[g], F[f]) == F[h] for (g, f), h in K.compose.items()):
            return F
    return None


def classify_representative(f):
    """{'strict': bool, 'levelwise': bool, 'functor': arrow map or None}."""
    X, Y, rep = f.source, f.target, f.rep
    B = X.base
    F = functor_extension(X, Y, rep)
    levelwise = (X.index == Y.index
                 and all(rep.theta[k] == k for k in Y.index.objects)
                 and all(B.equal(B.compose(Y.b(a), rep.maps[Y.index.src(a)]),
                                 B.compose(rep.maps[Y.index.tgt(a)], X.b(a)))
                         for a in Y.index.morphisms))
    return {"strict": F is not None, "levelwise": levelwise, "functor": F}


@dataclass
class Reindexing:
    """X' with an isomorphism X -> X' (to) and its inverse (back), both checked."""
    obj: ProObject
    to: ProMap
    back: ProMap
    verified: bool


def _iso_verified(X, Xp, to, back):
    return (equivalent(compose_promaps(back, to), identity_promap(X))
            and equivalent(compose_promaps(to, back), identity_promap(Xp)))


def stable_idempotent(c):
    """(m, e): e idempotent on m, arrows from m to every object, u e = v e for parallel u, v."""
    for m in c.objects:
        if not all(arrows(c, m, i) for i in c.objects):
            continue
        for e in arrows(c, m, m):
            if c.comp(e, e) != e:
                continue
            if all(c.comp(u, e) == c.comp(v, e)
                   for i in c.objects for u in arrows(c, m, i) for v in arrows(c, m, i)):
                return m, e
    return None


def mardesic_reindex(X):
    """Reindex X by a cofinite strongly directed poset.

    Directed posets are returned unchanged. Otherwise the finite
    cofiltering index has an object m with a stable idempotent e, and X is
    isomorphic to the constant pro-object on the splitting of X(e).
    """
    if not validate_cofiltering(X.index).ok:
        raise PreconditionError("index is not cofiltering")
    if X.index.is_poset():
        ident = identity_promap(X)
        return Reindexing(X, ident, ident, True)
    found = stable_idempotent(X.index)
    assert found is not None, "finite cofiltering category without a stable idempotent"
    m, e = found
    B = X.base
    img, r, s = B.split_idempotent(X.b(e))
    Xp = constant_object(B, img)
    (pt,) = Xp.index.objects
    to = ProMap(X, Xp, Representative({pt: m}, {pt: r}))
    back = ProMap(Xp, X, Representative(
        {i: pt for i in X.index.objects},
        {i: B.compose(X.b(arrows(X.index, m, i)[0]), s) for i in X.index.objects}))
    return Reindexing(Xp, to, back, _iso_verified(X, Xp, to, back))


def strict_representative(f):
    """A strict representative equivalent to f, by induction on predecessors.

    Needs both indices to be directed posets (run mardesic_reindex first).
    """
    X, Y = f.source, f.target
    I, K = X.index, Y.index
    if not (is_directed_poset(I) and is_directed_poset(K)):
        raise PreconditionError("indices must be directed posets; apply mardesic_reindex first")
    B = X.base
    order = sorted(K.objects, key=lambda k: (len(predecessors(K, k)), K.objects.index(k)))
    by_preds = sorted(I.objects, key=lambda i: (len(predecessors(I, i)), I.objects.index(i)))
    theta, maps = {}, {}
    for k in order:
        below = [k2 for k2 in predecessors(K, k)]
        chosen = None
        for i in by_preds:
            up = arrows(I, i, f.rep.theta[k])
            if not up or not all(arrows(I, i, theta[k2]) for k2 in below):
                continue
            g = B.compose(f.rep.maps[k], X.b(up[0]))
            if all(B.equal(B.compose(Y.b(arrows(K, k, k2)[0]), g),
                           B.compose(maps[k2], X.b(arrows(I, i, theta[k2])[0])))
                   for k2 in below):
                chosen = (i, g)
                break
        if chosen is None:
            raise AssertionError("no strict extension at level %r" % (k,))
        theta[k], maps[k] = chosen
    return Representative(theta, maps)


def _pair_name(k, i):
    return f"{k}|{i}"


@dataclass
class LevelwiseReplacement:
    map: ProMap  # L(f) : X' -> Y', theta = identity
    to_X: ProMap  # X -> X'
    back_X: ProMap
    to_Y: ProMap  # Y -> Y'
    back_Y: ProMap
    verified: bool


def levelwise_replace(f):
    """Reindex f over the graph of a strict theta so it becomes levelwise.

    Index P = {(k, i) : i >= theta(k), the strict square commutes from i for
    every k' <= k}, ordered componentwise. X' = X o pr_I, Y' = Y o pr_K.
    """
    X, Y = f.source, f.target
    rx, ry = mardesic_reindex(X), mardesic_reindex(Y)
    g = compose_promaps(ry.to, compose_promaps(f, rx.back))
    Xr, Yr = rx.obj, ry.obj
    rep = strict_representative(g)
    g = ProMap(Xr, Yr, rep)
    B, I, K = Xr.base, Xr.index, Yr.index
    theta = rep.theta
    pairs = []
    for k in K.objects:
        for i in I.objects:
            up = arrows(I, i, theta[k])
            if not up:
                continue
            fk = B.compose(rep.maps[k], Xr.b(up[0]))
            ok = True
            for k2 in predecessors(K, k):
                down = arrows(I, i, theta[k2])
                if not down or not B.equal(B.compose(Yr.b(arrows(K, k, k2)[0]), fk),
                                           B.compose(rep.maps[k2], Xr.b(down[0]))):
                    ok = False
                    break
            if ok:
                pairs.append((k, i))
    covers = [(_pair_name(*a), _pair_name(*b)) for a in pairs for b in pairs
              if a != b and arrows(K, a[0], b[0]) and arrows(I, a[1], b[1])]
    P = poset([_pair_name(*a) for a in pairs], covers)
    split = {_pair_name(*a): a for a in pairs}

    def along(Z, which):
        levels = {q: Z.X(split[q][which]) for q in P.objects}
        bond = {}
        for m, (s, t) in P.morphisms.items():
            a, b = split[s][which], split[t][which]
            bond[m] = Z.b(arrows(Z.index, a, b)[0])
        return pro_object(B, P, levels, bond)

    Xp, Yp = along(Xr, 1), along(Yr, 0)
    Lmaps = {}
    for q, (k, i) in split.items():
        Lmaps[q] = B.compose(rep.maps[k], Xr.b(arrows(I, i, theta[k])[0]))
    L = ProMap(Xp, Yp, Representative({q: q for q in P.objects}, Lmaps))
    toX, backX = _projection_iso(Xr, Xp, split, 1)
    toY, backY = _projection_iso(Yr, Yp, split, 0)
    toX = compose_promaps(toX, rx.to)
    backX = compose_promaps(rx.back, backX)
    toY = compose_promaps(toY, ry.to)
    backY = compose_promaps(ry.back, backY)
    verified = (rx.verified and ry.verified and classify_representative(L)["levelwise"]
                and _iso_verified(X, Xp, toX, backX) and _iso_verified(Y, Yp, toY, backY)
                and equivalent(compose_promaps(backY, compose_promaps(L, toX)), f))
    return LevelwiseReplacement(L, toX, backX, toY, backY, verified)


def _projection_iso(Z, Zp, split, which):
    """Z -> Z' picks a pair over each level; Z' -> Z is the projection."""
    B = Z.base
    P = Zp.index
    theta, maps = {}, {}
    for q in P.objects:
        theta[q] = split[q][which]
        maps[q] = B.identity(Z.X(split[q][which]))
    to = ProMap(Z, Zp, Representative(theta, maps))
    theta, maps = {}, {}
    for j in Z.index.objects:
        q = next(q for q in P.objects if arrows(Z.index, split[q][which], j))
        theta[j] = q
        maps[j] = Z.b(arrows(Z.index, split[q][which], j)[0])
    back = ProMap(Zp, Z, Representative(theta, maps))
    return to, back
