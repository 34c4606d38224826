"""Factorization in pro-(chain complexes) by running the small object argument
in the opposite category.

The stages are pullbacks in pro-C, so the map built from them (gamma in the
certificate) is the fibration part: a tower of pullbacks of finite products
of constant fibrations. delta = rho_final is the part with the left lifting
property against the generating class.

Classes:
    M  constant fibrations (degreewise surjective); levels factored with J.
    N  constant trivial fibrations; levels factored with I.

Pro-objects here are indexed by finite directed posets. Such an index has a
greatest element, and all equalities of pro-maps are decided there.

S(f) is a product over the levels of a levelwise representative. With
levels="all" that is every level of the graph index. With levels="cofinal"
it is the greatest level alone, which is itself a cofiltering index carrying
an isomorphic levelwise representative; every square factors there. For
class M the full product never stabilizes at a finite stage once two levels
disagree (the fiber product of the E_i has extra homology), so the pro
factorization defaults to the cofinal truncation.
"""

from dataclasses import dataclass, field

from . import chains as ch
from .equichain import factorize_equivariant, lift_linear
from .fincat import poset, ssorted
from .procalc import (ChainBase, PreconditionError, ProMap, Representative, arrows,
                      compose_promaps, constant_object, equivalent, identity_promap,
                      is_directed_poset, levelwise_replace, predecessors, pro_object, same_pro)
from .soa import (Budget, BudgetExhausted, CellAdapter, Match, MatchingSystem, Opposite,
                  OppositeSystem, SmallnessViolation, Square, soa_factorize)

CLASSES = {"M": "J", "N": "I"}
MAX_LEVEL_DIM = 10


def top_level(c):
    """The greatest object of a finite directed poset."""
    tops = [o for o in c.objects if all(arrows(c, o, x) for x in c.objects)]
    if not tops:
        raise PreconditionError("index has no greatest element")
    return tops[0]


def by_height(c):
    """Objects ordered by number of predecessors (least levels first)."""
    return sorted(c.objects, key=lambda o: (len(predecessors(c, o)), str(o)))


def _bond(X, i, j):
    return X.b(arrows(X.index, i, j)[0])


def _at_top(f):
    """(w, map X_w -> Y_k) for a map into a constant pro-object."""
    X = f.source
    (k,) = f.target.index.objects
    w = top_level(X.index)
    return w, X.base.compose(f.rep.maps[k], _bond(X, w, f.rep.theta[k]))


def constant_map(A, B, g):
    """The map of constant pro-objects given by a base map g : A_* -> B_*."""
    (a,), (b,) = A.index.objects, B.index.objects
    return ProMap(A, B, Representative({b: a}, {b: g}))


def is_constant(X):
    """One level, or all levels equal with identity bondings."""
    B = X.base
    first = X.X(X.index.objects[0])
    return all(ch.same_complex(X.X(i), first) for i in X.index.objects) and all(
        B.equal(X.b(m), B.identity(X.X(X.index.src(m)))) for m in X.index.morphisms)


def level_map(X, A, i, m):
    """The map X -> A (A constant) given by m : X_i -> A_*."""
    (a,) = A.index.objects
    return ProMap(X, A, Representative({a: i}, {a: m}))


def factor_through_constant(f):
    """Least level i and m : X_i -> A with f = m o phi_i, for f : X -> A, A constant."""
    X = f.source
    B = X.base
    (a,) = f.target.index.objects
    w, fw = _at_top(f)
    for i in by_height(X.index):
        m = B.solve(X.X(i), f.target.X(a), [(_bond(X, w, i), None, fw)])
        if m is not None:
            return i, m
    raise SmallnessViolation("map into a constant does not factor through any level")


# -- generating fibrations ------------------------------------------------------

@dataclass
class GeneratingFibration:
    """A constant map tagged with its class, checked on ranks and homology."""
    map: object  # chain map over the terminal category
    cls: str  # "M" or "N"
    surjective: bool
    acyclic_kernel: bool

    @property
    def verified(self):
        return self.surjective and (self.cls == "M" or self.acyclic_kernel)

    def as_pro(self, base=None):
        base = base or ChainBase()
        A = constant_object(base, self.map.source)
        B = constant_object(base, self.map.target)
        return constant_map(A, B, self.map)


def kernel(g):
    Y = g.target
    return ch.pullback(g, ch.zero_chain(ch.zero_complex(Y.base, Y.p), Y)).obj


def generating_fibration(g, cls):
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}")
    return GeneratingFibration(g, cls, ch.is_degreewise_surjective(g),
                               not ch.homology_dims(kernel(g)))


def sample_fibrations(maps, cls, budget=None):
    """Generating fibrations taken as the fibration part of level factorizations."""
    out = []
    for f in maps:
        cert, _ = factorize_equivariant(f, CLASSES[cls], budget)
        if cert.stabilized:
            gf = generating_fibration(cert.delta, cls)
            assert gf.verified
            out.append(gf)
    return out


def probe_squares(rng, p, fibrations, tries=4):
    """Commuting squares from p : X -> Z to constant generating fibrations g.

    The bottom Z -> B is drawn at the top level of Z; the top is then solved
    for, and the draw is dropped when no top exists.
    """
    B = ChainBase()
    X, Z = p.source, p.target
    wz = top_level(Z.index)
    out = []
    for gf in fibrations:
        g = gf.as_pro(B)
        A, Bc = g.source, g.target
        for _ in range(tries):
            H = ch.hom_chain(Z.X(wz), Bc.X("*"))
            c = rng.integers(0, Z.X(wz).p, size=H.dim)
            bz = ch.hom_element(H, Z.X(wz), Bc.X("*"), H.vector(c))
            bottom = level_map(Z, Bc, wz, bz)
            wx, lower = _at_top(compose_promaps(bottom, p))
            t = B.solve(X.X(wx), A.X("*"), [(None, g.rep.maps["*"], lower)])
            if t is not None:
                out.append(Square(g, level_map(X, A, wx, t), bottom, gf))
    return out


# -- the pro adapter -------------------------------------------------------------

@dataclass
class ProPullback:
    obj: object
    to_z: ProMap
    to_a: ProMap
    levels: dict  # level of Z -> chain pullback
    start: object  # least level the map to the constant factors through


class ProAdapter(CellAdapter):
    """pro-(bounded F_p complexes) with the operations the opposite engine needs."""

    def __init__(self):
        self.B = ChainBase()

    def dom(self, f): return f.source
    def cod(self, f): return f.target
    def identity(self, X): return identity_promap(X)
    def compose(self, g, f): return compose_promaps(g, f)
    def same_object(self, X, Y): return same_pro(X, Y)

    def equal(self, f, g):
        return (same_pro(f.source, g.source) and same_pro(f.target, g.target)
                and equivalent(f, g))

    def pullback(self, g, s):
        """Pullback of Z -g-> Q <-s- P with P, Q constant, over the levels above
        the one g factors through."""
        Z, P = g.source, s.source
        B = self.B
        i0, m0 = factor_through_constant(g)
        s0 = s.rep.maps["*"]
        I = Z.index
        U = [i for i in I.objects if arrows(I, i, i0)]
        pbs = {i: ch.pullback(B.compose(m0, _bond(Z, i, i0)), s0) for i in U}
        covers = [(a, b) for a in U for b in U if a != b and arrows(I, a, b)]
        c = poset(U, covers)
        bond = {}
        for m, (a, b) in c.morphisms.items():
            if a != b:
                bond[m] = ch.induced_into_pullback(
                    pbs[b], B.compose(_bond(Z, a, b), pbs[a].to_z), pbs[a].to_a)
        obj = pro_object(B, c, {i: pbs[i].obj for i in U}, bond)
        w = top_level(I)
        to_z = ProMap(obj, Z, Representative(
            {j: w for j in I.objects},
            {j: B.compose(_bond(Z, w, j), pbs[w].to_z) for j in I.objects}))
        to_a = level_map(obj, P, i0, pbs[i0].to_a)
        return ProPullback(obj, to_z, to_a, pbs, i0)

    def induced_into(self, pb, u, v):
        """W -> pullback from u : W -> Z and v : W -> P, read at the top level of W."""
        W = u.source
        B = self.B
        w = top_level(W.index)
        vw = B.compose(v.rep.maps["*"], _bond(W, w, v.rep.theta["*"]))
        theta, maps = {}, {}
        for i, level in pb.levels.items():
            ui = B.compose(u.rep.maps[i], _bond(W, w, u.rep.theta[i]))
            theta[i] = w
            maps[i] = ch.induced_into_pullback(level, ui, vw)
        return ProMap(W, pb.obj, Representative(theta, maps))

    def factor_through_epi(self, h, proj):
        """m : Z_beta -> B with m o proj = h, at the least level that works."""
        Zl, Zb = proj.source, proj.target
        w, hw = _at_top(h)
        for i in by_height(Zb.index):
            pre = self.B.compose(proj.rep.maps[i], _bond(Zl, w, proj.rep.theta[i]))
            m = self.B.solve(Zb.X(i), h.target.X("*"), [(pre, None, hw)])
            if m is not None:
                return level_map(Zb, h.target, i, m)
        return None

    def find_colift(self, p, square):
        """lam : Z -> A with lam o p = top and g o lam = bottom, for p : X -> Z."""
        X, Z = p.source, p.target
        g = square.l
        A = g.source
        wx, top = _at_top(square.top)
        wz, bottom = _at_top(square.bottom)
        for i in by_height(Z.index):
            pre = self.B.compose(p.rep.maps[i], _bond(X, wx, p.rep.theta[i]))
            lam = self.B.solve(Z.X(i), A.X("*"), [(pre, None, top),
                                                  (_bond(Z, wz, i), g.rep.maps["*"], bottom)])
            if lam is not None:
                return level_map(Z, A, i, lam)
        return None


# -- the matching construction ---------------------------------------------------

class ProSystem(MatchingSystem):
    """f -> S(f) = product of the level fibrations p_i, with t_f : f -> S(f).

    f is first replaced by a levelwise map; each level f_i is factored as
    q_i then p_i with the equivariant argument over the terminal category.
    """
    functorial = False

    def __init__(self, cls="M", level_budget=None, levels="cofinal", max_dim=MAX_LEVEL_DIM):
        if cls not in CLASSES:
            raise ValueError(f"unknown class {cls!r}")
        self.cls = cls
        self.level_budget = level_budget or Budget(stage_limit=8)
        self.levels = levels
        self.max_dim = max_dim
        self.B = ChainBase()
        self._cache = {}

    def comatch(self, f):
        hit = self._cache.get(id(f))
        if hit is not None and hit[0] is f:
            return hit[1]
        m = build_S(f, self.cls, self.level_budget, self.B, self.levels, self.max_dim)
        self._cache[id(f)] = (f, m)
        return m

    def cosquares(self, f):
        """The square t_f itself. A colift against it exhibits delta at the top
        level as a retract of a trivial cofibration, so it is a complete probe."""
        m = self.comatch(f)
        return [Square(m.S, m.top, m.bottom, "t")]

    def cofactor(self, match, square):
        """(a, b, None) with a : Q -> B, b : P -> A a map S(f) -> g and
        b o t_top = top, a o t_bottom = bottom."""
        fs = factor_through_S(match, square, self.B)
        return fs.a, fs.b, None


def _widest(f):
    return max([f.source.dim(n, o) for n in f.source.degrees() for o in f.source.base.objects]
               + [f.target.dim(n, o) for n in f.target.degrees() for o in f.target.base.objects]
               + [0])


def build_S(f, cls="M", level_budget=None, base=None, levels="all", max_dim=MAX_LEVEL_DIM):
    """The map S(f) of constant pro-objects and t_f = (top, bottom) : f -> S(f).

    levels: "all" takes the product over the whole levelwise index, "cofinal"
    over its greatest level only. Level maps wider than max_dim in some degree
    raise BudgetExhausted (the level factorization enumerates 2^dim points).
    """
    if levels not in ("all", "cofinal"):
        raise ValueError(f"unknown level selection {levels!r}")
    B = base or ChainBase()
    L = levelwise_replace(f)
    if not L.verified:
        raise AssertionError("levelwise replacement failed to verify")
    Xp, Yp = L.map.source, L.map.target
    P = Xp.index
    order = ssorted(P.objects) if levels == "all" else [top_level(P)]
    parts = {}
    for q in order:
        if _widest(L.map.rep.maps[q]) > max_dim:
            raise BudgetExhausted(f"level {q} is wider than {max_dim}")
        cert, _ = factorize_equivariant(L.map.rep.maps[q], CLASSES[cls], level_budget)
        if not cert.stabilized:
            raise BudgetExhausted(f"level {q} did not stabilize")
        parts[q] = (cert.gamma, cert.delta)
    Esum, _, projE = ch.direct_sum([parts[q][0].target for q in order])
    Ysum, _, projY = ch.direct_sum([Yp.X(q) for q in order])
    Ssum = ch.tuple_map([B.compose(parts[q][1], projE[j]) for j, q in enumerate(order)], Ysum)
    Pc, Qc = constant_object(B, Esum), constant_object(B, Ysum)
    S = constant_map(Pc, Qc, Ssum)
    r = top_level(P)
    tX = ch.tuple_map([B.compose(parts[q][0], _bond(Xp, r, q)) for q in order], Esum)
    tY = ch.tuple_map([_bond(Yp, r, q) for q in order], Ysum)
    top = compose_promaps(level_map(Xp, Pc, r, tX), L.to_X)
    bottom = compose_promaps(level_map(Yp, Qc, r, tY), L.to_Y)
    info = {"replacement": L, "levels": parts, "order": order,
            "projE": projE, "projY": projY}
    return Match(S, top, bottom, list(order), info)


@dataclass
class SFactorization:
    level: object  # k in the levelwise index
    lift: object  # E_k -> A, the diagonal against q_k
    a: ProMap  # cod S(f) -> cod g
    b: ProMap  # dom S(f) -> dom g


def factor_through_S(match, square, base=None):
    """Factor a square f -> g (g a constant fibration) through t_f.

    The square is pushed to the least level k of the levelwise index where
    both of its maps are defined and commute with f_k; the lift of q_k against
    g there gives the map out of the k-th factor of S(f).
    """
    B = base or ChainBase()
    info = match.info
    L = info["replacement"]
    Xp, Yp = L.map.source, L.map.target
    g = square.l
    k1, t1 = factor_through_constant(compose_promaps(square.top, L.back_X))
    k2, b1 = factor_through_constant(compose_promaps(square.bottom, L.back_Y))
    P = Xp.index
    g0 = g.rep.maps["*"]
    for k in by_height(P):
        if k not in info["levels"]:
            continue
        if not (arrows(P, k, k1) and arrows(P, k, k2)):
            continue
        tk = B.compose(t1, _bond(Xp, k, k1))
        bk = B.compose(b1, _bond(Yp, k, k2))
        if not B.equal(B.compose(g0, tk), B.compose(bk, L.map.rep.maps[k])):
            continue
        q, pk = info["levels"][k]
        mu = lift_linear(g0, Square(q, tk, B.compose(bk, pk)))
        assert mu is not None, f"level {k} does not lift: is g really a fibration?"
        j = info["order"].index(k)
        b = constant_map(match.S.source, g.source, B.compose(mu, info["projE"][j]))
        a = constant_map(match.S.target, g.target, B.compose(bk, info["projY"][j]))
        return SFactorization(k, mu, a, b)
    raise SmallnessViolation("square does not factor through a level of t_f")


@dataclass
class ProFactorization:
    cert: object
    system: object
    adapter: object = field(default_factory=lambda: Opposite(ProAdapter()))

    @property
    def fibration(self):
        """Z -> Y, the tower of pullbacks."""
        return self.cert.gamma

    @property
    def lifting_part(self):
        """X -> Z, with the left lifting property against the class."""
        return self.cert.delta

    @property
    def stages(self):
        return self.cert.stages_used


def pro_factorize(f, cls="M", budget=None, level_budget=None, levels="cofinal"):
    """Factor a map of pro-complexes as fibration o (maps lifting against cls)."""
    for X in (f.source, f.target):
        if not isinstance(X.base, ChainBase):
            raise PreconditionError("pro_factorize needs pro-objects of chain complexes")
        if not is_directed_poset(X.index):
            raise PreconditionError("index is not a finite directed poset")
        if len(X.X(X.index.objects[0]).base.objects) != 1:
            raise PreconditionError("levels must be complexes over the terminal category")
    for k, m in f.rep.maps.items():
        if not ch.is_chain_map(m):
            raise PreconditionError(f"level map {k!r} is not a chain map")
    adapter = Opposite(ProAdapter())
    system = OppositeSystem(ProSystem(cls, level_budget, levels))
    cert = soa_factorize(adapter, f, system, budget or Budget(stage_limit=6))
    return ProFactorization(cert, system, adapter)
