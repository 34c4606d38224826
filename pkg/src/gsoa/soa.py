"""The generalized small object argument, run for a finite stage budget.

The engine is written against a ``CellAdapter`` (the ambient category)
and a ``MatchingSystem`` (the augmented construction f -> (S(f), t_f)).
Stage beta+1 is the pushout of S(rho_beta) along the top of t(rho_beta),
and rho_{beta+1} is induced by rho_beta and the bottom of t(rho_beta).
The transfinite colimit is replaced by the last stage reached: either
the probe squares all lift (stabilized) or the budget runs out.
"""

from dataclasses import dataclass, field


class SmallnessViolation(RuntimeError):
    """A square's top map does not factor through any recorded stage."""


class BudgetExhausted(RuntimeError):
    pass


@dataclass
class Square:
    """A commutative square l -> p: top: dom(l) -> dom(p), bottom: cod(l) -> cod(p)."""
    l: object
    top: object
    bottom: object
    meta: object = None


@dataclass
class Match:
    """S(f) together with t_f = (top, bottom) : S(f) -> f."""
    S: object
    top: object
    bottom: object
    cells: list = field(default_factory=list)
    info: dict = field(default_factory=dict)


class CellAdapter:
    """Category operations used by the engine. Subclasses fill these in."""
    dual = False

    def dom(self, f): raise NotImplementedError
    def cod(self, f): raise NotImplementedError
    def identity(self, X): raise NotImplementedError
    def compose(self, g, f): raise NotImplementedError  # g after f
    def equal(self, f, g): raise NotImplementedError
    def same_object(self, X, Y): raise NotImplementedError
    def pushout(self, s, a): raise NotImplementedError  # -> obj with .obj .from_b .from_z
    def induced(self, po, u, v): raise NotImplementedError  # out of pushout, u on Z, v on B
    def factor_through(self, h, incl): raise NotImplementedError
    def find_lift(self, p, square): raise NotImplementedError

    def add(self, f, g):
        raise TypeError(f"{type(self).__name__} is not additive")

    def commutes(self, p, square):
        return self.equal(self.compose(p, square.top), self.compose(square.bottom, square.l))


class MatchingSystem:
    """The augmented construction f -> (S(f), t_f) plus its probe squares."""
    functorial = True

    def match(self, f): raise NotImplementedError

    def squares(self, f):
        """Generator squares into f used as the stabilization probe."""
        raise NotImplementedError

    def factor(self, match, square):
        """Factor a square into f through t_f.

        Returns (a, b, direct): a: dom(l) -> A and b: cod(l) -> B form a
        morphism of maps l -> S(f) with t_f o (a, b) = square, except that
        a non-functorial system may also return ``direct``, a lift of part
        of the square against f itself, to be added to the cell part.
        """
        raise NotImplementedError

    def morphism(self, m1, m2, g_top, g_bottom):
        """S(g) for a morphism of maps g = (g_top, g_bottom) : f1 -> f2."""
        raise NotImplementedError


@dataclass
class Budget:
    stage_limit: int = 8
    probes: object = None  # callable rho -> list[Square]; default: system.squares
    stop_early: bool = True

    def __post_init__(self):
        if self.stage_limit < 0:
            raise ValueError("stage_limit must be >= 0")


@dataclass
class Stage:
    index: int
    Z: object
    rho: object
    match: Match
    pushout: object
    step: object  # Z_beta -> Z_{beta+1}
    cell: object  # B -> Z_{beta+1}


@dataclass
class FactorizationCertificate:
    f: object
    stages: list
    Z: object
    gamma: object
    delta: object
    stabilized: bool
    inclusions: list  # Z_beta -> Z_final, one per stage plus the final identity
    rhos: list  # rho_beta for every beta including the final one
    functorial: bool = True

    @property
    def stages_used(self):
        return len(self.stages)


def _probes(budget, system, rho):
    if budget.probes is not None:
        return budget.probes(rho)
    return system.squares(rho)


def passes_probes(adapter, p, squares):
    return all(adapter.find_lift(p, sq) is not None for sq in squares)


def soa_factorize(adapter, f, system, budget=None):
    """Factor f as delta o gamma with gamma a relative cell map.

    Probes are checked before every step, so a map that already lifts
    against them gets gamma = identity and no stages.
    """
    budget = budget or Budget()
    Z = adapter.dom(f)
    rho = f
    gamma = adapter.identity(Z)
    stages, rhos = [], [f]
    stabilized = False
    # a construction that runs out of room raises BudgetExhausted: stop, unstabilized
    try:
        for beta in range(budget.stage_limit + 1):
            if budget.stop_early and passes_probes(adapter, rho, _probes(budget, system, rho)):
                stabilized = True
                break
            if beta == budget.stage_limit:
                break
            match = system.match(rho)
            po = adapter.pushout(match.S, match.top)
            rho_next = adapter.induced(po, rho, match.bottom)
            stages.append(Stage(beta, Z, rho, match, po, po.from_z, po.from_b))
            gamma = adapter.compose(po.from_z, gamma)
            Z, rho = po.obj, rho_next
            rhos.append(rho)
        if not budget.stop_early:
            stabilized = passes_probes(adapter, rho, _probes(budget, system, rho))
    except BudgetExhausted:
        stabilized = False
    inclusions = [adapter.identity(Z)]
    for st in reversed(stages):
        inclusions.insert(0, adapter.compose(inclusions[0], st.step))
    cert = FactorizationCertificate(f, stages, Z, gamma, rho, stabilized, inclusions, rhos,
                                    system.functorial)
    assert adapter.equal(adapter.compose(cert.delta, cert.gamma), f), "delta o gamma != f"
    return cert


def verify_rlp(adapter, p, squares):
    """Per square: ("lift", l) with both triangles exact, or ("counterexample", i)."""
    out = []
    for i, sq in enumerate(squares):
        if not adapter.commutes(p, sq):
            raise ValueError(f"square {i} does not commute")
        lift = adapter.find_lift(p, sq)
        if lift is None:
            out.append(("counterexample", i))
        else:
            assert adapter.equal(adapter.compose(lift, sq.l), sq.top)
            assert adapter.equal(adapter.compose(p, lift), sq.bottom)
            out.append(("lift", lift))
    return out


@dataclass
class ProofLift:
    lift: object
    stage: int
    route: str  # "cell": through t(rho_beta); "direct": lifted against rho_beta


def lift_through_factorization(adapter, cert, square, system):
    """The lift built in the proof: least stage the top map factors through,
    then through t(rho_beta) and the next stage's cell map."""
    if not cert.stabilized:
        raise ValueError("certificate is not stabilized")
    if not adapter.commutes(cert.delta, square):
        raise ValueError("square does not commute")
    for beta, incl in enumerate(cert.inclusions):
        m = adapter.factor_through(square.top, incl)
        if m is None:
            continue
        local = Square(square.l, m, square.bottom, square.meta)
        if beta == len(cert.stages):
            lift = adapter.find_lift(cert.rhos[beta], local)
            if lift is None:
                raise SmallnessViolation("final stage does not lift the square")
            return ProofLift(adapter.compose(incl, lift), beta, "direct")
        st = cert.stages[beta]
        a, b, direct = system.factor(st.match, local)
        piece = adapter.compose(st.cell, b)
        route = "cell"
        if direct is not None:
            piece = adapter.add(piece, adapter.compose(st.step, direct))
            route = "cell+direct"
        lift = adapter.compose(cert.inclusions[beta + 1], piece)
        return ProofLift(lift, beta, route)
    raise SmallnessViolation("top map factors through no recorded stage")


@dataclass
class InducedMap:
    xi: list  # xi_beta : Z^{f1}_beta -> Z^{f2}_beta
    S: list  # (h1, h2) = S(g_beta) per stage
    g_top: object
    g_bottom: object

    @property
    def final(self):
        return self.xi[-1]


def induced_map(adapter, system, g_top, g_bottom, c1, c2):
    """Stagewise naturality maps xi^g for g = (g_top, g_bottom) : f1 -> f2."""
    if not system.functorial or not (c1.functorial and c2.functorial):
        raise ValueError("matching system is not functorial; naturality is not guaranteed")
    if c1.stages_used != c2.stages_used:
        raise ValueError("certificates ran a different number of stages")
    xi, hs = [g_top], []
    for s1, s2 in zip(c1.stages, c2.stages):
        h1, h2 = system.morphism(s1.match, s2.match, xi[-1], g_bottom)
        nxt = adapter.induced(s1.pushout, adapter.compose(s2.step, xi[-1]),
                              adapter.compose(s2.cell, h2))
        xi.append(nxt)
        hs.append((h1, h2))
    return InducedMap(xi, hs, g_top, g_bottom)


def naturality_violations(adapter, ind, c1, c2):
    """Every square the induced maps must make commute; returns the failing ones."""
    bad = []
    eq, comp = adapter.equal, adapter.compose
    for beta, xi in enumerate(ind.xi):
        if not eq(comp(c2.rhos[beta], xi), comp(ind.g_bottom, c1.rhos[beta])):
            bad.append(("rho", beta))
    for beta, (s1, s2) in enumerate(zip(c1.stages, c2.stages)):
        h1, h2 = ind.S[beta]
        if not eq(comp(ind.xi[beta + 1], s1.step), comp(s2.step, ind.xi[beta])):
            bad.append(("step", beta))
        if not eq(comp(ind.xi[beta + 1], s1.cell), comp(s2.cell, h2)):
            bad.append(("cell", beta))
        if not eq(comp(s2.match.S, h1), comp(h2, s1.match.S)):
            bad.append(("S(g)", beta))
        if not eq(comp(s2.match.top, h1), comp(ind.xi[beta], s1.match.top)):
            bad.append(("t top", beta))
        if not eq(comp(s2.match.bottom, h2), comp(ind.g_bottom, s1.match.bottom)):
            bad.append(("t bottom", beta))
    if not eq(comp(ind.final, c1.gamma), comp(c2.gamma, ind.g_top)):
        bad.append(("gamma", None))
    if not eq(comp(c2.delta, ind.final), comp(ind.g_bottom, c1.delta)):
        bad.append(("delta", None))
    return bad


def replay(adapter, cert):
    """Re-execute every recorded pushout; True iff gamma and delta are reproduced."""
    f = cert.f
    Z = adapter.dom(f)
    rho, gamma = f, adapter.identity(Z)
    for st in cert.stages:
        if not adapter.same_object(st.Z, Z) or not adapter.equal(st.rho, rho):
            return False
        m = st.match
        if not adapter.equal(adapter.compose(rho, m.top), adapter.compose(m.bottom, m.S)):
            return False
        po = adapter.pushout(m.S, m.top)
        if not (adapter.same_object(po.obj, st.pushout.obj)
                and adapter.equal(po.from_z, st.step) and adapter.equal(po.from_b, st.cell)):
            return False
        rho = adapter.induced(po, rho, m.bottom)
        gamma = adapter.compose(po.from_z, gamma)
        Z = po.obj
    return (adapter.same_object(Z, cert.Z) and adapter.equal(gamma, cert.gamma)
            and adapter.equal(rho, cert.delta)
            and adapter.equal(adapter.compose(rho, gamma), f))


# -- duality ---------------------------------------------------------------

@dataclass
class _OpPushout:
    obj: object
    from_b: object
    from_z: object
    inner: object


class Opposite(CellAdapter):
    """The opposite category of an adapter: pushouts are the base's pullbacks.

    The base adapter must provide ``pullback(g, s)`` (with .obj, .to_z,
    .to_a), ``induced_into(pb, u, v)``, ``factor_through_epi(h, proj)``
    (m with m o proj = h) and ``find_colift(i, square)`` for left lifting
    problems written in base terms.
    """
    dual = True

    def __init__(self, base):
        self.base = base

    def dom(self, f): return self.base.cod(f)
    def cod(self, f): return self.base.dom(f)
    def identity(self, X): return self.base.identity(X)
    def compose(self, g, f): return self.base.compose(f, g)
    def equal(self, f, g): return self.base.equal(f, g)
    def same_object(self, X, Y): return self.base.same_object(X, Y)
    def add(self, f, g): return self.base.add(f, g)

    def pushout(self, s, a):
        # op: B <-s- A -a-> Z  is base: B -s-> A <-a- Z
        pb = self.base.pullback(a, s)
        return _OpPushout(pb.obj, pb.to_a, pb.to_z, pb)

    def induced(self, po, u, v):
        return self.base.induced_into(po.inner, u, v)

    def factor_through(self, h, incl):
        return self.base.factor_through_epi(h, incl)

    def find_lift(self, p, square):
        return self.base.find_colift(p, to_base_square(square))


def to_base_square(square):
    """An op square (l, top, bottom) against p^op as the base square
    (g = l, top = bottom, bottom = top) for the left lifting problem of p."""
    return Square(square.l, square.bottom, square.top, square.meta)


class OppositeSystem(MatchingSystem):
    """Wrap a base construction f -> (S(f), t_f : f -> S(f)) for the opposite engine."""

    def __init__(self, base):
        self.base = base
        self.functorial = base.functorial

    def match(self, f):
        # base t_f = (top tX: X -> P, bottom tY: Y -> Q); in op the top is tY
        m = self.base.comatch(f)
        return Match(m.S, m.bottom, m.top, m.cells, m.info)

    def squares(self, f):
        return [Square(sq.l, sq.bottom, sq.top, sq.meta) for sq in self.base.cosquares(f)]

    def factor(self, match, square):
        base_match = Match(match.S, match.bottom, match.top, match.cells, match.info)
        return self.base.cofactor(base_match, to_base_square(square))

    def morphism(self, m1, m2, g_top, g_bottom):
        raise ValueError("the opposite system is not functorial")
