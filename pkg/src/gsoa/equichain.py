"""Equivariant model structure on D-diagrams of chain complexes over F_p.

Orbits T (Set-valued diagrams with one-point colimit) give free diagrams
P_T = F_p(T). Generating cofibrations are the sphere-to-disk maps
Sigma^{n-1} P_T -> D^n P_T, generating trivial cofibrations 0 -> D^n P_T.
Squares from a generator into f : X -> Y are classified by maps
P_T -> W_n with W_n the pullback of the (n-1)-cycles of X and Y_n over
Y_{n-1} (class I), or P_T -> Y_n (class J).
"""

from dataclasses import dataclass, field

import numpy as np

from . import chains as ch
from . import fp
from .fincat import (DiagramMap, colim_set, make_diagram, orbit_over_point, ssorted,
                     terminal)
from .soa import Budget, CellAdapter, Match, MatchingSystem, Square, soa_factorize


def free_on_orbit(T, p=2):
    """P_T: free vector space on each T(c); morphisms act by 0/1 incidence."""
    base = T.base
    dims = {o: len(T.values[o]) for o in base.objects}
    mats = {}
    for m, (s, t) in base.morphisms.items():
        A = fp.zeros(dims[t], dims[s])
        index = {x: i for i, x in enumerate(T.values[t])}
        for j, x in enumerate(T.values[s]):
            A[index[T.apply(m, x)], j] = 1
        mats[m] = A
    return ch.ModuleDiagram(base, p, dims, mats, {o: tuple(T.values[o]) for o in base.objects})


def adjoint(T, M, g):
    """The linear map P_T -> M adjoint to a natural map g : T -> U M."""
    P = free_on_orbit(T, M.p)
    comps = {}
    for o in T.base.objects:
        cols = [np.array(g(o, t), dtype=np.int64) for t in T.values[o]]
        comps[o] = (np.stack(cols, axis=1) if cols else fp.zeros(M.dims[o], 0)).reshape(
            M.dims[o], len(cols)) % M.p
    return ch.ModuleMap(P, M, comps)


def unadjoint(phi):
    """The natural map T -> U M of a linear map out of a free diagram."""
    P = phi.source
    comps = {o: {t: tuple(int(x) for x in phi.comps[o][:, j])
                 for j, t in enumerate(P.basis_labels(o))} for o in P.base.objects}
    return comps


def hom_count_brute(T, M):
    """|maps T -> U M| by direct enumeration of natural families."""
    U = ch.underlying_set(M)
    objs = list(T.base.objects)
    slots = [(o, t) for o in objs for t in T.values[o]]
    count = 0

    def rec(i, chosen):
        nonlocal count
        if i == len(slots):
            count += 1
            return
        o, t = slots[i]
        for v in U.values[o]:
            chosen[(o, t)] = v
            ok = True
            for m in T.base.morphisms:
                s, tg = T.base.src(m), T.base.tgt(m)
                for x in T.values[s]:
                    y = T.apply(m, x)
                    if (s, x) in chosen and (tg, y) in chosen:
                        if U.apply(m, chosen[(s, x)]) != chosen[(tg, y)]:
                            ok = False
                            break
                if not ok:
                    break
            if ok:
                rec(i + 1, chosen)
            del chosen[(o, t)]
    rec(0, {})
    return count


@dataclass
class Resolution:
    PX: ch.ModuleDiagram
    eps: ch.ModuleMap
    points: list  # apex points, summand order
    orbits: list  # T_x per point
    offsets: list  # per summand: {object: offset}


def resolution(X):
    """P X = sum over colimit points x of P_{T_x}, with eps induced by the fibers."""
    U = ch.underlying_set(X)
    colim = colim_set(U)
    points, orbs, offsets, mods = [], [], [], []
    off = {o: 0 for o in X.base.objects}
    cols = {o: [] for o in X.base.objects}
    for x in colim.apex:
        orb = orbit_over_point(U, x, colim)
        T = orb.diagram
        points.append(x)
        orbs.append(T)
        offsets.append(dict(off))
        mods.append(free_on_orbit(T, X.p))
        for o in X.base.objects:
            cols[o].extend(T.values[o])
            off[o] += len(T.values[o])
    PX = ch.module_direct_sum(mods)
    eps = {o: (np.array(cols[o], dtype=np.int64).T.reshape(X.dims[o], len(cols[o]))
               if cols[o] else fp.zeros(X.dims[o], 0)) for o in X.base.objects}
    return Resolution(PX, ch.ModuleMap(PX, X, eps), points, orbs, offsets)


def factor_through_resolution(phi, res):
    """psi : P_T -> P X with eps o psi = phi, via T -> T_x -> U P_{T_x} -> U P X."""
    P, X = phi.source, phi.target
    g = unadjoint(phi)
    U = ch.underlying_set(X)
    colim = colim_set(U)
    some = next((o, t) for o in P.base.objects for t in P.basis_labels(o))
    x = colim.cocone[some[0]][g[some[0]][some[1]]]
    k = res.points.index(x)
    Tx = res.orbits[k]
    comps = {}
    for o in P.base.objects:
        M = fp.zeros(res.PX.dims[o], P.dims[o])
        for j, t in enumerate(P.basis_labels(o)):
            v = g[o][t]
            assert colim.cocone[o][v] == x
            M[res.offsets[k][o] + Tx.values[o].index(v), j] = 1
        comps[o] = M
    psi = ch.ModuleMap(P, res.PX, comps)
    assert np.all([np.array_equal(fp.mul(res.eps.comps[o], psi.comps[o], X.p), phi.comps[o])
                   for o in P.base.objects]), "eps o psi != phi"
    return psi


# -- generators --------------------------------------------------------------

def sphere(P, n):
    """Sigma^{n-1} P: P concentrated in degree n-1."""
    return ch.chain_diagram(P.base, P.p, {n - 1: P})


def disk(P, n):
    """D^n P: P in degrees n and n-1 with identity differential."""
    return ch.chain_diagram(P.base, P.p, {n: P, n - 1: P},
                            {n: {o: fp.eye(P.dims[o]) for o in P.base.objects}})


@dataclass
class GeneratorCell:
    kind: str  # "sphere" (class I) or "disk" (class J)
    n: int
    T: object
    P: ch.ModuleDiagram
    source: ch.ChainDiagram
    target: ch.ChainDiagram
    map: ch.ChainMap


def generator(kind, T, n, p=2):
    P = free_on_orbit(T, p)
    D = disk(P, n)
    if kind == "sphere":
        S = sphere(P, n)
        i = ch.chain_map(S, D, {n - 1: {o: fp.eye(P.dims[o]) for o in P.base.objects}})
    elif kind == "disk":
        S = ch.zero_complex(P.base, p)
        i = ch.zero_chain(S, D)
    else:
        raise ValueError(kind)
    return GeneratorCell(kind, n, T, P, S, D, i)


def _disk_map(P, n, Zc, z):
    """Chain map D^n P -> Z determined by its degree-n part z : P -> Z_n."""
    D = disk(P, n)
    p = P.p
    comps = {n: z, n - 1: {o: fp.mul(Zc.d(n, o), z[o], p) for o in P.base.objects}}
    return ch.chain_map(D, Zc, comps)


# -- the adapter -------------------------------------------------------------

class ChainAdapter(CellAdapter):
    """Chain complexes of D-diagrams over F_p, for the engine."""

    def dom(self, f): return f.source
    def cod(self, f): return f.target
    def identity(self, X): return ch.identity_chain(X)
    def compose(self, g, f): return ch.compose_chain(g, f)
    def equal(self, f, g): return ch.chain_equal(f, g)
    def same_object(self, X, Y): return ch.same_complex(X, Y)
    def pushout(self, s, a): return ch.pushout(s, a)
    def induced(self, po, u, v): return ch.induced_from_pushout(po, u, v)
    def add(self, f, g): return ch.add_chain(f, g)
    def factor_through(self, h, incl): return ch.factor_through_mono(h, incl)

    def find_lift(self, p, square):
        """A diagonal l with l o i = top and p o l = bottom, or None (exact search)."""
        if isinstance(square.meta, GeneratorCell):
            return _lift_generator(p, square, square.meta)
        return lift_linear(p, square)

    def pullback(self, g, s): return ch.pullback(g, s)
    def induced_into(self, pb, u, v): return ch.induced_into_pullback(pb, u, v)


def lift_linear(p, square):
    """Solve for a diagonal in the full space of chain maps cod(l) -> dom(p)."""
    i, top, bottom = square.l, square.top, square.bottom
    D, Z = i.target, p.source
    H = ch.hom_chain(D, Z)
    blocks_top = ch.hom_chain(i.source, Z)
    blocks_bot = ch.hom_chain(D, p.target)
    cols = []
    for j in range(H.dim):
        L = ch.hom_element(H, D, Z, H.basis[:, j])
        a = _flat(blocks_top, ch.compose_chain(L, i))
        b = _flat(blocks_bot, ch.compose_chain(p, L))
        cols.append(np.concatenate([a, b]))
    rhs = np.concatenate([_flat(blocks_top, top), _flat(blocks_bot, bottom)])
    if not cols:
        return ch.zero_chain(D, Z) if not rhs.any() else None
    c = fp.solve(np.stack(cols, axis=1), rhs, p.source.p)
    if c is None:
        return None
    return ch.hom_element(H, D, Z, H.vector(c))


def _flat(H, f):
    comps = {(n, o): f.at(n, o) for n, o in (b[0] for b in H.blocks)}
    return H.flatten(comps)


def _lift_generator(p, square, gen):
    """Lift against a generator: the diagonal is fixed by z in hom(P_T, Z_n)."""
    Zc, Y = p.source, p.target
    n, P = gen.n, gen.P
    q = Zc.p
    H = ch.hom_modules(P, Zc.mod(n))
    objs = P.base.objects
    top = {o: square.top.at(n - 1, o) for o in objs}
    bot = {o: square.bottom.at(n, o) for o in objs}
    cols = []
    for j in range(H.dim):
        z = H.unflatten(H.basis[:, j])
        parts = [p.at(n, o) @ z[o] for o in objs]
        if gen.kind == "sphere":
            parts += [Zc.d(n, o) @ z[o] for o in objs]
        cols.append(np.concatenate([x.reshape(-1) for x in parts]) % q)
    rhs_parts = [bot[o] for o in objs]
    if gen.kind == "sphere":
        rhs_parts += [top[o] for o in objs]
    rhs = np.concatenate([x.reshape(-1) for x in rhs_parts]) % q
    if cols:
        c = fp.solve(np.stack(cols, axis=1), rhs, q)
    else:
        c = np.zeros(0, dtype=np.int64) if not rhs.any() else None
    if c is None:
        return None
    z = H.unflatten(H.vector(c)) if H.dim else {o: fp.zeros(Zc.dim(n, o), P.dims[o]) for o in objs}
    return _disk_map(P, n, Zc, z)


# -- squares and W_n -----------------------------------------------------------

@dataclass
class CellSpace:
    """The module classifying squares at degree n, embedded in X_{n-1} (+) Y_n."""
    n: int
    W: ch.ModuleDiagram
    N: dict  # object -> basis matrix, columns in X_{n-1} (+) Y_n
    split: dict  # object -> dim X_{n-1}

    def xpart(self, o, w):
        return (self.N[o] @ np.asarray(w, dtype=np.int64))[: self.split[o]] % self.W.p

    def ypart(self, o, w):
        return (self.N[o] @ np.asarray(w, dtype=np.int64))[self.split[o]:] % self.W.p

    def coords(self, o, x, y):
        v = np.concatenate([np.asarray(x, dtype=np.int64).reshape(-1),
                            np.asarray(y, dtype=np.int64).reshape(-1)])
        return fp.solve(self.N[o], v, self.W.p)


def cell_space(f, n, kind):
    """W_n for class I (cycles of X_{n-1} over Y_n), Y_n itself for class J."""
    X, Y = f.source, f.target
    base, p = X.base, X.p
    N, split, dims = {}, {}, {}
    for o in base.objects:
        if kind == "disk":
            N[o] = fp.eye(Y.dim(n, o))
            split[o] = 0
        else:
            a, b = X.dim(n - 1, o), Y.dim(n, o)
            top = np.concatenate([f.at(n - 1, o), (-Y.d(n, o)) % p], axis=1)
            cyc = np.concatenate([X.d(n - 1, o), fp.zeros(X.dim(n - 2, o), b)], axis=1)
            N[o] = fp.nullspace(np.concatenate([top, cyc], axis=0) % p, p)
            split[o] = a
        dims[o] = N[o].shape[1]
    mats = {}
    for m, (s, t) in base.morphisms.items():
        if kind == "disk":
            mats[m] = Y.mod(n).mats[m]
        else:
            big = ch._blockdiag([X.mod(n - 1).mats[m], Y.mod(n).mats[m]])
            mats[m] = fp.solve(N[t], fp.mul(big, N[s], p), p)
    return CellSpace(n, ch.ModuleDiagram(base, p, dims, mats), N, split)


def square_degrees(f, kind):
    X, Y = f.source, f.target
    ds = set(Y.degrees())
    if kind == "sphere":
        ds |= {k + 1 for k in X.degrees()}
    return sorted(ds)


@dataclass
class Cell:
    n: int
    point: object
    T: object  # fiber of U W_n over the point; labels are W-coordinates
    gen: GeneratorCell
    top: ch.ChainMap  # gen.source -> X
    bottom: ch.ChainMap  # gen.target -> Y


def make_cell(f, space, point, T, kind):
    X, Y = f.source, f.target
    p = X.p
    n = space.n
    gen = generator(kind, T, n, p)
    objs = X.base.objects
    xcols, ycols = {}, {}
    for o in objs:
        labels = T.values[o]
        if kind == "sphere" and labels:
            xcols[o] = np.stack([space.xpart(o, w) for w in labels], axis=1)
        else:
            xcols[o] = fp.zeros(X.dim(n - 1, o), len(labels))
        ycols[o] = (np.stack([space.ypart(o, w) for w in labels], axis=1)
                    if labels else fp.zeros(Y.dim(n, o), 0)).reshape(Y.dim(n, o), len(labels))
    if kind == "sphere":
        top = ch.chain_map(gen.source, X, {n - 1: xcols})
    else:
        top = ch.zero_chain(gen.source, X)
    bottom = _disk_map(gen.P, n, Y, ycols)
    return Cell(n, point, T, gen, top, bottom)


def fiber_squares(f, kind, skip_zero=True):
    """One square per point of colim U(W_n): the fiber inclusion, over all n.

    Every generator square into f factors through one of these, so they
    decide the lifting property against the whole (proper) class.
    """
    out = []
    for n in square_degrees(f, kind):
        space = cell_space(f, n, kind)
        if space.W.is_zero():
            continue
        for x, T in fiber_points(space, basis_only=True):
            if skip_zero and is_zero_orbit(T):
                continue
            c = make_cell(f, space, x, T, kind)
            out.append(Square(c.gen.map, c.top, c.bottom, c.gen))
    return out


def fiber_points(space, basis_only=False):
    """(point, fiber) pairs of colim U(W_n).

    Over the terminal category each fiber is a single vector and whether its
    square lifts is linear in that vector, so with ``basis_only`` the basis
    vectors stand in for all p^dim points.
    """
    W = space.W
    base = W.base
    if basis_only and len(base.objects) == 1:
        (o,) = base.objects
        ident = base.identities[o]
        for j in range(W.dims[o]):
            e = tuple(int(i == j) for i in range(W.dims[o]))
            yield (o, e), make_diagram(base, {o: (e,)}, {ident: {e: e}})
        return
    U = ch.underlying_set(W)
    colim = colim_set(U)
    for x in colim.apex:
        yield x, orbit_over_point(U, x, colim).diagram


def is_zero_orbit(T):
    """The orbit made of zero vectors only; its squares are zero and always lift."""
    return all(not any(w) for o in T.base.objects for w in T.values[o])


def square_vector(space, square):
    """The hom(P_T, W_n) element classifying a generator square."""
    gen = square.meta
    n = gen.n
    comps = {}
    for o in gen.P.base.objects:
        cols = []
        for j in range(gen.P.dims[o]):
            x = square.top.at(n - 1, o)[:, j] if gen.kind == "sphere" else np.zeros(0, np.int64)
            y = square.bottom.at(n, o)[:, j]
            w = space.coords(o, x, y)
            assert w is not None, "square does not land in W_n"
            cols.append(w)
        comps[o] = (np.stack(cols, axis=1) if cols else fp.zeros(space.W.dims[o], 0)).reshape(
            space.W.dims[o], gen.P.dims[o])
    return comps


# -- matching systems ------------------------------------------------------------

class EquivariantSystem(MatchingSystem):
    """S(f) = sum over degrees n and points x of colim U(W_n) of generator cells.

    With ``reduced=False`` this is the functorial construction over every
    point, the point through 0 included even when its orbit is all zero: a
    morphism of maps can carry a nonzero orbit onto it, and functoriality
    needs a cell there to land in. Cells go in the degrees of ``window``
    when one is given, else in square_degrees(f); S is natural only among
    maps sharing a window, so comparisons across maps should fix one. With
    ``reduced=True`` a point is skipped when its fiber square
    already factors through lifts against f plus the cells chosen so far;
    the result is smaller and finite stages suffice, but it is not natural.
    """

    def __init__(self, kind, reduced=False, window=None):
        assert kind in ("sphere", "disk")
        self.kind = kind
        self.reduced = reduced
        self.functorial = not reduced
        self.window = None if window is None else sorted(window)

    def squares(self, f):
        return fiber_squares(f, self.kind)

    def match(self, f):
        X, Y = f.source, f.target
        cells, spaces, colims = [], {}, {}
        degrees = square_degrees(f, self.kind) if self.window is None else self.window
        for n in degrees:
            space = cell_space(f, n, self.kind)
            if self.reduced and space.W.is_zero():
                continue
            spaces[n] = space
            if not self.reduced:
                colims[n] = colim_set(ch.underlying_set(space.W))
            chosen = []
            for x, T in fiber_points(space, basis_only=self.reduced):
                if self.reduced and is_zero_orbit(T):
                    continue
                if not self.reduced:
                    chosen.append(make_cell(f, space, x, T, self.kind))
                    continue
                reach = _Reach(f, space, T, self.kind, n, chosen)
                if reach.covered():
                    continue
                for S in candidate_orbits(T):
                    if reach.offer(S):
                        chosen.append(make_cell(f, space, x, S, self.kind))
                        if reach.covered():
                            break
                else:
                    if not reach.covered():
                        chosen.append(make_cell(f, space, x, T, self.kind))
            cells.extend(chosen)
        return _assemble(f, cells, {"spaces": spaces, "colims": colims, "kind": self.kind})

    def factor(self, match, square):
        f_cells = match.cells
        gen = square.meta
        space = match.info["spaces"].get(gen.n)
        rho = match.info["rho"]
        Zc = rho.source
        if space is None:
            # no squares at this degree: W_n = 0 and the square is zero
            return (ch.zero_chain(gen.source, match.S.source),
                    ch.zero_chain(gen.target, match.S.target), None)
        here = [c for c in f_cells if c.n == gen.n]
        sol = _solve_square(rho, space, here, square, allow_direct=self.reduced)
        assert sol is not None, "square does not factor through t_f"
        z, es = sol
        a = None
        b = None
        for c, e in zip(here, es):
            k = f_cells.index(c)
            ak = ch.chain_map(gen.source, c.gen.source, {gen.n - 1: e}) if self.kind == "sphere" \
                else ch.zero_chain(gen.source, c.gen.source)
            bk = ch.chain_map(gen.target, c.gen.target, {gen.n: e, gen.n - 1: e})
            ak = ch.compose_chain(match.info["injA"][k], ak)
            bk = ch.compose_chain(match.info["injB"][k], bk)
            a = ak if a is None else ch.add_chain(a, ak)
            b = bk if b is None else ch.add_chain(b, bk)
        if a is None:
            a = ch.zero_chain(gen.source, match.S.source)
            b = ch.zero_chain(gen.target, match.S.target)
        direct = _disk_map(gen.P, gen.n, Zc, z) if z is not None else None
        return a, b, direct

    def morphism(self, m1, m2, g_top, g_bottom):
        """S(g): cells over x map to cells over the image point, fiberwise."""
        if self.reduced:
            raise ValueError("reduced system is not functorial")
        A1, B1 = m1.S.source, m1.S.target
        A2, B2 = m2.S.source, m2.S.target
        h1 = ch.zero_chain(A1, A2)
        h2 = ch.zero_chain(B1, B2)
        p = A1.p
        for k, c in enumerate(m1.cells):
            n = c.n
            s1, s2 = m1.info["spaces"][n], m2.info["spaces"].get(n)
            colim2 = m2.info["colims"].get(n)
            objs = c.T.base.objects
            if s2 is None:
                continue  # n is outside the target's degree window: the cell goes to 0
            images = {}
            for o in objs:
                images[o] = []
                for w in c.T.values[o]:
                    x2 = (g_top.at(n - 1, o) @ s1.xpart(o, w)) % p
                    y2 = (g_bottom.at(n, o) @ s1.ypart(o, w)) % p
                    w2 = s2.coords(o, x2, y2)
                    assert w2 is not None
                    images[o].append(tuple(int(v) for v in w2))
            some = next((o, images[o][0]) for o in objs if images[o])
            point = colim2.cocone[some[0]][some[1]]
            k2 = next(j for j, c2 in enumerate(m2.cells) if c2.n == n and c2.point == point)
            c2 = m2.cells[k2]
            mats = {}
            for o in objs:
                M = fp.zeros(len(c2.T.values[o]), len(c.T.values[o]))
                for j, w2 in enumerate(images[o]):
                    M[c2.T.values[o].index(w2), j] = 1
                mats[o] = M
            if self.kind == "sphere":
                hk1 = ch.chain_map(c.gen.source, c2.gen.source, {n - 1: mats})
            else:
                hk1 = ch.zero_chain(c.gen.source, c2.gen.source)
            hk2 = ch.chain_map(c.gen.target, c2.gen.target, {n: mats, n - 1: mats})
            h1 = ch.add_chain(h1, ch.compose_chain(
                m2.info["injA"][k2], ch.compose_chain(hk1, m1.info["projA"][k])))
            h2 = ch.add_chain(h2, ch.compose_chain(
                m2.info["injB"][k2], ch.compose_chain(hk2, m1.info["projB"][k])))
        return h1, h2


def _assemble(f, cells, info):
    X, Y = f.source, f.target
    base, p = X.base, X.p
    info["rho"] = f
    if not cells:
        Z0 = ch.zero_complex(base, p)
        return Match(ch.zero_chain(Z0, Z0), ch.zero_chain(Z0, X), ch.zero_chain(Z0, Y), [],
                     dict(info, injA=[], injB=[], projA=[], projB=[]))
    A, injA, projA = ch.direct_sum([c.gen.source for c in cells])
    B, injB, projB = ch.direct_sum([c.gen.target for c in cells])
    S = ch.zero_chain(A, B)
    top = ch.zero_chain(A, X)
    bottom = ch.zero_chain(B, Y)
    for k, c in enumerate(cells):
        S = ch.add_chain(S, ch.compose_chain(injB[k], ch.compose_chain(c.gen.map, projA[k])))
        top = ch.add_chain(top, ch.compose_chain(c.top, projA[k]))
        bottom = ch.add_chain(bottom, ch.compose_chain(c.bottom, projB[k]))
    info.update(injA=injA, injB=injB, projA=projA, projB=projB)
    return Match(S, top, bottom, cells, info)


def _pieces(f, space, cells, kind, n, allow_direct):
    """(module, G) pairs: each G maps the module into W_n coordinates."""
    Zc = f.source
    p = Zc.p
    objs = Zc.base.objects
    pieces = []
    if allow_direct:
        # z -> (d z, f z) in W-coordinates
        G = {}
        for o in objs:
            both = f.at(n, o) if kind == "disk" else \
                np.concatenate([Zc.d(n, o), f.at(n, o)], axis=0)
            G[o] = fp.solve(space.N[o], both % p, p)
            assert G[o] is not None
        pieces.append((Zc.mod(n), G))
    for c in cells:
        pieces.append((c.gen.P, _cell_in_W(space, c.T)))
    return pieces


def _cell_in_W(space, T):
    G = {}
    for o in T.base.objects:
        labels = T.values[o]
        G[o] = (np.array(labels, dtype=np.int64).T.reshape(space.W.dims[o], len(labels))
                if labels else fp.zeros(space.W.dims[o], 0))
    return G


def _columns(P, HW, mod, G, p):
    """Images in hom(P, W) of a basis of hom(P, mod), and that basis' space."""
    H = ch.hom_modules(P, mod)
    objs = P.base.objects
    cols = [HW.flatten({o: fp.mul(G[o], H.unflatten(H.basis[:, j])[o], p) for o in objs})
            for j in range(H.dim)]
    return H, (np.stack(cols, axis=1) if cols else fp.zeros(HW.ambient, 0))


def _solve_square(f, space, cells, square, allow_direct):
    """Write the square's class in hom(P_T, W_n) as (d z, f z) + cells.

    Returns (z or None, [e_k : P_T -> P_{T_k}]) or None when impossible.
    """
    gen = square.meta
    n, P = gen.n, gen.P
    p = f.source.p
    objs = P.base.objects
    HW = ch.hom_modules(P, space.W)
    rhs = HW.flatten(square_vector(space, square))
    pieces = _pieces(f, space, cells, gen.kind, n, allow_direct)
    blocks = [_columns(P, HW, mod, G, p) for mod, G in pieces]
    A = np.concatenate([c for _, c in blocks], axis=1) if blocks else fp.zeros(HW.ambient, 0)
    coeff = fp.solve(A, rhs, p)
    if coeff is None:
        return None
    out, z, at = [], None, 0
    for idx, (H, cols) in enumerate(blocks):
        k = cols.shape[1]
        part = H.unflatten(H.vector(coeff[at:at + k]))
        at += k
        if allow_direct and idx == 0:
            z = part
        else:
            out.append(part)
    return z, out


class _Reach:
    """The span, inside hom(P_T, W_n), of what lifts against f plus chosen cells."""

    def __init__(self, f, space, T, kind, n, cells):
        self.p = f.source.p
        self.space = space
        self.P = free_on_orbit(T, self.p)
        self.HW = ch.hom_modules(self.P, space.W)
        self.target = self.HW.flatten(_cell_in_W(space, T))
        cols = [_columns(self.P, self.HW, mod, G, self.p)[1]
                for mod, G in _pieces(f, space, cells, kind, n, True)]
        self.A = np.concatenate(cols, axis=1)
        self.rank = fp.rank(self.A, self.p)

    def covered(self):
        return fp.solve(self.A, self.target, self.p) is not None

    def offer(self, T):
        """Add the cell on T if it enlarges the span; report whether it did."""
        _, cols = _columns(self.P, self.HW, free_on_orbit(T, self.p), _cell_in_W(self.space, T),
                           self.p)
        A = np.concatenate([self.A, cols], axis=1)
        r = fp.rank(A, self.p)
        if r == self.rank:
            return False
        self.A, self.rank = A, r
        return True


def sub_orbit(T, gens):
    """The subdiagram of T generated by tagged elements, or None if disconnected."""
    base = T.base
    keep = {o: set() for o in base.objects}
    for o, w in gens:
        for m in base.out_of(o):
            keep[base.tgt(m)].add(T.apply(m, w))
    vals = {o: tuple(x for x in T.values[o] if x in keep[o]) for o in base.objects}
    S = make_diagram(base, vals, {m: {x: T.apply(m, x) for x in vals[base.src(m)]}
                                  for m in base.morphisms})
    return S if len(colim_set(S).apex) == 1 else None


def candidate_orbits(T):
    """Small sub-orbits of a fiber: one generator, then pairs sharing the first element."""
    seen = set()
    gens = [[(o, w)] for o in T.base.objects for w in T.values[o]]
    gens += [[(o, T.values[o][0]), (o, w)] for o in T.base.objects for w in T.values[o][1:]]
    for g in gens:
        S = sub_orbit(T, g)
        if S is None:
            continue
        key = tuple((o, S.values[o]) for o in T.base.objects)
        if key in seen:
            continue
        seen.add(key)
        yield S


def matching_system_I(reduced=False, window=None):
    return EquivariantSystem("sphere", reduced, window)


def matching_system_J(reduced=False, window=None):
    return EquivariantSystem("disk", reduced, window)


def factorize_equivariant(f, cls, budget=None, reduced=True):
    """Factor f with class I (cofibration, trivial fibration) or J (trivial
    cofibration, fibration)."""
    kind = {"I": "sphere", "J": "disk"}[cls]
    system = EquivariantSystem(kind, reduced)
    return soa_factorize(ChainAdapter(), f, system, budget or Budget()), system


# -- hom(P_T, X) ----------------------------------------------------------------

def hom_orbit_complex(T, X):
    """The complex hom(P_T, X) of F_p vector spaces, over the terminal category."""
    P = free_on_orbit(T, X.p)
    p = X.p
    spaces = {n: ch.hom_modules(P, X.mod(n)) for n in X.degrees()}
    base = terminal()
    (o,) = base.objects
    modules, diff = {}, {}
    for n, H in spaces.items():
        modules[n] = ch.module_diagram(base, p, {o: H.dim})
    for n, H in spaces.items():
        if n - 1 not in spaces:
            continue
        H1 = spaces[n - 1]
        cols = []
        for j in range(H.dim):
            phi = H.unflatten(H.basis[:, j])
            img = {c: fp.mul(X.d(n, c), phi[c], p) for c in X.base.objects}
            coords = fp.solve(H1.basis, H1.flatten(img), p)
            cols.append(coords)
        diff[n] = {o: (np.stack(cols, axis=1) if cols else fp.zeros(H1.dim, 0)).reshape(H1.dim, H.dim)}
    return ch.chain_diagram(base, p, modules, diff)


def homology(C):
    return ch.homology_dims(C)


# -- small constructors used throughout ---------------------------------------------

def singleton_orbit(base):
    return make_diagram(base, {o: ("*",) for o in base.objects},
                        {m: {"*": "*"} for m in base.morphisms})


def constant_complex(base, p, dims, diffs=None):
    """Complex of constant diagrams: dims {n: k}, diffs {n: matrix}."""
    modules = {n: ch.module_diagram(base, p, {o: k for o in base.objects},
                                    {m: fp.eye(k) for m in base.morphisms})
               for n, k in dims.items()}
    diff = {n: {o: M for o in base.objects} for n, M in (diffs or {}).items()}
    return ch.chain_diagram(base, p, modules, diff)


def sphere_complex(base, n, p=2):
    """S^n: the constant diagram F_p concentrated in degree n."""
    return constant_complex(base, p, {n: 1})


def disk_complex(base, n, p=2):
    return constant_complex(base, p, {n: 1, n - 1: 1}, {n: fp.eye(1)})
