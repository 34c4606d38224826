"""Diagrams of F_p vector spaces and bounded chain complexes of them.

A ModuleDiagram is a functor D -> Vect_p given by one matrix per
morphism (shape ``dim(tgt) x dim(src)``). A ChainDiagram stores one
ModuleDiagram per degree together with differentials ``d_n : X_n -> X_{n-1}``;
degrees outside the stored range are zero.
"""

from dataclasses import dataclass, field

import numpy as np

from . import fp
from .fincat import SetDiagram, skey


@dataclass(frozen=True, eq=False)
class ModuleDiagram:
    base: object
    p: int
    dims: dict  # object -> int
    mats: dict  # morphism -> matrix
    labels: dict = field(default=None)  # object -> basis labels, optional

    def dim(self, o):
        return self.dims[o]

    def total_dim(self):
        return sum(self.dims.values())

    def is_zero(self):
        return self.total_dim() == 0

    def basis_labels(self, o):
        if self.labels and o in self.labels:
            return self.labels[o]
        return tuple(range(self.dims[o]))


def module_diagram(base, p, dims, mats=None, labels=None):
    mats = dict(mats or {})
    for m, (s, t) in base.morphisms.items():
        if m not in mats:
            if m == base.identities[s]:
                mats[m] = fp.eye(dims[s])
            elif dims[s] == 0 or dims[t] == 0:
                mats[m] = fp.zeros(dims[t], dims[s])
            else:
                raise ValueError(f"missing matrix for morphism {m}")
        mats[m] = np.asarray(mats[m], dtype=np.int64).reshape(dims[t], dims[s]) % p
    return ModuleDiagram(base, p, dict(dims), mats, labels)


def zero_module(base, p):
    return module_diagram(base, p, {o: 0 for o in base.objects})


def validate_module(M):
    c = M.base
    bad = []
    for m, (s, t) in c.morphisms.items():
        if M.mats[m].shape != (M.dims[t], M.dims[s]):
            bad.append(("matrix shape", m))
    if bad:
        return bad
    for o in c.objects:
        if not np.array_equal(M.mats[c.identities[o]], fp.eye(M.dims[o])):
            bad.append(("identity not preserved", o))
    for (g, f), h in c.compose.items():
        if not np.array_equal(fp.mul(M.mats[g], M.mats[f], M.p), M.mats[h]):
            bad.append(("composition not preserved", (g, f)))
    return bad


@dataclass(frozen=True, eq=False)
class ModuleMap:
    source: ModuleDiagram
    target: ModuleDiagram
    comps: dict  # object -> matrix (dim target x dim source)


def module_map(source, target, comps):
    return ModuleMap(source, target, {
        o: np.asarray(comps[o], dtype=np.int64).reshape(target.dims[o], source.dims[o]) % source.p
        for o in source.base.objects})


def is_module_map(f):
    A, B, p = f.source, f.target, f.source.p
    for m, (s, t) in A.base.morphisms.items():
        if not np.array_equal(fp.mul(B.mats[m], f.comps[s], p), fp.mul(f.comps[t], A.mats[m], p)):
            return False
    return True


def compose_module_maps(g, f):
    p = f.source.p
    return ModuleMap(f.source, g.target,
                     {o: fp.mul(g.comps[o], f.comps[o], p) for o in f.source.base.objects})


def underlying_set(M):
    """U(M): the Set-valued diagram of all vectors, labelled by tuples."""
    p = M.p
    vals, arrays = {}, {}
    for o in M.base.objects:
        V = np.array(list(fp.vectors(M.dims[o], p)), dtype=np.int64).reshape(p ** M.dims[o], M.dims[o])
        arrays[o] = V
        vals[o] = tuple(tuple(int(x) for x in row) for row in V)
    act = {}
    for m, (s, t) in M.base.morphisms.items():
        images = (arrays[s] @ M.mats[m].T) % p
        act[m] = {v: tuple(int(x) for x in row) for v, row in zip(vals[s], images)}
    return SetDiagram(M.base, vals, act)


def module_direct_sum(mods):
    base, p = mods[0].base, mods[0].p
    dims = {o: sum(M.dims[o] for M in mods) for o in base.objects}
    mats = {m: _blockdiag([M.mats[m] for M in mods]) for m in base.morphisms}
    return ModuleDiagram(base, p, dims, mats)


def module_component(f, n):
    """Degree-n component of a chain map as a ModuleMap."""
    return ModuleMap(f.source.mod(n), f.target.mod(n),
                     {o: f.at(n, o) for o in f.source.base.objects})


# -- hom spaces ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class HomSpace:
    """Subspace of the ambient product of per-object matrices.

    ``blocks`` lists (key, rows, cols, offset) for each component matrix,
    flattened row-major; ``basis`` holds a basis as columns.
    """
    blocks: tuple
    basis: np.ndarray
    p: int

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def ambient(self):
        return self.basis.shape[0]

    def vector(self, coeffs):
        c = np.asarray(coeffs, dtype=np.int64)
        if self.dim == 0:
            return fp.zeros(self.ambient, 1)[:, 0]
        return (self.basis @ c) % self.p

    def unflatten(self, vec):
        out = {}
        for key, r, c, off in self.blocks:
            out[key] = np.asarray(vec[off:off + r * c], dtype=np.int64).reshape(r, c)
        return out

    def flatten(self, comps):
        vec = fp.zeros(self.ambient, 1)[:, 0]
        for key, r, c, off in self.blocks:
            if key in comps:
                vec[off:off + r * c] = np.asarray(comps[key]).reshape(-1)
        return vec % self.p

    def coords(self, comps):
        """Coordinates of an element in the basis, or None if not a member."""
        return fp.solve(self.basis, self.flatten(comps), self.p)

    def elements(self):
        for vec in fp.span_elements(self.basis, self.p):
            yield self.unflatten(vec)


def _blocks(keys_shapes):
    blocks, off = [], 0
    for key, r, c in keys_shapes:
        blocks.append((key, r, c, off))
        off += r * c
    return tuple(blocks), off


def _kron_left(A, ncols):
    """Row-major vec(A X) = kron(A, I) vec(X)."""
    return np.kron(A, fp.eye(ncols))


def _kron_right(B, nrows):
    """Row-major vec(X B) = kron(I, B^T) vec(X)."""
    return np.kron(fp.eye(nrows), B.T)


def _constraint_rows(blocks, total, eqs):
    rows = []
    index = {b[0]: b for b in blocks}
    for terms in eqs:
        nr = None
        parts = {}
        for key, mat in terms:
            parts.setdefault(key, []).append(mat)
            nr = mat.shape[0]
        if not nr:
            continue
        R = fp.zeros(nr, total)
        for key, mats in parts.items():
            _, r, c, off = index[key]
            for mat in mats:
                R[:, off:off + r * c] += mat
        rows.append(R)
    return rows


def hom_modules(A, B):
    """Natural transformations A -> B as a HomSpace keyed by object."""
    p = A.p
    c = A.base
    blocks, total = _blocks([(o, B.dims[o], A.dims[o]) for o in c.objects])
    eqs = []
    for m in c.non_identities():
        s, t = c.src(m), c.tgt(m)
        # B(m) phi_s - phi_t A(m) = 0
        eqs.append([(s, _kron_left(B.mats[m], A.dims[s])),
                    (t, (-_kron_right(A.mats[m], B.dims[t])) % p)])
    rows = _constraint_rows(blocks, total, eqs)
    C = np.concatenate(rows, axis=0) % p if rows else fp.zeros(0, total)
    return HomSpace(blocks, fp.nullspace(C, p), p)


# -- chain complexes -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ChainDiagram:
    base: object
    p: int
    modules: dict  # degree -> ModuleDiagram
    diff: dict  # degree n -> {object: matrix X_n -> X_{n-1}}

    def degrees(self):
        return sorted(n for n, M in self.modules.items() if not M.is_zero())

    def span(self):
        ds = self.degrees()
        return (ds[0], ds[-1]) if ds else (0, -1)

    def mod(self, n):
        M = self.modules.get(n)
        return M if M is not None else zero_module(self.base, self.p)

    def dim(self, n, o):
        M = self.modules.get(n)
        return M.dims[o] if M is not None else 0

    def d(self, n, o):
        D = self.diff.get(n, {}).get(o)
        if D is None:
            return fp.zeros(self.dim(n - 1, o), self.dim(n, o))
        return D

    def dims_table(self):
        return {n: dict(self.modules[n].dims) for n in self.degrees()}

    def total_dim(self):
        return sum(M.total_dim() for M in self.modules.values())


def chain_diagram(base, p, modules, diff=None):
    """Build a ChainDiagram, dropping zero degrees and filling zero differentials."""
    modules = {n: M for n, M in modules.items() if not M.is_zero()}
    diff = diff or {}
    out = {}
    for n in modules:
        out[n] = {}
        for o in base.objects:
            rows = modules[n - 1].dims[o] if n - 1 in modules else 0
            D = diff.get(n, {}).get(o)
            if D is None:
                D = fp.zeros(rows, modules[n].dims[o])
            out[n][o] = np.asarray(D, dtype=np.int64).reshape(rows, modules[n].dims[o]) % p
    return ChainDiagram(base, p, modules, out)


def zero_complex(base, p):
    return ChainDiagram(base, p, {}, {})


def validate_complex(X):
    bad = []
    for n in X.degrees():
        for msg in validate_module(X.mod(n)):
            bad.append((n,) + msg)
    if bad:
        return bad
    p = X.p
    for n in X.degrees():
        for o in X.base.objects:
            if np.any(fp.mul(X.d(n - 1, o), X.d(n, o), p)):
                bad.append(("d o d != 0", n, o))
        for m, (s, t) in X.base.morphisms.items():
            if not np.array_equal(fp.mul(X.mod(n - 1).mats[m], X.d(n, s), p),
                                  fp.mul(X.d(n, t), X.mod(n).mats[m], p)):
                bad.append(("differential not natural", n, m))
    return bad


@dataclass(frozen=True, eq=False)
class ChainMap:
    source: ChainDiagram
    target: ChainDiagram
    comps: dict  # degree -> {object: matrix}

    def at(self, n, o):
        M = self.comps.get(n, {}).get(o)
        if M is None:
            return fp.zeros(self.target.dim(n, o), self.source.dim(n, o))
        return M

    def degrees(self):
        return sorted(set(self.source.degrees()) | set(self.target.degrees()))


def chain_map(source, target, comps):
    p = source.p
    out = {}
    for n in sorted(set(source.degrees()) & set(target.degrees())):
        out[n] = {}
        for o in source.base.objects:
            M = comps.get(n, {}).get(o)
            shape = (target.dim(n, o), source.dim(n, o))
            out[n][o] = fp.zeros(*shape) if M is None else \
                np.asarray(M, dtype=np.int64).reshape(shape) % p
    return ChainMap(source, target, out)


def identity_chain(X):
    return chain_map(X, X, {n: {o: fp.eye(X.dim(n, o)) for o in X.base.objects}
                            for n in X.degrees()})


def zero_chain(X, Y):
    return chain_map(X, Y, {})


def compose_chain(g, f):
    p = f.source.p
    return chain_map(f.source, g.target, {
        n: {o: fp.mul(g.at(n, o), f.at(n, o), p) for o in f.source.base.objects}
        for n in f.source.degrees()})


def add_chain(f, g, scale=1):
    p = f.source.p
    return chain_map(f.source, f.target, {
        n: {o: (f.at(n, o) + scale * g.at(n, o)) % p for o in f.source.base.objects}
        for n in f.degrees()})


def chain_equal(f, g):
    if f.source is not g.source and not same_complex(f.source, g.source):
        return False
    if f.target is not g.target and not same_complex(f.target, g.target):
        return False
    return all(np.array_equal(f.at(n, o), g.at(n, o))
               for n in set(f.degrees()) | set(g.degrees()) for o in f.source.base.objects)


def same_complex(X, Y):
    if X.p != Y.p or X.degrees() != Y.degrees() or X.base != Y.base:
        return False
    for n in X.degrees():
        A, B = X.mod(n), Y.mod(n)
        if A.dims != B.dims:
            return False
        for m in X.base.morphisms:
            if not np.array_equal(A.mats[m], B.mats[m]):
                return False
        for o in X.base.objects:
            if not np.array_equal(X.d(n, o), Y.d(n, o)):
                return False
    return True


def is_chain_map(f):
    X, Y, p = f.source, f.target, f.source.p
    for n in f.degrees():
        for o in X.base.objects:
            if not np.array_equal(fp.mul(Y.d(n, o), f.at(n, o), p),
                                  fp.mul(f.at(n - 1, o), X.d(n, o), p)):
                return False
        for m, (s, t) in X.base.morphisms.items():
            if not np.array_equal(fp.mul(Y.mod(n).mats[m], f.at(n, s), p),
                                  fp.mul(f.at(n, t), X.mod(n).mats[m], p)):
                return False
    return True


def is_degreewise_injective(f):
    return all(fp.rank(f.at(n, o), f.source.p) == f.source.dim(n, o)
               for n in f.degrees() for o in f.source.base.objects)


def is_degreewise_surjective(f):
    return all(fp.rank(f.at(n, o), f.source.p) == f.target.dim(n, o)
               for n in f.degrees() for o in f.source.base.objects)


def direct_sum(complexes):
    """Direct sum with its injections and projections."""
    assert complexes
    base, p = complexes[0].base, complexes[0].p
    degs = sorted(set().union(*[X.degrees() for X in complexes]))
    modules, diff = {}, {}
    for n in degs:
        dims = {o: sum(X.dim(n, o) for X in complexes) for o in base.objects}
        mats = {m: _blockdiag([X.mod(n).mats[m] for X in complexes])
                for m in base.morphisms}
        modules[n] = ModuleDiagram(base, p, dims, mats)
        diff[n] = {o: _blockdiag([X.d(n, o) for X in complexes]) for o in base.objects}
    S = chain_diagram(base, p, modules, diff)
    injections, projections = [], []
    for k, X in enumerate(complexes):
        inj, proj = {}, {}
        for n in degs:
            inj[n], proj[n] = {}, {}
            for o in base.objects:
                before = sum(Y.dim(n, o) for Y in complexes[:k])
                E = fp.zeros(S.dim(n, o), X.dim(n, o))
                E[before:before + X.dim(n, o), :] = fp.eye(X.dim(n, o))
                inj[n][o] = E
                proj[n][o] = E.T.copy()
        injections.append(chain_map(X, S, inj))
        projections.append(chain_map(S, X, proj))
    return S, injections, projections


def _blockdiag(mats):
    r = sum(M.shape[0] for M in mats)
    c = sum(M.shape[1] for M in mats)
    out = fp.zeros(r, c)
    i = j = 0
    for M in mats:
        out[i:i + M.shape[0], j:j + M.shape[1]] = M
        i += M.shape[0]
        j += M.shape[1]
    return out


def tuple_map(maps, target):
    """The map into a direct sum with the given components (all sharing a source)."""
    src = maps[0].source
    p = src.p
    comps = {n: {o: np.concatenate([f.at(n, o) for f in maps], axis=0) % p
                 for o in src.base.objects} for n in src.degrees()}
    return chain_map(src, target, comps)


def cotuple_map(maps, source):
    """The map out of a direct sum with the given components (sharing a target)."""
    tgt = maps[0].target
    p = tgt.p
    comps = {n: {o: np.concatenate([f.at(n, o) for f in maps], axis=1) % p
                 for o in tgt.base.objects} for n in source.degrees()}
    return chain_map(source, tgt, comps)


@dataclass(frozen=True, eq=False)
class Pushout:
    obj: ChainDiagram
    from_b: ChainMap  # B -> P
    from_z: ChainMap  # Z -> P
    section: dict  # degree -> {object: S}, quotient section on B (+) Z


def pushout(s, a):
    """Pushout of B <-s- A -a-> Z, as (B (+) Z) / {(s x, -a x)}."""
    A, B, Z = s.source, s.target, a.target
    base, p = A.base, A.p
    degs = sorted(set(B.degrees()) | set(Z.degrees()))
    Qs, Ss, modules, diff = {}, {}, {}, {}
    for n in degs:
        Qs[n], Ss[n] = {}, {}
        for o in base.objects:
            K = np.concatenate([s.at(n, o), (-a.at(n, o)) % p], axis=0)
            Qs[n][o], Ss[n][o] = fp.quotient(K, B.dim(n, o) + Z.dim(n, o), p)
    for n in degs:
        dims = {o: Qs[n][o].shape[0] for o in base.objects}
        mats = {}
        for m, (src, tgt) in base.morphisms.items():
            big = _blockdiag([B.mod(n).mats[m], Z.mod(n).mats[m]])
            mats[m] = fp.mul(fp.mul(Qs[n][tgt], big, p), Ss[n][src], p)
        modules[n] = ModuleDiagram(base, p, dims, mats)
    for n in degs:
        diff[n] = {}
        for o in base.objects:
            if n - 1 in Qs:
                big = _blockdiag([B.d(n, o), Z.d(n, o)])
                diff[n][o] = fp.mul(fp.mul(Qs[n - 1][o], big, p), Ss[n][o], p)
    P = chain_diagram(base, p, modules, diff)
    kb, iz = {}, {}
    for n in degs:
        kb[n] = {o: Qs[n][o][:, :B.dim(n, o)] for o in base.objects}
        iz[n] = {o: Qs[n][o][:, B.dim(n, o):] for o in base.objects}
    return Pushout(P, chain_map(B, P, kb), chain_map(Z, P, iz), Ss)


def induced_from_pushout(po, u, v):
    """The map P -> W out of a pushout given u: Z -> W and v: B -> W."""
    P, W = po.obj, u.target
    p = P.p
    comps = {}
    for n in P.degrees():
        comps[n] = {}
        for o in P.base.objects:
            both = np.concatenate([v.at(n, o), u.at(n, o)], axis=1)
            comps[n][o] = fp.mul(both, po.section[n][o], p)
    return chain_map(P, W, comps)


@dataclass(frozen=True, eq=False)
class Pullback:
    obj: ChainDiagram
    to_z: ChainMap
    to_a: ChainMap
    kernel: dict  # degree -> {object: N}, basis of the pullback inside Z (+) A


def pullback(g, s):
    """Pullback of Z -g-> B <-s- A as the kernel of (g, -s)."""
    Z, A = g.source, s.source
    base, p = Z.base, Z.p
    degs = sorted(set(Z.degrees()) | set(A.degrees()))
    Ns = {n: {o: fp.nullspace(np.concatenate([g.at(n, o), (-s.at(n, o)) % p], axis=1), p)
              for o in base.objects} for n in degs}
    modules, diff = {}, {}
    for n in degs:
        dims = {o: Ns[n][o].shape[1] for o in base.objects}
        mats = {}
        for m, (src, tgt) in base.morphisms.items():
            big = _blockdiag([Z.mod(n).mats[m], A.mod(n).mats[m]])
            mats[m] = fp.solve(Ns[n][tgt], fp.mul(big, Ns[n][src], p), p)
        modules[n] = ModuleDiagram(base, p, dims, mats)
    for n in degs:
        diff[n] = {}
        for o in base.objects:
            if n - 1 in Ns:
                big = _blockdiag([Z.d(n, o), A.d(n, o)])
                diff[n][o] = fp.solve(Ns[n - 1][o], fp.mul(big, Ns[n][o], p), p)
    P = chain_diagram(base, p, modules, diff)
    tz, ta = {}, {}
    for n in degs:
        tz[n] = {o: Ns[n][o][:Z.dim(n, o), :] for o in base.objects}
        ta[n] = {o: Ns[n][o][Z.dim(n, o):, :] for o in base.objects}
    return Pullback(P, chain_map(P, Z, tz), chain_map(P, A, ta), Ns)


def induced_into_pullback(pb, u, v):
    """The map W -> P into a pullback given u: W -> Z and v: W -> A."""
    W, P = u.source, pb.obj
    p = W.p
    comps = {}
    for n in W.degrees():
        if n not in pb.kernel:
            continue
        comps[n] = {}
        for o in W.base.objects:
            both = np.concatenate([u.at(n, o), v.at(n, o)], axis=0)
            x = fp.solve(pb.kernel[n][o], both, p)
            if x is None:
                raise ValueError("maps do not agree over the pullback base")
            comps[n][o] = x
    return chain_map(W, P, comps)


def factor_through_mono(h, incl):
    """m with incl o m = h, for a degreewise injective incl; None if h does not land in it."""
    C, Z = h.source, incl.source
    p = C.p
    comps = {}
    for n in C.degrees():
        comps[n] = {}
        for o in C.base.objects:
            x = fp.solve(incl.at(n, o), h.at(n, o), p)
            if x is None:
                return None
            comps[n][o] = x
    m = chain_map(C, Z, comps)
    return m if chain_equal(compose_chain(incl, m), h) else None


def hom_chain(X, Y):
    """All chain maps X -> Y as a HomSpace keyed by (degree, object)."""
    p = X.p
    c = X.base
    degs = sorted(set(X.degrees()) & set(Y.degrees()))
    blocks, total = _blocks([((n, o), Y.dim(n, o), X.dim(n, o))
                             for n in degs for o in c.objects])
    keys = {b[0] for b in blocks}
    eqs = []
    for n in degs:
        for m in c.non_identities():
            s, t = c.src(m), c.tgt(m)
            eqs.append([((n, s), _kron_left(Y.mod(n).mats[m], X.dim(n, s))),
                        ((n, t), (-_kron_right(X.mod(n).mats[m], Y.dim(n, t))) % p)])
    for n in sorted(set(X.degrees()) | set(Y.degrees()) | {k + 1 for k in X.degrees()}):
        for o in c.objects:
            # d_Y f_n - f_{n-1} d_X = 0 as maps X_n -> Y_{n-1}
            terms = []
            if (n, o) in keys:
                terms.append(((n, o), _kron_left(Y.d(n, o), X.dim(n, o))))
            if (n - 1, o) in keys:
                terms.append(((n - 1, o), (-_kron_right(X.d(n, o), Y.dim(n - 1, o))) % p))
            if terms and Y.dim(n - 1, o) * X.dim(n, o):
                eqs.append(terms)
    rows = _constraint_rows(blocks, total, eqs)
    C = np.concatenate(rows, axis=0) % p if rows else fp.zeros(0, total)
    return HomSpace(blocks, fp.nullspace(C, p), p)


def hom_element(H, X, Y, vec):
    comps = {}
    for (n, o), M in H.unflatten(vec).items():
        comps.setdefault(n, {})[o] = M
    return chain_map(X, Y, comps)


def homology_dims(X):
    """Dimensions of H_n for a complex over the terminal category."""
    assert len(X.base.objects) == 1
    (o,) = X.base.objects
    p = X.p
    out = {}
    for n in sorted(set(X.degrees())):
        dn = X.d(n, o)
        dn1 = X.d(n + 1, o)
        cycles = X.dim(n, o) - fp.rank(dn, p)
        out[n] = cycles - fp.rank(dn1, p)
    return {n: h for n, h in out.items() if h}


def sort_labels(xs):
    return sorted(xs, key=skey)
