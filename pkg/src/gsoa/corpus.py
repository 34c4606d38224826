"""Random small instances for tests, demos and the acceptance suite.

Everything takes a ``numpy.random.Generator`` so runs are reproducible.
"""

import numpy as np

from . import chains as ch
from . import fp
from .fincat import make_diagram, poset, span, terminal, tower, validate_diagram, walking_arrow
from .procalc import ChainBase, FinMap, FinSetBase, ProMap, Representative, pro_object, tower_object


def random_matrix(rng, r, c, p=2):
    return rng.integers(0, p, size=(r, c), dtype=np.int64)


def random_module(rng, base, max_dim=2, p=2):
    """A module diagram over a poset whose non-identity arrows never compose.

    terminal, walking arrow and span qualify, so any matrices are functorial.
    """
    assert all(f == base.identities[base.src(f)] or g == base.identities[base.tgt(g)]
               for (g, f) in base.compose), "base has composable non-identity arrows"
    dims = {o: int(rng.integers(0, max_dim + 1)) for o in base.objects}
    mats = {m: random_matrix(rng, dims[t], dims[s], p) for m, (s, t) in base.morphisms.items()
            if m != base.identities[s]}
    return ch.module_diagram(base, p, dims, mats)


def random_natural(rng, M, N):
    H = ch.hom_modules(M, N)
    c = rng.integers(0, M.p, size=H.dim)
    return H.unflatten(H.vector(c))


def random_complex(rng, base, lo=0, hi=3, max_dim=3, pieces=3, p=2):
    """Direct sum of two-term pieces M -> N (random natural d) in degrees [lo, hi]."""
    parts = []
    for _ in range(int(rng.integers(1, pieces + 1))):
        n = int(rng.integers(lo, hi + 1))
        M = random_module(rng, base, 1, p)
        if n - 1 >= lo and rng.random() < 0.6:
            N = random_module(rng, base, 1, p)
            d = random_natural(rng, M, N)
            parts.append(ch.chain_diagram(base, p, {n: M, n - 1: N}, {n: d}))
        else:
            parts.append(ch.chain_diagram(base, p, {n: M}))
    X, _, _ = ch.direct_sum(parts)
    if any(X.dim(n, o) > max_dim for n in X.degrees() for o in base.objects):
        return random_complex(rng, base, lo, hi, max_dim, pieces, p)
    return X


def random_chain_map(rng, X, Y):
    H = ch.hom_chain(X, Y)
    c = rng.integers(0, X.p, size=H.dim)
    return ch.hom_element(H, X, Y, H.vector(c))


def bases():
    return {"terminal": terminal(), "walking_arrow": walking_arrow(), "span": span()}


def chain_map_corpus(seed=0, count=50, lo=0, hi=3, max_dim=3):
    """(name, f) pairs cycling through the three bases."""
    rng = np.random.default_rng(seed)
    names = list(bases())
    out = []
    for k in range(count):
        name = names[k % len(names)]
        B = bases()[name]
        X = random_complex(rng, B, lo, hi, max_dim)
        Y = random_complex(rng, B, lo, hi, max_dim)
        out.append((name, random_chain_map(rng, X, Y)))
    return out


# -- finite categories and set diagrams --------------------------------------

def random_poset(rng, n):
    """A random poset on n <= 3 elements (covers drawn from a random linear extension)."""
    els = [f"o{i}" for i in range(n)]
    covers = [(els[j], els[i]) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5]
    return poset(els, covers)


def random_diagram(rng, base, max_size=4):
    """A random functor base -> FinSet, built along a linear extension of the order.

    Each object's value set is drawn, then every arrow i -> j is fixed by
    composing through a generating arrow or drawn freely when no earlier
    choice constrains it; incompatible draws are retried.
    """
    for _ in range(200):
        vals = {o: tuple(range(int(rng.integers(0, max_size + 1)))) for o in base.objects}
        act = {}
        ok = True
        for m in sorted(base.non_identities(), key=lambda m: _length(base, m)):
            s, t = base.src(m), base.tgt(m)
            factored = [(g, f) for (g, f), h in base.compose.items()
                        if h == m and m not in (g, f)
                        and f != base.identities[s] and g != base.identities[t]]
            if factored:
                g, f = factored[0]
                act[m] = {x: act[g][act[f][x]] for x in vals[s]}
            else:
                if vals[s] and not vals[t]:
                    ok = False
                    break
                act[m] = {x: int(rng.integers(0, len(vals[t]))) for x in vals[s]}
        if not ok:
            continue
        X = make_diagram(base, vals, act)
        if validate_diagram(X).ok:
            return X
    raise RuntimeError("could not draw a functorial diagram")


def _length(base, m):
    """Length of the longest chain of non-identity arrows composing to m.

    Factorizations through m itself (an idempotent, say) are skipped; such
    arrows are drawn freely and the draw is kept only if it is functorial.
    """
    best = 1
    for (g, f), h in base.compose.items():
        if h == m and m not in (g, f) and f != base.identities[base.src(f)] \
                and g != base.identities[base.tgt(g)]:
            best = max(best, _length(base, g) + _length(base, f))
    return best


# -- pro-objects ----------------------------------------------------------------

def random_directed_index(rng, n):
    """A tower on n levels, or (n >= 3) a poset with a greatest element."""
    if n < 3 or rng.random() < 0.5:
        return tower(n - 1)
    els = [f"i{k}" for k in range(n)]
    covers = [(els[-1], e) for e in els[:-1]]
    covers += [(els[j], els[i]) for i in range(n - 1) for j in range(i + 1, n - 1)
               if rng.random() < 0.4]
    return poset(els, covers)


def random_set_pro(rng, index, max_size=3):
    """A pro-finite-set over ``index``: a random functor, bonds read off its action."""
    X = random_diagram(rng, index, max_size)
    bond = {m: FinMap(X.values[s], X.values[t], tuple(X.apply(m, x) for x in X.values[s]))
            for m, (s, t) in index.morphisms.items()}
    return pro_object(FinSetBase(), index, X.values, bond)


def random_chain_tower_map(rng, levels=2, hi=2, max_dim=2):
    """A map of towers of complexes over the terminal category, levels <= 3.

    Both towers have ``levels`` levels with random bonds; the map is drawn at
    the top level and pushed down, so the representative has theta = top.
    """
    B = ChainBase()
    T = terminal()
    Xs = [random_complex(rng, T, 0, hi, max_dim) for _ in range(levels)]
    Ys = [random_complex(rng, T, 0, hi, max_dim) for _ in range(levels)]
    bx = [random_chain_map(rng, Xs[i + 1], Xs[i]) for i in range(levels - 1)]
    by = [random_chain_map(rng, Ys[i + 1], Ys[i]) for i in range(levels - 1)]
    X, Y = tower_object(B, Xs, bx), tower_object(B, Ys, by)
    top = str(levels - 1)
    f_top = random_chain_map(rng, Xs[-1], Ys[-1])
    maps = {}
    for k in Y.index.objects:
        maps[k] = B.compose(Y.b(Y.index.hom(top, k)[0]), f_top)
    return ProMap(X, Y, Representative({k: top for k in Y.index.objects}, maps))
