import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsoa.corpus import random_diagram, random_poset
from gsoa.fincat import (DiagramMap, FiniteCategory, colim_set, compose_maps, constant_diagram,
                         identity_map, is_natural, is_orbit, make_diagram, orbit_over_point,
                         orbits, poset, pullback_set, span, terminal, validate_category,
                         validate_diagram, walking_arrow)

from oracles import closure_classes, colimit_is_universal


def arrow_diagram():
    return make_diagram(walking_arrow(), {"a": ("a", "b"), "b": ("c",)},
                        {"a>b": {"a": "c", "b": "c"}})


def span_diagram():
    # b <- a -> c with values {x} <- {x} -> {x, y}
    return make_diagram(span(), {"a": ("x",), "b": ("x",), "c": ("x", "y")},
                        {"a>b": {"x": "x"}, "a>c": {"x": "x"}})


# -- categories ---------------------------------------------------------------

def test_terminal_category_is_valid():
    assert validate_category(terminal()).ok


def test_missing_composite_is_reported():
    c = walking_arrow()
    comp = dict(c.compose)
    del comp[("a>b", "a>a")]
    broken = FiniteCategory(c.objects, c.morphisms, c.identities, comp)
    rep = validate_category(broken)
    assert not rep.ok
    assert ("composition not total", ("a>b", "a>a")) in rep.violations


def test_three_element_chain_is_a_category():
    c = poset(["a", "b", "c"], [("b", "a"), ("c", "b")])
    assert validate_category(c).ok
    # every composable triple, checked by hand rather than by the validator
    triples = 0
    for f, g, h in itertools.product(c.morphisms, repeat=3):
        if c.tgt(f) == c.src(g) and c.tgt(g) == c.src(h):
            triples += 1
            assert c.comp(h, c.comp(g, f)) == c.comp(c.comp(h, g), f)
    assert triples == 15  # weakly ordered 4-tuples from 3 elements


def test_wrong_associativity_is_caught():
    c = poset(["a", "b", "c"], [("b", "a"), ("c", "b")])
    comp = dict(c.compose)
    comp[("b>a", "c>b")] = "c>c"
    assert not validate_category(FiniteCategory(c.objects, c.morphisms, c.identities, comp)).ok


def test_opposite_category_is_valid():
    c = span().opposite()
    assert validate_category(c).ok
    assert c.hom("b", "a") and not c.hom("a", "b")


# -- colimits -----------------------------------------------------------------

@pytest.mark.parametrize("base", [terminal(), walking_arrow(), span()])
def test_constant_singleton_has_one_point(base):
    assert len(colim_set(constant_diagram(base, ["*"])).apex) == 1


def test_arrow_colimit_is_one_class():
    col = colim_set(arrow_diagram())
    assert len(col.apex) == 1
    (members,) = col.classes.values()
    assert set(members) == {("a", "a"), ("a", "b"), ("b", "c")}


def test_span_colimit_has_two_points():
    col = colim_set(span_diagram())
    assert len(col.apex) == 2
    assert colimit_is_universal(span_diagram(), S=(0, 1, 2))


def test_apex_is_named_by_least_member():
    col = colim_set(arrow_diagram())
    assert col.apex == (("a", "a"),)


def test_empty_values_are_allowed():
    X = make_diagram(walking_arrow(), {"a": (), "b": (0, 1)}, {"a>b": {}})
    assert validate_diagram(X).ok
    assert len(colim_set(X).apex) == 2


# -- orbits -------------------------------------------------------------------

def test_orbit_of_singleton_is_itself():
    X = constant_diagram(span(), ["*"])
    (p,) = colim_set(X).apex
    T = orbit_over_point(X, p)
    assert T.diagram == X and is_orbit(T.diagram)


def test_arrow_orbit_is_everything():
    X = arrow_diagram()
    (p,) = colim_set(X).apex
    T = orbit_over_point(X, p).diagram
    assert T.values == X.values and is_orbit(T)


def test_span_orbit_over_y():
    X = span_diagram()
    col = colim_set(X)
    p = col.cocone["c"]["y"]
    T = orbit_over_point(X, p, col)
    assert T.diagram.values == {"a": (), "b": (), "c": ("y",)}
    assert is_orbit(T.diagram)
    assert is_natural(T.projection)


def test_orbit_over_missing_point():
    with pytest.raises(KeyError):
        orbit_over_point(arrow_diagram(), ("b", "nope"))


# -- pullbacks ----------------------------------------------------------------

def test_pullback_along_identity():
    A = arrow_diagram()
    P, pa, pb = pullback_set(identity_map(A), identity_map(A))
    assert {o: len(v) for o, v in P.values.items()} == {o: len(v) for o, v in A.values.items()}


def test_pullback_of_singletons():
    one = constant_diagram(terminal(), ["u"])
    P, _, _ = pullback_set(identity_map(one), identity_map(one))
    assert P.size() == 1


def test_pullback_of_fibers_counts_pairs():
    c = terminal()
    A = make_diagram(c, {"*": (0, 1)})
    B = make_diagram(c, {"*": ("u",)})
    C = make_diagram(c, {"*": ("u",)})
    f = DiagramMap(A, C, {"*": {0: "u", 1: "u"}})
    g = DiagramMap(B, C, {"*": {"u": "u"}})
    P, pa, pb = pullback_set(f, g)
    assert P.size() == 2 and is_natural(pa) and is_natural(pb)


def test_pullback_universal_property_brute_force():
    # cones from a small test diagram W into the cospan factor uniquely through P
    c = walking_arrow()
    A = arrow_diagram()
    C = make_diagram(c, {"a": (0, 1), "b": (0,)}, {"a>b": {0: 0, 1: 0}})
    f = DiagramMap(A, C, {"a": {"a": 0, "b": 1}, "b": {"c": 0}})
    g = identity_map(C)
    P, pa, pb = pullback_set(f, g)
    W = make_diagram(c, {"a": (0, 1), "b": (0,)}, {"a>b": {0: 0, 1: 0}})
    for ua in _all_maps(W, A):
        for ub in _all_maps(W, C):
            if compose_maps(f, ua).components != compose_maps(g, ub).components:
                continue
            through = [u for u in _all_maps(W, P)
                       if compose_maps(pa, u).components == ua.components
                       and compose_maps(pb, u).components == ub.components]
            assert len(through) == 1


def test_pullback_rejects_mismatched_bases():
    A = arrow_diagram()
    B = constant_diagram(terminal(), ["*"])
    with pytest.raises(ValueError):
        pullback_set(identity_map(A), identity_map(B))


def _all_maps(X, Y):
    objs = X.base.objects
    slots = [(o, x) for o in objs for x in X.values[o]]
    for choice in itertools.product(*[Y.values[o] for o, _ in slots]):
        comps = {o: {} for o in objs}
        for (o, x), y in zip(slots, choice):
            comps[o][x] = y
        f = DiagramMap(X, Y, comps)
        if is_natural(f):
            yield f


# -- properties over random instances ------------------------------------------

@st.composite
def diagrams(draw):
    seed = draw(st.integers(0, 2 ** 32 - 1))
    rng = np.random.default_rng(seed)
    base = random_poset(rng, draw(st.integers(1, 3)))
    return random_diagram(rng, base, max_size=4)


@settings(max_examples=60, deadline=None)
@given(diagrams())
def test_random_diagrams_are_functorial(X):
    assert validate_category(X.base).ok
    assert validate_diagram(X).ok


@settings(max_examples=60, deadline=None)
@given(diagrams())
def test_orbits_partition_the_diagram(X):
    seen = {o: [] for o in X.base.objects}
    for T in orbits(X):
        assert is_orbit(T.diagram)
        assert validate_diagram(T.diagram).ok
        for o in X.base.objects:
            seen[o].extend(T.diagram.values[o])
    for o in X.base.objects:
        assert sorted(map(repr, seen[o])) == sorted(map(repr, X.values[o]))


@settings(max_examples=60, deadline=None)
@given(diagrams())
def test_colimit_matches_relation_closure(X):
    col = colim_set(X)
    mine = {frozenset(ms) for ms in col.classes.values()}
    assert mine == closure_classes(X)
    for o in X.base.objects:
        for x in X.values[o]:
            assert (o, x) in col.classes[col.cocone[o][x]]


@settings(max_examples=40, deadline=None)
@given(diagrams())
def test_colimit_is_universal_by_cocone_search(X):
    assert colimit_is_universal(X)
