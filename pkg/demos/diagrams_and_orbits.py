"""Set-valued diagrams on a finite category: colimits and orbit decomposition.

A diagram over the walking arrow a -> b is a function between two sets.  Its
colimit identifies each source element with its image, so it is the target
set; the orbits are the fibers of the cocone over each point.
"""

from gsoa import fincat as fc

c = fc.walking_arrow()
print("objects:", c.objects, " morphisms:", sorted(c.morphisms))
print("valid category:", fc.validate_category(c).ok)

arrow = next(m for m, (s, t) in c.morphisms.items() if s != t)
src, tgt = c.morphisms[arrow]
X = fc.make_diagram(c, {src: ["x", "y", "z"], tgt: ["p", "q", "r"]},
                    {arrow: {"x": "p", "y": "p", "z": "q"}})
print("valid diagram:", fc.validate_diagram(X).ok)

col = fc.colim_set(X)
print("colimit has", len(col.apex), "points")
for p in col.apex:
    print("  ", p, "<-", col.classes[p])

for T in fc.orbits(X):
    print("orbit over", T.point, ":", dict(T.diagram.values),
          " is an orbit:", fc.is_orbit(T.diagram))

# a non-poset index: the idempotent category, where e o e = e
E = fc.idempotent_category()
Y = fc.make_diagram(E, {"m": [0, 1, 2]}, {"e": {0: 0, 1: 0, 2: 2}})
print("idempotent diagram orbits:", [T.diagram.values["m"] for T in fc.orbits(Y)])
