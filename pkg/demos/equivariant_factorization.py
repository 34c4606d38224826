"""Factorizing a chain map of diagrams of F_2-complexes with the small object argument.

Class I attaches sphere cells (generating cofibrations) and yields
cofibration o trivial fibration; class J attaches disk cells and yields
trivial cofibration o fibration.  Each run returns a certificate that can
be replayed.  In the certificate gamma : X -> Z is the cell part and
delta : Z -> Y has the right lifting property against the generators.
"""

import numpy as np

from gsoa import chains as ch
from gsoa import equichain as eq
from gsoa import fincat as fc
from gsoa.corpus import bases, random_chain_map, random_complex
from gsoa.soa import replay

T = fc.terminal()
zero = ch.zero_complex(T, 2)
S0 = eq.sphere_complex(T, 0)
f = ch.zero_chain(zero, S0)
print("f : 0 -> S^0, homology of target:", ch.homology_dims(S0))

for cls in ("I", "J"):
    cert, system = eq.factorize_equivariant(f, cls)
    print(f"class {cls}: stabilized={cert.stabilized} stages={cert.stages_used}")
    print("   Z homology:", ch.homology_dims(cert.Z))
    print("   delta o gamma == f:", ch.chain_equal(ch.compose_chain(cert.delta, cert.gamma), f))
    print("   replay ok:", replay(eq.ChainAdapter(), cert))

# over the walking arrow the cells are free on orbits of the base diagram
rng = np.random.default_rng(1)
B = bases()["walking_arrow"]
g = random_chain_map(rng, random_complex(rng, B, 0, 2, 2), random_complex(rng, B, 0, 2, 2))
cert, _ = eq.factorize_equivariant(g, "J")
print("random map over the walking arrow, class J:",
      "stabilized" if cert.stabilized else "unstabilized", "after", cert.stages_used, "stages")
