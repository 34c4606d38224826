"""Pro-objects: hom-sets, reindexing, and factorization of tower maps.

Hom(X, Y) between pro-objects is lim_k colim_i Hom(X_i, Y_k).  It is
computed directly and cross-checked against classes of representatives.
Tower maps of chain complexes are then factored with the dual small object
argument, so that the fibration part is a tower of pullbacks.
"""

import numpy as np

from gsoa import procalc as pc
from gsoa.corpus import random_chain_tower_map, random_directed_index, random_set_pro
from gsoa.profactor import pro_factorize

rng = np.random.default_rng(3)
I = random_directed_index(rng, 3)
X, Y = random_set_pro(rng, I), random_set_pro(rng, random_directed_index(rng, 2))
H = pc.hom_pro(X, Y)
print("|Hom(X, Y)| =", len(H), " classes of representatives:", len(pc.representative_classes(X, Y)))

f = random_chain_tower_map(rng, 2)
for cls in ("M", "N"):
    F = pro_factorize(f, cls)
    comp = pc.compose_promaps(F.fibration, F.lifting_part)
    print(f"class {cls}: stabilized={F.cert.stabilized} stages={F.stages}",
          " composite equals f:", pc.reps_equivalent(comp, f) is not None)

F = pro_factorize(f, "M", levels="all")
print("every-level product, class M:",
      "stabilized" if F.cert.stabilized else "unstabilized", "after", F.stages, "stages")
