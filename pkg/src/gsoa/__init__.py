"""Computable small object arguments over finite data.

Modules:
    fp          exact linear algebra over F_p
    fincat      finite categories, set-valued diagrams, colimits and orbits
    chains      diagrams of F_p chain complexes and their constructions
    soa         the small object argument engine, certificates and duality
    equichain   the equivariant structure on diagrams of chain complexes
    procalc     pro-objects, pro-maps and reindexing
    profactor   factorizations in pro-(chain complexes)
    jsonio      canonical JSON encoding
    cli         the ``gsoa`` command
"""

__version__ = "0.1.0"
