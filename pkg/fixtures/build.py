"""Regenerate the CLI fixtures: python3 fixtures/build.py"""

import os

from gsoa import chains as ch
from gsoa import jsonio as J
from gsoa.equichain import constant_complex
from gsoa.fincat import idempotent_category, terminal, tower, walking_arrow

HERE = os.path.dirname(os.path.abspath(__file__))


def ws(**sections):
    return dict(schema_version=J.SCHEMA_VERSION, **sections)


def cx(X):
    d = J.complex_out(X, with_category=False)
    d["category"] = "pt"
    return d


def cmap(f, source, target):
    d = J.chain_map_out(f, with_ends=False)
    d.update(source=source, target=target)
    return d


def main():
    pt = terminal()
    out = {}
    out["terminal"] = ws(categories={"pt": J.category_out(pt)})

    out["walking_arrow"] = ws(
        categories={"arrow": J.category_out(walking_arrow())},
        diagrams={"X": {"category": "arrow", "values": {"a": [0, 1], "b": [0]},
                        "action": {"a>b": [[0, 0], [1, 0]]}}})

    zero = ch.zero_complex(pt, 2)
    s0 = constant_complex(pt, 2, {0: 1})
    out["zero_to_s0"] = ws(
        categories={"pt": J.category_out(pt)},
        complexes={"zero": cx(zero), "s0": cx(s0)},
        chain_maps={"z": cmap(ch.zero_chain(zero, s0), "zero", "s0")})

    two, three = [0, 1], [0, 1, 2]
    out["pro_sets"] = ws(
        categories={"tower": J.category_out(tower(2)), "idem": J.category_out(idempotent_category())},
        pro_objects={
            "T": {"base": "set", "index": "tower", "levels": {"0": two, "1": two, "2": three},
                  "bonding": {"1>0": [[0, 0], [1, 1]], "2>1": [[0, 0], [1, 1], [2, 1]],
                              "2>0": [[0, 0], [1, 1], [2, 1]]}},
            "E": {"base": "set", "index": "idem", "levels": {"m": three},
                  "bonding": {"e": [[0, 0], [1, 0], [2, 2]]}}},
        pro_maps={
            "shift": {"source": "T", "target": "T", "theta": {"0": "1", "1": "2", "2": "2"},
                      "maps": {"0": [[0, 0], [1, 1]], "1": [[0, 0], [1, 1], [2, 1]],
                               "2": [[0, 0], [1, 1], [2, 2]]}}})

    # constant S0 mapped to the tower S0 <- S0 (+) S0; level 1 is not surjective
    s00 = constant_complex(pt, 2, {0: 2})
    f1 = ch.chain_map(s0, s00, {0: {"*": [[1], [0]]}})
    b = ch.chain_map(s00, s0, {0: {"*": [[1, 1]]}})
    f0 = ch.compose_chain(b, f1)
    ident = ch.identity_chain(s0)
    out["pro_chain"] = ws(
        categories={"pt": J.category_out(pt), "t1": J.category_out(tower(1))},
        complexes={"s0": cx(s0), "s00": cx(s00)},
        pro_objects={
            "X": {"base": "chain", "index": "t1", "levels": {"0": "s0", "1": "s0"},
                  "bonding": {"1>0": J.chain_map_out(ident, with_ends=False)}},
            "Y": {"base": "chain", "index": "t1", "levels": {"0": "s0", "1": "s00"},
                  "bonding": {"1>0": J.chain_map_out(b, with_ends=False)}}},
        pro_maps={"f": {"source": "X", "target": "Y", "theta": {"0": "1", "1": "1"},
                        "maps": {"0": J.chain_map_out(f0, with_ends=False),
                                 "1": J.chain_map_out(f1, with_ends=False)}}})

    for name, doc in out.items():
        with open(os.path.join(HERE, name + ".json"), "w") as fh:
            fh.write(J.dumps(doc))


if __name__ == "__main__":
    main()
