"""Oracle tables behind the lifting inequalities at desk scale.

For every total f on 1 or 2 bits and each gadget with m*n <= 6, prints
DT(f), NADT(f), PDT depth/size of f o g and the non-adaptive PDT depth
where the cap allows, plus the predicted lower bounds.
"""

import argparse
import json

from liftkit import oracle
from liftkit.boolfun import compose_relation, make_ind, make_ip, make_maj
from liftkit.config import Caps
from liftkit.corpus import total_functions

GADGETS = {"ind:1": (make_ind(1), 1), "ip:2": (make_ip(2), 1), "maj:3": (make_maj(3), 1)}


def rows(caps):
    for gname, (g, k) in GADGETS.items():
        for n in (1, 2):
            if n * g.m > 6:
                continue
            for i, f in enumerate(total_functions(n)):
                fg = compose_relation(f, g)
                d = oracle.dt_depth(f, caps)
                r = {"gadget": gname, "k": k, "n": n, "f": "".join(str(min(s)) for s in f.allowed),
                     "dt": d, "nadt": oracle.nadt_depth(f, caps),
                     "pdt_depth": oracle.pdt_depth(fg, caps), "pdt_size": oracle.pdt_size(fg, caps),
                     "depth_bound": d * k + (1 if d else 0), "size_bound": 2 ** (d * k)}
                if fg.n <= caps.napdt:
                    r["napdt"] = oracle.napdt_depth(fg, caps)
                yield r


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--napdt-cap", type=int, default=6)
    args = ap.parse_args()
    caps = Caps().with_overrides(napdt=args.napdt_cap)
    bad = 0
    for r in rows(caps):
        ok = r["pdt_depth"] >= r["depth_bound"] and r["pdt_size"] >= r["size_bound"]
        if "napdt" in r:
            ok = ok and r["napdt"] >= r["nadt"] * r["k"]
        r["ok"] = ok
        bad += not ok
        print(json.dumps(r, sort_keys=True))
    print(json.dumps({"violations": bad}))


if __name__ == "__main__":
    main()
