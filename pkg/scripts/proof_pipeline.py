"""Composed CNF -> search relation -> (P)DT -> Res(xor) refutation, end to end.

    python scripts/proof_pipeline.py --formula triangle --gadget ind:1 --out refutation.json
"""

import argparse
import json

from liftkit import oracle, proofcomp
from liftkit.boolfun import gadget_relation, parse_gadget
from liftkit.lift import Mode, build_lifted_dt
from liftkit.trees import computes, pdt_from_dt

FORMULAS = {
    "contradiction": proofcomp.contradiction,
    "triangle": proofcomp.tseitin_triangle,
    "path3": lambda: proofcomp.tseitin_path(3),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--formula", choices=sorted(FORMULAS), default="triangle")
    ap.add_argument("--gadget", default="ind:1")
    ap.add_argument("--out")
    args = ap.parse_args()

    cnf = FORMULAS[args.formula]()
    g = parse_gadget(args.gadget)
    comp = proofcomp.compose_cnf(cnf, g)
    report = {"formula": args.formula, "gadget": args.gadget, **proofcomp.composed_stats(cnf, g, comp)}

    S = proofcomp.search_relation(cnf)
    d = oracle.dt_depth(S)
    dt = oracle.optimal_dt(S, "size")
    report.update(dt_depth=d, dt_size=dt.size, lower_bound=2 ** d)

    g_dt = oracle.optimal_dt(gadget_relation(g), "size")
    witness = pdt_from_dt(proofcomp.composed_search_dt(dt, cnf, g, comp, g_dt), comp.num_vars)
    ref = proofcomp.refutation_from_pdt(witness, comp)
    report.update(refutation_size=ref.size, refutation_ok=proofcomp.check_refutation(ref, comp))

    # lifting the witness back gives a DT for the original search relation
    src = proofcomp.relabel(witness, lambda lab: comp.parents[lab])
    lifted = build_lifted_dt(src, g, 1, Mode.SIZE, n=cnf.num_vars, check=True)
    report.update(lifted_depth=lifted.dt.depth, lifted_ok=computes(lifted.dt, S),
                  max_marks=max(r.state.marks() for r in lifted.runs))
    print(json.dumps(report, sort_keys=True))
    if args.out:
        with open(args.out, "w") as fh:
            json.dump({"cnf_vars": comp.num_vars, "refutation": ref.to_json()}, fh)


if __name__ == "__main__":
    main()
