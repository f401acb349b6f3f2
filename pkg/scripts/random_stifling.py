"""Fraction of random m-bit gadgets that are k-stifled.

    python scripts/random_stifling.py --m 6 8 10 12 --k 1 2 --samples 50 --seed 7

Prints one JSON line per (m, k). For small m the fraction is far from its
large-m limit, so nothing here is asserted.
"""

import argparse
import json

from liftkit.boolfun import is_k_stifled, random_gadget
from liftkit.corpus import rng_for


def fraction(m, k, samples, seed):
    rng = rng_for(seed, m)
    hits = sum(is_k_stifled(random_gadget(m, int(rng.integers(0, 2**31))), k) for _ in range(samples))
    return hits


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[4, 6, 8, 10, 12])
    ap.add_argument("--k", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--samples", type=int, default=50)
    ap.add_argument("--seed", type=int, default=7)
    args = ap.parse_args()
    for m in args.m:
        for k in args.k:
            hits = fraction(m, k, args.samples, args.seed)
            print(json.dumps({"m": m, "k": k, "samples": args.samples, "seed": args.seed,
                              "stifled": hits, "fraction": hits / args.samples}, sort_keys=True))


if __name__ == "__main__":
    main()
