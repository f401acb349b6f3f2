"""liftkit command line."""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
from typing import Optional

from . import oracle, proofcomp
from .boolfun import (
    Relation,
    compose_relation,
    gadget_relation,
    is_k_stifled,
    max_stifling,
    parse_gadget,
    random_gadget,
    stifle,
    stifling_counterexample,
)
from .config import RunConfig, caps_from_env
from .corpus import compose_dt, random_correct_pdt, rng_for
from .lift import InvariantError, Mode, build_lifted_dt
from .trees import PcNode, load_tree_document, pdt_from_dt, pc_from_sdt, sdt_from_pdt, tree_document


class Output:
    """Text lines for people, JSON lines for machines."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def emit(self, record: dict, text: Optional[str] = None):
        if self.fmt == "json":
            self.stream.write(json.dumps(record, sort_keys=True) + "\n")
        else:
            self.stream.write((text if text is not None else _kv(record)) + "\n")


def _kv(d: dict) -> str:
    return "  ".join(f"{k}={json.dumps(v) if isinstance(v, (dict, list)) else v}" for k, v in d.items())


def _write_json(path: str, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_relation(spec: str) -> Relation:
    """A relation JSON file, or a gadget spec read as a total function."""
    if os.path.exists(spec):
        with open(spec) as fh:
            return Relation.from_json(json.load(fh))
    return gadget_relation(parse_gadget(spec))


# commands


def cmd_stifle(args, out: Output) -> int:
    g = parse_gadget(args.gadget)
    if args.max or args.k is None:
        v = max_stifling(g)
        out.emit({"gadget": args.gadget, "m": g.m, "max_stifling": v}, f"{args.gadget}: max stifling {v}")
        return 0
    ok = is_k_stifled(g, args.k)
    rec = {"gadget": args.gadget, "m": g.m, "k": args.k, "stifled": ok}
    if not ok:
        S, b = stifling_counterexample(g, args.k)
        rec["counterexample"] = {"S": list(S), "b": b}
    out.emit(rec, f"{args.gadget}: {args.k}-stifled {str(ok).lower()}")
    if args.witness and ok:
        for S in itertools.combinations(range(g.m), args.k):
            for b in (0, 1):
                pa = stifle(g, S, b)
                out.emit({"S": list(S), "b": b, "assignment": str(pa)}, f"  S={list(S)} b={b}: {pa}")
    return 0


def cmd_source(args, out: Output) -> int:
    """Write a PDT (or parity-constraint protocol) for f o g to a tree file."""
    f = load_relation(args.relation)
    g = parse_gadget(args.gadget)
    caps = caps_from_env()
    N = f.n * g.m
    if args.kind == "composed":
        fdt = oracle.optimal_dt(f, "depth", caps)
        gdt = oracle.optimal_dt(gadget_relation(g), "depth", caps)
        t = pdt_from_dt(compose_dt(fdt, gdt, g.m), N)
    elif args.kind == "optimal":
        t = oracle.optimal_pdt(compose_relation(f, g), args.measure, caps)
    else:
        t = random_correct_pdt(f, g, rng_for(args.seed, N))
    if args.protocol:
        t = pc_from_sdt(sdt_from_pdt(t))
    doc = tree_document(t, N, f.alphabet)
    doc["seed"] = args.seed
    _write_json(args.out, doc)
    out.emit({"out": args.out, "kind": doc["kind"], "arity": N, "depth": t.depth, "size": t.size, "seed": args.seed})
    return 0


def cmd_lift(args, out: Output) -> int:
    path = args.pdt or args.pc
    with open(path) as fh:
        t, arity, alphabet, _ = load_tree_document(json.load(fh))
    g = parse_gadget(args.gadget)
    mode = Mode(args.mode)
    if args.pc and mode is not Mode.SDT_COST:
        raise ValueError("a protocol source needs --mode sdt-cost")
    if args.pdt and isinstance(t, PcNode):
        raise ValueError("--pdt given a parity-constraint protocol")
    if arity % g.m:
        raise ValueError(f"tree arity {arity} is not a multiple of m={g.m}")
    n = arity // g.m
    res = build_lifted_dt(t, g, args.k, mode, n=n, check=True)
    metrics = res.metrics(t)
    if args.out:
        doc = tree_document(res.dt, n, alphabet, "dt")
        doc["transcripts"] = [r.state.to_json() for r in res.runs]
        doc["metrics"] = metrics
        args.config.inputs = [path]
        args.config.output = args.out
        doc["config"] = args.config.to_json()
        _write_json(args.out, doc)
    summary = {k: v for k, v in metrics.items() if k != "branches"}
    summary.update(gadget=args.gadget, k=args.k, seed=args.seed)
    out.emit(summary)
    if out.fmt == "json" or args.verbose:
        for b in metrics["branches"]:
            out.emit(b)
    return 0


def cmd_brute(args, out: Output) -> int:
    caps = caps_from_env()
    if args.compose:
        f = load_relation(args.compose[0])
        rel = compose_relation(f, parse_gadget(args.compose[1]))
        name = f"{args.compose[0]} o {args.compose[1]}"
    else:
        rel = load_relation(args.relation)
        name = args.relation
    r = oracle.MEASURES[args.measure](rel, caps)
    rec = r.record(timing=args.timing)
    out.emit(rec, f"{args.measure}({name}) = {r.value}  [{r.nodes} nodes]")
    return 0


def _tseitin(spec: str):
    name, _, param = spec.partition(":")
    if name == "triangle":
        return proofcomp.tseitin_triangle()
    if name == "path":
        return proofcomp.tseitin_path(int(param))
    if name == "cycle":
        return proofcomp.tseitin_cycle(int(param))
    if name == "contradiction":
        return proofcomp.contradiction()
    raise ValueError(f"unknown formula {spec!r}")


def cmd_compose_cnf(args, out: Output) -> int:
    if args.cnf:
        with open(args.cnf) as fh:
            cnf = proofcomp.from_dimacs(fh.read())
    else:
        cnf = _tseitin(args.formula)
    g = parse_gadget(args.gadget)
    comp = proofcomp.compose_cnf(cnf, g)
    stats = proofcomp.composed_stats(cnf, g, comp)
    caps = caps_from_env()
    if comp.num_vars <= caps.cnf:
        stats["unsat"] = not comp.satisfiable()
    else:
        stats["unsat"] = None
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(proofcomp.to_dimacs(comp, [f"composed with {args.gadget}"]))
        stats["out"] = args.out
    stats["gadget"] = args.gadget
    out.emit(stats)
    return 0


def cmd_experiment(args, out: Output) -> int:
    if args.name != "random-stifling":
        raise ValueError(f"unknown experiment {args.name!r}")
    rng = rng_for(args.seed, args.m)
    hits = 0
    for i in range(args.samples):
        s = int(rng.integers(0, 2**31))
        g = random_gadget(args.m, s)
        ok = is_k_stifled(g, args.k)
        hits += ok
        out.emit({"sample": i, "gadget_seed": s, "stifled": ok}, f"sample {i:3d} seed {s}: {'stifled' if ok else '-'}")
    frac = hits / args.samples if args.samples else 0.0
    out.emit(
        {"experiment": "random-stifling", "m": args.m, "k": args.k, "samples": args.samples,
         "seed": args.seed, "stifled": hits, "fraction": frac},
        f"m={args.m} k={args.k}: {hits}/{args.samples} stifled (fraction {frac:.3f}), seed {args.seed}",
    )
    return 0


def cmd_verify(args, out: Output) -> int:
    from .verify import run_suite

    checks = run_suite(args.suite, quick=args.quick)
    for c in checks:
        out.emit(c.to_json(), c.line())
        if not c.passed and c.counterexample is not None and out.fmt == "text":
            out.emit({}, "  counterexample: " + json.dumps(c.counterexample, sort_keys=True))
    return 0 if all(c.passed for c in checks) else 1


def build_parser() -> argparse.ArgumentParser:
    # --format and --seed are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p = argparse.ArgumentParser(prog="liftkit", description="Parity decision tree lifting toolkit", parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser
    sub.add_parser = lambda *a, **kw: _add(*a, parents=[common], **kw)

    s = sub.add_parser("stifle", help="k-stifling of a gadget")
    s.add_argument("gadget")
    s.add_argument("k", nargs="?", type=int)
    s.add_argument("--max", action="store_true")
    s.add_argument("--witness", action="store_true", help="print a forcing assignment for every (S, b)")
    s.set_defaults(fn=cmd_stifle)

    s = sub.add_parser("source", help="write a PDT computing f o g")
    s.add_argument("--relation", required=True, help="relation JSON or function spec such as xor:2")
    s.add_argument("--gadget", required=True)
    s.add_argument("--kind", choices=("composed", "optimal", "random"), default="composed")
    s.add_argument("--measure", choices=("depth", "size"), default="depth")
    s.add_argument("--protocol", action="store_true", help="convert to a parity-constraint protocol")
    s.add_argument("--out", required=True)
    s.set_defaults(fn=cmd_source)

    s = sub.add_parser("lift", help="simulate a PDT by a DT for the outer relation")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--pdt")
    src.add_argument("--pc")
    s.add_argument("--gadget", required=True)
    s.add_argument("--k", type=int, default=1)
    s.add_argument("--mode", choices=[m.value for m in Mode], default="depth")
    s.add_argument("--out")
    s.add_argument("--verbose", action="store_true")
    s.set_defaults(fn=cmd_lift)

    s = sub.add_parser("brute", help="exact complexity by exhaustive search")
    s.add_argument("--measure", choices=sorted(oracle.MEASURES), required=True)
    r = s.add_mutually_exclusive_group(required=True)
    r.add_argument("--relation")
    r.add_argument("--compose", nargs=2, metavar=("F", "G"))
    s.add_argument("--timing", action="store_true", help="include wall-clock seconds")
    s.set_defaults(fn=cmd_brute)

    s = sub.add_parser("compose-cnf", help="compose a CNF with a gadget")
    c = s.add_mutually_exclusive_group(required=True)
    c.add_argument("--cnf")
    c.add_argument("--formula", help="triangle, path:N, cycle:N or contradiction")
    s.add_argument("--gadget", required=True)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_compose_cnf)

    s = sub.add_parser("experiment", help="run an experiment")
    s.add_argument("name", choices=("random-stifling",))
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--k", type=int, required=True)
    s.add_argument("--samples", type=int, default=50)
    s.set_defaults(fn=cmd_experiment)

    s = sub.add_parser("verify", help="run verification suites")
    s.add_argument("--suite", choices=("stifling", "lifting", "theorems", "proofcomp", "all"), default="all")
    s.add_argument("--quick", action="store_true", help="smaller random corpus")
    s.set_defaults(fn=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    for key, default in (("format", "text"), ("seed", 0)):
        if not hasattr(args, key):
            setattr(args, key, default)
    out = Output(args.format)
    cfg = RunConfig(args.command, getattr(args, "gadget", None), getattr(args, "k", None),
                    getattr(args, "mode", "depth"), seed=args.seed, fmt=args.format)
    args.config = cfg
    try:
        return args.fn(args, out)
    except (ValueError, InvariantError, OSError) as e:
        print(f"liftkit: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
