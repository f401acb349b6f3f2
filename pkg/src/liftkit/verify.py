"""Exhaustive verification suites over the fixed small corpus.

Each check returns a ``Check``; a failing check carries the first
counterexample met (corpus entries are ordered smallest first).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

from . import oracle
from .boolfun import (
    Gadget,
    Relation,
    compose_relation,
    gadget_relation,
    make_ind,
    make_ip,
    make_maj,
    max_stifling,
    is_k_stifled,
    relation_from_function,
)
from .config import Caps
from .corpus import (
    compose_dt,
    nonadaptive_source,
    random_basis,
    random_correct_pdt,
    random_pdt,
    random_relation,
    random_sdt,
    rng_for,
    total_functions,
)
from .f2core import BitVec
from .lift import InvariantError, Mode, build_lifted_dt, row_reduce, witness_completion
from .trees import (
    answers,
    computes,
    equivalent,
    is_nonadaptive,
    pc_from_sdt,
    pdt_from_dt,
    pdt_from_sdt,
    sdt_from_pdt,
    tree_to_json,
)

SEED = 20240601


@dataclass
class Check:
    name: str
    passed: bool = True
    count: int = 0
    detail: str = ""
    counterexample: Optional[dict] = None
    seconds: float = 0.0
    info: dict = field(default_factory=dict)

    def fail(self, detail: str, counterexample: Optional[dict] = None):
        if self.passed:
            self.passed = False
            self.detail = detail
            self.counterexample = counterexample

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f" ({self.detail})" if self.detail else ""
        return f"{status} {self.name}: {self.count} checks in {self.seconds:.2f}s{extra}"

    def to_json(self) -> dict:
        d = {"name": self.name, "passed": self.passed, "count": self.count, "detail": self.detail}
        if self.counterexample is not None:
            d["counterexample"] = self.counterexample
        if self.info:
            d["info"] = self.info
        return d


def _timed(fn):
    def wrapper(*a, **kw):
        t0 = time.perf_counter()
        c = fn(*a, **kw)
        c.seconds = time.perf_counter() - t0
        return c

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


# corpus


GADGETS = (("ind:1", make_ind(1), 1), ("ip:2", make_ip(2), 1), ("maj:3", make_maj(3), 1))


@dataclass
class Case:
    tag: str
    f: Relation
    gname: str
    g: Gadget
    k: int
    source: object


def relations(seed: int = SEED) -> list[tuple[str, Relation]]:
    out = [(f"f2:{i:x}", f) for i, f in enumerate(total_functions(2))]
    out += [(f"r3:{i}", random_relation(3, rng_for(seed, 3, i))) for i in range(20)]
    return out


@lru_cache(maxsize=None)
def _optimal_dt(rel: Relation):
    return oracle.optimal_dt(rel, "depth", Caps())


@lru_cache(maxsize=None)
def _optimal_pdt(rel: Relation):
    return oracle.optimal_pdt(rel, "depth", Caps())


def lifting_corpus(seed: int = SEED, randoms: int = 10) -> list[Case]:
    """Sources: composed optimal DTs, oracle-optimal PDTs (arity <= 6), random correct PDTs."""
    cases = []
    for ri, (tag, f) in enumerate(relations(seed)):
        for gi, (gname, g, k) in enumerate(GADGETS):
            N = f.n * g.m
            fdt = _optimal_dt(f)
            gdt = _optimal_dt(gadget_relation(g))
            cases.append(Case(f"{tag}/{gname}/composed", f, gname, g, k, pdt_from_dt(compose_dt(fdt, gdt, g.m), N)))
            if N <= 6:
                cases.append(Case(f"{tag}/{gname}/optimal", f, gname, g, k, _optimal_pdt(compose_relation(f, g))))
            for s in range(randoms):
                t = random_correct_pdt(f, g, rng_for(seed, 7, ri, gi, s))
                cases.append(Case(f"{tag}/{gname}/random{s}", f, gname, g, k, t))
    cases.sort(key=lambda c: (c.f.n * c.g.m, c.source.size))
    return cases


def _cex(case: Case, run=None, **extra) -> dict:
    d = {"case": case.tag, "gadget": case.gname, "k": case.k, "relation": case.f.to_json()}
    if case.source.size <= 64:
        d["source"] = tree_to_json(case.source)
    if run is not None:
        d["transcript"] = run.to_json()
    d.update(extra)
    return d


# criterion-level checks


@_timed
def stifling_table() -> Check:
    c = Check("stifling table")
    expect = {"ind:1": (make_ind(1), 1), "ind:2": (make_ind(2), 2), "ip:2": (make_ip(2), 1)}
    expect["ip:3"] = (make_ip(3), 1)
    for n, v in ((3, 1), (5, 2), (7, 3)):
        expect[f"maj:{n}"] = (make_maj(n), v)
    for name, (g, v) in expect.items():
        c.count += 1
        got = max_stifling(g)
        if got != v:
            c.fail(f"{name}: max stifling {got}, expected {v}", {"gadget": name, "got": got})
    for n in range(1, 5):
        kk = -(-n // 2)
        for t in range(1 << (1 << n)):
            g = Gadget(n, tuple((t >> i) & 1 for i in range(1 << n)))
            c.count += 1
            if is_k_stifled(g, kk):
                c.fail(f"{g.table_str()} is {kk}-stifled", {"table": g.table_str(), "k": kk})
            if n <= 2 and is_k_stifled(g, 1):
                c.fail(f"{g.table_str()} is 1-stifled at arity {n}", {"table": g.table_str()})
    return c


def _witness_ok(case: Case, run, w: BitVec) -> Optional[str]:
    try:
        y = witness_completion(run.state, case.g, case.k, w)
    except ValueError as e:
        return str(e)
    if answers(case.source, y) != run.state.path:
        return "completion does not reach the transcript's leaf"
    return None


@_timed
def lifting_correctness(cases=None, reducer=row_reduce, witnesses: Optional[Check] = None) -> Check:
    """Lifted DTs compute f, respect depth <= d/k, and every transcript keeps its invariants."""
    c = Check("lifting correctness")
    w = witnesses or Check("witness completion")
    cases = lifting_corpus() if cases is None else cases
    for case in cases:
        c.count += 1
        N = case.f.n * case.g.m
        try:
            res = build_lifted_dt(case.source, case.g, case.k, Mode.DEPTH, n=case.f.n,
                                  reducer=reducer, check=True, exhaustive=N <= 10)
        except InvariantError as e:
            c.fail(f"{case.tag}: {e}", _cex(case, e.state))
            break
        bad = None
        if not computes(res.dt, case.f):
            bad = "lifted DT does not compute f"
        elif res.dt.depth > case.source.depth // case.k:
            bad = f"lifted depth {res.dt.depth} > {case.source.depth}//{case.k}"
        if bad:
            c.fail(f"{case.tag}: {bad}", _cex(case, lifted=tree_to_json(res.dt)))
            break
        for run in res.runs:
            for wv in range(1 << case.f.n):
                wb = BitVec(case.f.n, wv)
                if any(wb[j] != b for j, b in run.state.x.items()):
                    continue
                w.count += 1
                err = _witness_ok(case, run, wb)
                if err:
                    w.fail(f"{case.tag} w={wb}: {err}", _cex(case, run.state, w=str(wb)))
    c.info["witness"] = w.to_json()
    return c


@_timed
def size_and_cost_modes(cases=None, reducer=row_reduce) -> Check:
    """Size mode: size(t) >= 2^marks per run. SdtCost mode on converted protocols:
    Wrong answers >= k * queries and the lifted DT still computes f."""
    c = Check("size and sdt-cost modes")
    cases = lifting_corpus() if cases is None else cases
    for case in cases:
        try:
            res = build_lifted_dt(case.source, case.g, case.k, Mode.SIZE, n=case.f.n, reducer=reducer, check=True)
            for run in res.runs:
                c.count += 1
                if case.source.size < 2 ** run.state.marks():
                    c.fail(f"{case.tag}: size {case.source.size} < 2^{run.state.marks()}", _cex(case, run.state))
            if not computes(res.dt, case.f):
                c.fail(f"{case.tag}: size-mode DT does not compute f", _cex(case))
            pc = pc_from_sdt(sdt_from_pdt(case.source))
            res = build_lifted_dt(pc, case.g, case.k, Mode.SDT_COST, n=case.f.n, reducer=reducer, check=True)
            for run in res.runs:
                c.count += 1
                if run.state.wrong < case.k * len(run.state.Q):
                    c.fail(f"{case.tag}: wrong {run.state.wrong} < k*{len(run.state.Q)}", _cex(case, run.state))
            if not computes(res.dt, case.f):
                c.fail(f"{case.tag}: sdt-cost DT does not compute f", _cex(case))
            if res.dt.depth > pc.cost // case.k:
                c.fail(f"{case.tag}: queries exceed cost/k", _cex(case))
        except InvariantError as e:
            c.fail(f"{case.tag}: {e}", _cex(case, e.state))
        if not c.passed:
            break
    return c


@_timed
def deferred_mode(cases=None, reducer=row_reduce) -> Check:
    """Deferred queries: before the parity triggering the q-th query, at least q*k parities were processed."""
    c = Check("deferred mode")
    cases = lifting_corpus() if cases is None else cases
    for case in cases:
        try:
            res = build_lifted_dt(case.source, case.g, case.k, Mode.DEFERRED, n=case.f.n, reducer=reducer, check=True)
        except InvariantError as e:
            c.fail(f"{case.tag}: {e}", _cex(case, e.state))
            break
        c.count += 1
        if not computes(res.dt, case.f):
            c.fail(f"{case.tag}: deferred DT does not compute f", _cex(case))
            break
        for run in res.runs:
            for q, trig in enumerate(run.state.triggers, start=1):
                if trig < q * case.k:
                    c.fail(f"{case.tag}: query {q} fired after {trig} parities", _cex(case, run.state))
    return c


@_timed
def oracle_theorems(caps: Optional[Caps] = None) -> Check:
    c = Check("oracle theorem checks")
    caps = caps or Caps()
    xor = lambda n: relation_from_function([bin(i).count("1") & 1 for i in range(1 << n)])  # noqa: E731
    ind = make_ind(1)
    c.count += 1
    v = oracle.pdt_depth(compose_relation(xor(2), ind), caps)
    c.info["pdt_depth(xor2 o ind1)"] = v
    if v != 3 or v != oracle.dt_depth(xor(2), caps) + 1:
        c.fail(f"pdt_depth(xor2 o ind1) = {v}, expected 3")
    for n in (1, 2, 3):
        c.count += 1
        if oracle.dt_depth(xor(n), caps) != n:
            c.fail(f"dt_depth(xor{n}) != {n}")
    rows = []
    for i, f in enumerate(total_functions(2)):
        fg = compose_relation(f, ind)
        d = oracle.dt_depth(f, caps)
        pd = oracle.pdt_depth(fg, caps)
        ps = oracle.pdt_size(fg, caps)
        rows.append({"f": i, "dt_depth": d, "pdt_depth": pd, "pdt_size": ps})
        c.count += 2
        if d >= 1 and pd < d + 1:
            c.fail(f"f={i:04b}: pdt_depth {pd} < dt_depth+1 = {d + 1}")
        if ps < 2 ** d:
            c.fail(f"f={i:04b}: pdt_size {ps} < 2^{d}")
    c.info["table"] = rows
    return c


@_timed
def conversions(samples: int = 100, seed: int = SEED) -> Check:
    """Half random PDTs through sdt_from_pdt, half random SDTs through pdt_from_sdt."""
    c = Check("tree conversions")
    half = samples // 2
    for i in range(samples):
        rng = rng_for(seed, 6, i)
        n = int(rng.integers(2, 11))
        depth = int(rng.integers(1, 6))
        c.count += 1
        if i < half:
            t = random_pdt(n, depth, rng)
            s = sdt_from_pdt(t)
            if not equivalent(t, s, n):
                c.fail(f"sample {i}: sdt_from_pdt changes semantics", {"pdt": tree_to_json(t)})
            elif s.depth > 2 * math.log2(t.size) + 1e-9:
                c.fail(f"sample {i}: sdt depth {s.depth} > 2 log2 {t.size}", {"pdt": tree_to_json(t)})
        else:
            t = random_sdt(n, depth, rng)
            p = pdt_from_sdt(t)
            if not equivalent(t, p, n):
                c.fail(f"sample {i}: pdt_from_sdt changes semantics", {"sdt": tree_to_json(t)})
            elif p.size > n ** t.depth:
                c.fail(f"sample {i}: pdt size {p.size} > {n}^{t.depth}", {"sdt": tree_to_json(t)})
            pc = pc_from_sdt(t)
            if not equivalent(t, pc, n) or pc.cost > t.depth:
                c.fail(f"sample {i}: protocol conversion fails", {"sdt": tree_to_json(t)})
    return c


def nonadaptive_sources(seed: int = SEED) -> list[Case]:
    cases = []
    for i, f in enumerate(total_functions(2)):
        for gi, (gname, g, k) in enumerate(GADGETS):
            N = f.n * g.m
            units = [BitVec.unit(N, c) for c in range(N)]
            cases.append(Case(f"f2:{i:x}/{gname}/units", f, gname, g, k, nonadaptive_source(f, g, units)))
            basis = random_basis(N, rng_for(seed, 5, i, gi))
            cases.append(Case(f"f2:{i:x}/{gname}/basis", f, gname, g, k, nonadaptive_source(f, g, basis)))
    return cases


@_timed
def nonadaptive_lifting(reducer=row_reduce, seed: int = SEED) -> Check:
    c = Check("non-adaptive lifting")
    for case in nonadaptive_sources(seed):
        c.count += 1
        if not is_nonadaptive(case.source):
            c.fail(f"{case.tag}: source is not non-adaptive")
            break
        try:
            res = build_lifted_dt(case.source, case.g, case.k, Mode.DEPTH, n=case.f.n, reducer=reducer, check=True)
        except InvariantError as e:
            c.fail(f"{case.tag}: {e}", _cex(case, e.state))
            break
        seqs = {tuple(r.state.Q) for r in res.runs}
        if len(seqs) != 1 or not computes(res.dt, case.f):
            c.fail(f"{case.tag}: query sequences {sorted(seqs)}", _cex(case))
            break
    return c


NONADAPTIVE_SUBCORPUS = (("ind:1", 2), ("maj:3", 2), ("ip:2", 1))


@_timed
def nonadaptive_theorem(caps: Optional[Caps] = None) -> Check:
    """napdt(f o g) >= nadt(f) * k for every total f on n bits, with m*n <= 6."""
    c = Check("non-adaptive theorem")
    caps = caps or Caps().with_overrides(napdt=6)
    table = dict((name, (g, k)) for name, g, k in GADGETS)
    rows = []
    for gname, n in NONADAPTIVE_SUBCORPUS:
        g, k = table[gname]
        for fn in range(1, n + 1):
            for i, f in enumerate(total_functions(fn)):
                c.count += 1
                a = oracle.napdt_depth(compose_relation(f, g), caps)
                b = oracle.nadt_depth(f, caps)
                rows.append([gname, fn, i, a, b])
                if a < b * k:
                    c.fail(f"{gname}, f={i} on {fn} bits: napdt {a} < {b}*{k}")
    c.info["table"] = rows
    return c


@_timed
def proof_pipeline(caps: Optional[Caps] = None) -> Check:
    from . import proofcomp as pc

    c = Check("proof complexity pipeline")
    caps = caps or Caps()
    g = make_ind(1)
    g_dt = oracle.optimal_dt(gadget_relation(g), "size", caps)
    for name, cnf in (("contradiction", pc.contradiction()), ("triangle", pc.tseitin_triangle())):
        comp = pc.compose_cnf(cnf, g)
        st = pc.composed_stats(cnf, g, comp)
        c.count += 1
        if st["width"] > st["width_bound"] or st["clauses"] > st["count_bound"]:
            c.fail(f"{name}: composed CNF exceeds width/count bounds {st}")
        for y in range(1 << comp.num_vars):
            c.count += 1
            if not pc.reduction_check(cnf, g, BitVec(comp.num_vars, y), comp):
                c.fail(f"{name}: reduction fails at y={BitVec(comp.num_vars, y)}")
                break
        S = pc.search_relation(cnf)
        d = oracle.dt_depth(S, caps)
        dt = oracle.optimal_dt(S, "size", caps)
        ref = pc.refutation_from_dt(dt, cnf)
        c.count += 1
        if not pc.check_refutation(ref, cnf) or ref.size != dt.size:
            c.fail(f"{name}: resolution refutation from the DT is rejected")
        witness = pc.composed_search_dt(dt, cnf, g, comp, g_dt)
        wpdt = pdt_from_dt(witness, comp.num_vars)
        SC = pc.search_relation(comp)
        c.count += 1
        if not computes(wpdt, SC):
            c.fail(f"{name}: witness PDT does not compute the composed search relation")
            continue
        ref2 = pc.refutation_from_pdt(wpdt, comp)
        if not pc.check_refutation(ref2, comp) or ref2.size != wpdt.size:
            c.fail(f"{name}: Res(xor) refutation from the PDT is rejected")
        entry = {"dt_depth": d, "bound": 2 ** d, "composed_arity": comp.num_vars, "witness_size": wpdt.size}
        c.count += 1
        if comp.num_vars <= caps.pdt_size:
            ps = oracle.pdt_size(SC, caps)
            entry["pdt_size"] = ps
            if ps < 2 ** d:
                c.fail(f"{name}: pdt_size {ps} < 2^{d}")
        else:
            entry["capped"] = f"arity {comp.num_vars} > pdt_size cap {caps.pdt_size}"
            if wpdt.size < 2 ** d:
                c.fail(f"{name}: witness size {wpdt.size} < 2^{d}")
            # the witness, relabelled by parent clause, computes S_C o g; lifting it must give
            # a DT for S_C whose runs each certify size >= 2^marks
            lifted_src = pc.relabel(wpdt, lambda lab: comp.parents[lab])
            res = build_lifted_dt(lifted_src, g, 1, Mode.SIZE, n=cnf.num_vars, check=True)
            entry["lifted_depth"] = res.dt.depth
            if not computes(res.dt, S) or res.dt.depth < d:
                c.fail(f"{name}: lifted witness does not give a DT for S_C")
            if any(wpdt.size < 2 ** r.state.marks() for r in res.runs):
                c.fail(f"{name}: size-mode accounting fails on the witness")
        c.info[name] = entry
    return c


# suites


def suite_stifling(**_) -> list[Check]:
    return [stifling_table()]


def suite_lifting(reducer=row_reduce, quick: bool = False, **_) -> list[Check]:
    cases = lifting_corpus(randoms=2 if quick else 10)
    w = Check("witness completion")
    main = lifting_correctness(cases, reducer=reducer, witnesses=w)
    w.seconds = 0.0
    main.info.pop("witness", None)
    return [
        main,
        w,
        size_and_cost_modes(cases, reducer=reducer),
        deferred_mode(cases, reducer=reducer),
        nonadaptive_lifting(reducer=reducer),
    ]


def suite_theorems(**_) -> list[Check]:
    return [oracle_theorems(), conversions(), nonadaptive_theorem()]


def suite_proofcomp(**_) -> list[Check]:
    return [proof_pipeline()]


SUITES: dict[str, Callable[..., list[Check]]] = {
    "stifling": suite_stifling,
    "lifting": suite_lifting,
    "theorems": suite_theorems,
    "proofcomp": suite_proofcomp,
}


def run_suite(name: str, **kw) -> list[Check]:
    if name == "all":
        out = []
        for s in SUITES.values():
            out += s(**kw)
        return out
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}")
    return SUITES[name](**kw)
