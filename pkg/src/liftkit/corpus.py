"""Seeded generators for relations and trees used by the test and verify suites."""

from __future__ import annotations

from typing import Callable, Optional, Sequence

import numpy as np

from .boolfun import Gadget, Relation, apply_gadget, gadget_relation, relation_from_function
from .f2core import BitVec, F2Basis, solve
from .trees import DtNode, Leaf, PdtNode, SdtNode, Tree, complete_pdt


def rng_for(seed, *tags: int) -> np.random.Generator:
    """Independent stream per (seed, tags) so corpora do not shift when one part changes."""
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, tags)]))


def total_functions(n: int) -> list[Relation]:
    return [relation_from_function([(f >> x) & 1 for x in range(1 << n)]) for f in range(1 << (1 << n))]


def random_relation(n: int, rng: np.random.Generator, alphabet: Sequence = (0, 1, 2), p_extra: float = 0.3) -> Relation:
    """Each input gets one uniform label plus each other label with probability p_extra."""
    alphabet = tuple(alphabet)
    allowed = []
    for _ in range(1 << n):
        first = int(rng.integers(len(alphabet)))
        s = {alphabet[first]}
        for i, a in enumerate(alphabet):
            if i != first and rng.random() < p_extra:
                s.add(a)
        allowed.append(frozenset(s))
    return Relation(n, alphabet, tuple(allowed))


def _common_label(rel: Relation, points: Sequence[int]):
    acc = -1
    for y in points:
        acc &= rel.label_masks[y]
    if not acc:
        return None
    return rel.alphabet[(acc & -acc).bit_length() - 1]


def random_correct_dt(rel: Relation, rng: np.random.Generator, p_stop: float = 0.7) -> Tree:
    """A random DT computing rel: query a random fresh variable until a label is
    common to the whole subcube (then stop with probability p_stop)."""
    n = rel.n

    def build(fixed: dict):
        free = [i for i in range(n) if i not in fixed]
        pts = []
        for y in range(1 << n):
            if all(((y >> (n - 1 - i)) & 1) == b for i, b in fixed.items()):
                pts.append(y)
        lab = _common_label(rel, pts)
        if lab is not None and (not free or rng.random() < p_stop):
            return Leaf(lab)
        v = free[int(rng.integers(len(free)))]
        return DtNode(v, build({**fixed, v: 0}), build({**fixed, v: 1}))

    return build({})


def compose_dt(outer: Tree, g_dt: Tree, m: int, at_leaf: Optional[Callable] = None) -> Tree:
    """DT over the composed input: each outer query x_j runs g_dt on block j.

    Coordinates already read on the current path are not queried again.
    ``at_leaf(label, known)`` may replace an outer leaf by a further subtree.
    """

    def gadget(node, j, known, then):
        if isinstance(node, Leaf):
            return then(node.label, known)
        v = j * m + node.var
        if v in known:
            return gadget(node.child(known[v]), j, known, then)
        return DtNode(v, gadget(node.c0, j, {**known, v: 0}, then), gadget(node.c1, j, {**known, v: 1}, then))

    def walk(node, known):
        if isinstance(node, Leaf):
            return at_leaf(node.label, known) if at_leaf else node
        return gadget(g_dt, node.var, known, lambda b, kn: walk(node.child(b), kn))

    return walk(outer, {})


def _random_parity(n: int, rng: np.random.Generator) -> BitVec:
    return BitVec(n, int(rng.integers(1, 1 << n)))


def mix_parities(t: Tree, n: int, rng: np.random.Generator, p_mix: float = 0.5, dummies: int = 1, p_dummy: float = 0.2) -> Tree:
    """Equivalent PDT: every query is shifted by a random sum of earlier path
    queries (the edge labels flip accordingly), and up to ``dummies`` extra
    queries with identical subtrees are inserted."""
    budget = [dummies]

    def go(node, path):
        if budget[0] > 0 and rng.random() < p_dummy:
            budget[0] -= 1
            r = _random_parity(n, rng)
            return PdtNode(r, go(node, path + [(r, 0)]), go(node, path + [(r, 1)]))
        if isinstance(node, Leaf):
            return node
        p = BitVec.unit(n, node.var) if isinstance(node, DtNode) else node.parity
        q, off = p.bits, 0
        for r, a in path:
            if rng.random() < p_mix:
                q ^= r.bits
                off ^= a
        if q == 0:
            # the query is already determined on this path
            return go(node.child(off), path)
        qv = BitVec(n, q)
        return PdtNode(qv, go(node.child(off), path + [(qv, 0)]), go(node.child(1 ^ off), path + [(qv, 1)]))

    return go(t, [])


def random_correct_pdt(f: Relation, g: Gadget, rng: np.random.Generator, **mix) -> Tree:
    """Random PDT computing f o g: random f-DT composed with a random g-DT, then mixed."""
    outer = random_correct_dt(f, rng)
    inner = random_correct_dt(gadget_relation(g), rng, p_stop=1.0)
    t = compose_dt(outer, inner, g.m)
    return mix_parities(t, f.n * g.m, rng, **mix)


def random_pdt(n: int, depth: int, rng: np.random.Generator, labels: Sequence = (0, 1), p_leaf: float = 0.25) -> Tree:
    def build(d):
        if d == 0 or (d < depth and rng.random() < p_leaf):
            return Leaf(labels[int(rng.integers(len(labels)))])
        return PdtNode(_random_parity(n, rng), build(d - 1), build(d - 1))

    return build(depth)


def random_sdt(
    n: int,
    depth: int,
    rng: np.random.Generator,
    labels: Sequence = (0, 1),
    max_constraints: Optional[int] = None,
    p_leaf: float = 0.25,
) -> Tree:
    """Random subspace DT; each node gets 1..max_constraints constraints
    (default n - 1, or 1 when n == 1)."""
    cmax = max_constraints or max(1, n - 1)

    def build(d):
        if d == 0 or (d < depth and rng.random() < p_leaf):
            return Leaf(labels[int(rng.integers(len(labels)))])
        c = int(rng.integers(1, cmax + 1))
        cons = tuple((_random_parity(n, rng), int(rng.integers(2))) for _ in range(c))
        return SdtNode(cons, build(d - 1), build(d - 1))

    return build(depth)


def random_basis(n: int, rng: np.random.Generator) -> list[BitVec]:
    """n independent random parities."""
    basis = F2Basis(n)
    out = []
    while len(out) < n:
        v = _random_parity(n, rng)
        if basis.add(v):
            out.append(v)
    return out


def nonadaptive_source(f: Relation, g: Gadget, queries: Sequence[BitVec]) -> Tree:
    """Complete PDT asking ``queries`` (which must determine the input) on every path."""
    N = f.n * g.m
    rows = list(queries)
    if F2Basis(N, rows).rank != N:
        raise ValueError("queries must span the whole space")

    def label(ans):
        y = solve(rows, list(ans), n=N)
        x = apply_gadget(g, y, f.n)
        return min(f.allowed[x.bits], key=f.alphabet.index)

    return complete_pdt(rows, label)
