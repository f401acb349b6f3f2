"""Exact DT / PDT complexity by exhaustive search on tiny relations.

States are sets of inputs, stored as bitmasks over the 2^n input indices.
Every state reached by parity (or bit) queries is an affine subspace, and its
point set identifies it uniquely, so the point set is the memo key.
``AffineSubspace`` gives the same objects in constraint form; the unmemoized
reference searches run on it and serve as an independent cross-check.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .boolfun import Relation
from .config import Caps, caps_from_env
from .f2core import BitVec, parity_mask
from .trees import DtNode, Leaf, PdtNode, complete_pdt


class CapExceeded(ValueError):
    pass


def _check_cap(rel: Relation, cap: int, measure: str):
    if rel.n > cap:
        raise CapExceeded(f"{measure}: arity {rel.n} exceeds brute-force cap {cap}")


@dataclass
class AffineSubspace:
    """{x : dot(r, x) == a for each constraint}, constraints in reduced row-echelon form."""

    n: int
    rows: tuple[int, ...] = ()
    rhs: tuple[int, ...] = ()

    @classmethod
    def full(cls, n: int) -> "AffineSubspace":
        return cls(n)

    def _pivot(self, r: int) -> int:
        return self.n - r.bit_length()

    def reduce(self, v: int) -> tuple[int, int]:
        """Residual of v against the constraints and the rhs of the part removed."""
        acc = 0
        for r, a in zip(self.rows, self.rhs):
            if (v >> (self.n - 1 - self._pivot(r))) & 1:
                v ^= r
                acc ^= a
        return v, acc

    def is_constant(self, p: BitVec) -> bool:
        return self.reduce(p.bits)[0] == 0

    def add(self, p: BitVec, a: int) -> Optional["AffineSubspace"]:
        """Intersect with dot(p, x) == a; None if the result is empty."""
        v, acc = self.reduce(p.bits)
        a ^= acc
        if not v:
            return self if a == 0 else None
        piv = self.n - v.bit_length()
        bit = 1 << (self.n - 1 - piv)
        rows, rhs = [], []
        for r, b in zip(self.rows, self.rhs):
            if r & bit:
                r ^= v
                b ^= a
            rows.append(r)
            rhs.append(b)
        rows.append(v)
        rhs.append(a)
        order = sorted(range(len(rows)), key=lambda i: self._pivot(rows[i]))
        return AffineSubspace(self.n, tuple(rows[i] for i in order), tuple(rhs[i] for i in order))

    @property
    def dim(self) -> int:
        return self.n - len(self.rows)

    def contains(self, x: BitVec) -> bool:
        return all(((r & x.bits).bit_count() & 1) == a for r, a in zip(self.rows, self.rhs))

    def points(self) -> list[int]:
        return [y for y in range(1 << self.n) if self.contains(BitVec(self.n, y))]

    def mask(self) -> int:
        m = (1 << (1 << self.n)) - 1
        for r, a in zip(self.rows, self.rhs):
            m &= parity_mask(BitVec(self.n, r), a)
        return m

    def key(self) -> tuple:
        return (self.n, self.rows, self.rhs)


@dataclass
class SearchStats:
    nodes: int = 0
    seconds: float = 0.0


class _Search:
    """Memoized search over point sets for one relation and query alphabet."""

    def __init__(self, rel: Relation, parity: bool = True):
        self.rel = rel
        self.n = rel.n
        self.full = (1 << (1 << rel.n)) - 1
        # per label, the set of inputs on which it is allowed
        self.allow = []
        for li in range(len(rel.alphabet)):
            mask = 0
            for y, lm in enumerate(rel.label_masks):
                if (lm >> li) & 1:
                    mask |= 1 << y
            self.allow.append(mask)
        if parity:
            self.queries = [BitVec(self.n, p) for p in range(1, 1 << self.n)]
        else:
            self.queries = [BitVec.unit(self.n, i) for i in range(self.n)]
        self.qmasks = [parity_mask(q) for q in self.queries]
        self._labels: dict[int, int] = {}
        self.stats = SearchStats()

    def labels(self, S: int) -> int:
        """Bitmask of labels allowed on every point of S."""
        got = self._labels.get(S)
        if got is None:
            got = 0
            for li, a in enumerate(self.allow):
                if S & a == S:
                    got |= 1 << li
            self._labels[S] = got
        return got

    def leaf_label(self, S: int):
        lab = self.labels(S)
        return self.rel.alphabet[(lab & -lab).bit_length() - 1]

    def splits(self, S: int) -> Iterator[tuple[int, int, int]]:
        """(query index, S0, S1) for queries non-constant on S, one per distinct split."""
        seen = set()
        for qi, qm in enumerate(self.qmasks):
            S1 = S & qm
            if not S1 or S1 == S:
                continue
            S0 = S ^ S1
            key = S0 if S0 < S1 else S1
            if key in seen:
                continue
            seen.add(key)
            yield qi, S0, S1

    # depth: iterative deepening

    def _solvable(self, S: int, d: int, memo: dict) -> bool:
        if self.labels(S):
            return True
        if d == 0:
            return False
        lo, hi = memo.get(S, (0, None))
        if hi is not None and d >= hi:
            return True
        if d <= lo:
            return False
        self.stats.nodes += 1
        for qi, S0, S1 in self.splits(S):
            if self._solvable(S0, d - 1, memo) and self._solvable(S1, d - 1, memo):
                self._choice[(S, d)] = qi
                memo[S] = (lo, d)
                return True
        memo[S] = (d, hi)  # unsolvable at d, hence at every smaller depth
        return False

    def depth(self) -> int:
        self._depth_memo: dict[int, tuple] = {}
        self._choice: dict[tuple[int, int], int] = {}
        d = 0
        while not self._solvable(self.full, d, self._depth_memo):
            d += 1
        self.best_depth = d
        return d

    def depth_tree(self, S: Optional[int] = None, d: Optional[int] = None):
        if S is None:
            S, d = self.full, self.best_depth
        if self.labels(S):
            return Leaf(self.leaf_label(S))
        # find a depth at which S was certified within d
        for dd in range(d + 1):
            if (S, dd) in self._choice:
                qi = self._choice[(S, dd)]
                break
        else:
            raise RuntimeError("missing search certificate")
        q = self.queries[qi]
        S1 = S & self.qmasks[qi]
        return self._node(q, self.depth_tree(S ^ S1, dd - 1), self.depth_tree(S1, dd - 1))

    # size: min-plus with a trivial lower bound

    def size(self, S: Optional[int] = None) -> int:
        if S is None:
            self._size_memo: dict[int, tuple[int, int]] = {}
            S = self.full
        got = self._size_memo.get(S)
        if got is not None:
            return got[0]
        if self.labels(S):
            self._size_memo[S] = (1, -1)
            return 1
        self.stats.nodes += 1
        best, arg = None, -1
        for qi, S0, S1 in self.splits(S):
            s0 = self.size(S0)
            if best is not None and s0 + (1 if self.labels(S1) else 2) >= best:
                continue
            s = s0 + self.size(S1)
            if best is None or s < best:
                best, arg = s, qi
                if best == 2:
                    break
        self._size_memo[S] = (best, arg)
        return best

    def size_tree(self, S: Optional[int] = None):
        if S is None:
            S = self.full
        s, qi = self._size_memo[S]
        if qi < 0:
            return Leaf(self.leaf_label(S))
        S1 = S & self.qmasks[qi]
        return self._node(self.queries[qi], self.size_tree(S ^ S1), self.size_tree(S1))

    def _node(self, q: BitVec, c0, c1):
        return PdtNode(q, c0, c1)


class _DtSearch(_Search):
    def __init__(self, rel: Relation):
        super().__init__(rel, parity=False)

    def _node(self, q: BitVec, c0, c1):
        return DtNode(q.leading(), c0, c1)


@dataclass
class OracleResult:
    measure: str
    value: int
    relation: str
    nodes: int
    seconds: float
    witness: object = field(default=None, repr=False)

    def record(self, timing: bool = False) -> dict:
        d = {"measure": self.measure, "relation": self.relation, "value": self.value, "nodes": self.nodes}
        if timing:
            d["seconds"] = round(self.seconds, 6)
        return d


def _run(measure: str, rel: Relation, cap: int, fn) -> OracleResult:
    _check_cap(rel, cap, measure)
    t0 = time.perf_counter()
    value, nodes, witness = fn()
    return OracleResult(measure, value, rel.fingerprint(), nodes, time.perf_counter() - t0, witness)


def _caps(caps: Optional[Caps]) -> Caps:
    return caps or caps_from_env()


def dt_depth_result(rel: Relation, caps: Optional[Caps] = None) -> OracleResult:
    def go():
        s = _DtSearch(rel)
        d = s.depth()
        return d, s.stats.nodes, s.depth_tree()

    return _run("dt-depth", rel, _caps(caps).dt_depth, go)


def dt_size_result(rel: Relation, caps: Optional[Caps] = None) -> OracleResult:
    def go():
        s = _DtSearch(rel)
        v = s.size()
        return v, s.stats.nodes, s.size_tree()

    return _run("dt-size", rel, _caps(caps).dt_size, go)


def pdt_depth_result(rel: Relation, caps: Optional[Caps] = None) -> OracleResult:
    def go():
        s = _Search(rel)
        d = s.depth()
        return d, s.stats.nodes, s.depth_tree()

    return _run("pdt-depth", rel, _caps(caps).pdt_depth, go)


def pdt_size_result(rel: Relation, caps: Optional[Caps] = None) -> OracleResult:
    def go():
        s = _Search(rel)
        v = s.size()
        return v, s.stats.nodes, s.size_tree()

    return _run("pdt-size", rel, _caps(caps).pdt_size, go)


def dt_depth(rel: Relation, caps: Optional[Caps] = None) -> int:
    return dt_depth_result(rel, caps).value


def dt_size(rel: Relation, caps: Optional[Caps] = None) -> int:
    return dt_size_result(rel, caps).value


def pdt_depth(rel: Relation, caps: Optional[Caps] = None) -> int:
    return pdt_depth_result(rel, caps).value


def pdt_size(rel: Relation, caps: Optional[Caps] = None) -> int:
    return pdt_size_result(rel, caps).value


def optimal_dt(rel: Relation, measure: str = "depth", caps: Optional[Caps] = None):
    r = dt_depth_result(rel, caps) if measure == "depth" else dt_size_result(rel, caps)
    return r.witness


def optimal_pdt(rel: Relation, measure: str = "depth", caps: Optional[Caps] = None):
    r = pdt_depth_result(rel, caps) if measure == "depth" else pdt_size_result(rel, caps)
    return r.witness


# non-adaptive measures


def _fibers_ok(search: _Search, masks: Sequence[int]) -> bool:
    """Every cell cut out by the query masks has a common allowed label."""
    cells = [search.full]
    for qm in masks:
        nxt = []
        for c in cells:
            for part in (c & qm, c & ~qm):
                if part:
                    nxt.append(part)
        cells = nxt
    return all(search.labels(c) for c in cells)


def iter_subspaces(n: int, d: int) -> Iterator[tuple[int, ...]]:
    """Every d-dimensional subspace of F2^n, once, as its reduced echelon basis."""
    for pivots in itertools.combinations(range(n), d):
        free_slots = []
        for r, p in enumerate(pivots):
            slots = [c for c in range(p + 1, n) if c not in pivots]
            free_slots.append(slots)
        total = sum(len(s) for s in free_slots)
        for fill in range(1 << total):
            rows = []
            bit = 0
            for p, slots in zip(pivots, free_slots):
                v = 1 << (n - 1 - p)
                for c in slots:
                    if (fill >> bit) & 1:
                        v |= 1 << (n - 1 - c)
                    bit += 1
                rows.append(v)
            yield tuple(rows)


def nadt_result(rel: Relation, caps: Optional[Caps] = None) -> OracleResult:
    def go():
        s = _Search(rel, parity=False)
        nodes = 0
        for d in range(rel.n + 1):
            for combo in itertools.combinations(range(rel.n), d):
                nodes += 1
                if _fibers_ok(s, [s.qmasks[i] for i in combo]):
                    qs = [BitVec.unit(rel.n, i) for i in combo]
                    return d, nodes, _na_tree(s, qs)
        raise AssertionError("querying every variable always suffices")

    return _run("nadt", rel, _caps(caps).nadt, go)


def napdt_result(rel: Relation, caps: Optional[Caps] = None) -> OracleResult:
    def go():
        s = _Search(rel)
        nodes = 0
        for d in range(rel.n + 1):
            for rows in iter_subspaces(rel.n, d):
                nodes += 1
                qs = [BitVec(rel.n, r) for r in rows]
                if _fibers_ok(s, [parity_mask(q) for q in qs]):
                    return d, nodes, _na_tree(s, qs)
        raise AssertionError("the full space always suffices")

    return _run("napdt", rel, _caps(caps).napdt, go)


def _na_tree(search: _Search, qs: Sequence[BitVec]):

    def label(ans):
        S = search.full
        for q, a in zip(qs, ans):
            S &= parity_mask(q, a)
        return search.leaf_label(S) if S else search.rel.alphabet[0]

    return complete_pdt(qs, label)


def nadt_depth(rel: Relation, caps: Optional[Caps] = None) -> int:
    return nadt_result(rel, caps).value


def napdt_depth(rel: Relation, caps: Optional[Caps] = None) -> int:
    return napdt_result(rel, caps).value


MEASURES = {
    "dt-depth": dt_depth_result,
    "dt-size": dt_size_result,
    "pdt-depth": pdt_depth_result,
    "pdt-size": pdt_size_result,
    "nadt": nadt_result,
    "napdt": napdt_result,
}


# reference route: constraint-form states, no memo, no split de-duplication


def _common(rel: Relation, sub: AffineSubspace) -> bool:
    acc = -1
    for y in sub.points():
        acc &= rel.label_masks[y]
    return acc != 0


def _ref_queries(n: int, parity: bool) -> list[BitVec]:
    if parity:
        return [BitVec(n, p) for p in range(1, 1 << n)]
    return [BitVec.unit(n, i) for i in range(n)]


def reference_depth(rel: Relation, parity: bool = True, prune: bool = True) -> int:
    """Depth by plain depth-bounded recursion on constraint-form subspaces.

    With ``prune=False`` even queries constant on the current subspace are
    tried (the depth bound keeps the recursion finite).
    """
    if rel.n > 4:
        raise CapExceeded("reference search is limited to arity 4")
    qs = _ref_queries(rel.n, parity)

    def ok(sub: AffineSubspace, d: int) -> bool:
        if _common(rel, sub):
            return True
        if d == 0:
            return False
        for q in qs:
            if prune and sub.is_constant(q):
                continue
            kids = [sub.add(q, a) for a in (0, 1)]
            if all(kid is None or ok(kid, d - 1) for kid in kids):
                return True
        return False

    d = 0
    while not ok(AffineSubspace.full(rel.n), d):
        d += 1
    return d


def reference_size(rel: Relation, parity: bool = True) -> int:
    if rel.n > 4:
        raise CapExceeded("reference search is limited to arity 4")
    qs = _ref_queries(rel.n, parity)

    def best(sub: AffineSubspace) -> int:
        if _common(rel, sub):
            return 1
        out = None
        for q in qs:
            if sub.is_constant(q):
                continue
            s = best(sub.add(q, 0)) + best(sub.add(q, 1))
            out = s if out is None else min(out, s)
        return out

    return best(AffineSubspace.full(rel.n))
