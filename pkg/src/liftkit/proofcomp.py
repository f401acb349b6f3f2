"""CNFs, clause-search relations, gadget composition, and tree-like refutations.

Clauses use DIMACS literals: +v / -v for variable v (1-based). A tree that
computes the search relation of a CNF is turned into a tree-like refutation
whose lines are disjunctions of affine equations over the inputs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .boolfun import Gadget, Relation, apply_gadget
from .config import caps_from_env
from .f2core import BitVec, parity_mask, unit_masks
from .trees import DtNode, Leaf, PdtNode, Tree, first_error


def _full(n: int) -> int:
    return (1 << (1 << n)) - 1


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: tuple[tuple[int, ...], ...]
    parents: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for i, c in enumerate(self.clauses):
            vs = [abs(l) for l in c]
            if 0 in vs or any(v > self.num_vars for v in vs):
                raise ValueError(f"clause {i} has a variable out of range: {c}")
            if len(set(c)) != len(c):
                raise ValueError(f"clause {i} repeats a literal: {c}")
            if len(set(vs)) != len(vs):
                raise ValueError(f"clause {i} contains a variable and its negation: {c}")
        if self.parents is not None:
            object.__setattr__(self, "parents", tuple(self.parents))
            if len(self.parents) != len(self.clauses):
                raise ValueError("one parent per clause required")

    def __len__(self) -> int:
        return len(self.clauses)

    @property
    def width(self) -> int:
        return max((len(c) for c in self.clauses), default=0)

    def variables(self, i: int) -> list[int]:
        """0-based variable indices of clause i, increasing."""
        return sorted(abs(l) - 1 for l in self.clauses[i])

    def falsified(self, i: int, x: BitVec) -> bool:
        return all(x[abs(l) - 1] == (1 if l < 0 else 0) for l in self.clauses[i])

    def falsified_by(self, x: BitVec) -> list[int]:
        return [i for i in range(len(self.clauses)) if self.falsified(i, x)]

    def falsifying_mask(self, i: int) -> int:
        """Set of assignments (as input indices) falsifying clause i."""
        units = unit_masks(self.num_vars)
        m = _full(self.num_vars)
        for l in self.clauses[i]:
            u = units[abs(l) - 1]
            m &= u if l < 0 else ~u
        return m & _full(self.num_vars)

    def satisfiable(self, cap: Optional[int] = None) -> bool:
        _cap(self.num_vars, cap)
        bad = 0
        for i in range(len(self.clauses)):
            bad |= self.falsifying_mask(i)
        return bad != _full(self.num_vars)


def _cap(n: int, cap: Optional[int]):
    cap = caps_from_env().cnf if cap is None else cap
    if n > cap:
        raise ValueError(f"{n} variables exceed the brute-force cap {cap}")


def search_relation(c: Cnf, cap: Optional[int] = None) -> Relation:
    """x -> clauses falsified by x; labels are clause indices."""
    _cap(c.num_vars, cap)
    masks = [c.falsifying_mask(i) for i in range(len(c))]
    allowed = []
    for x in range(1 << c.num_vars):
        s = frozenset(i for i, m in enumerate(masks) if (m >> x) & 1)
        if not s:
            raise ValueError(f"CNF is satisfied by {format(x, f'0{c.num_vars}b')}")
        allowed.append(s)
    return Relation(c.num_vars, tuple(range(len(c))), tuple(allowed))


def compose_cnf(c: Cnf, g: Gadget) -> Cnf:
    """C o g: per clause, one blocking clause for every assignment to the clause's
    blocks whose gadget outputs falsify it, in increasing assignment order."""
    m = g.m
    pre = {b: [format(z, f"0{m}b") for z in range(1 << m) if g.table[z] == b] for b in (0, 1)}
    clauses, parents = [], []
    for ci, cl in enumerate(c.clauses):
        blocks = c.variables(ci)
        coords = [j * m + i for j in blocks for i in range(m)]
        need = {abs(l) - 1: (1 if l < 0 else 0) for l in cl}
        # product of sorted per-block lists is increasing in the concatenation
        for chunks in itertools.product(*(pre[need[j]] for j in blocks)):
            bits = "".join(chunks)
            clauses.append(tuple(-(v + 1) if b == "1" else v + 1 for v, b in zip(coords, bits)))
            parents.append(ci)
    return Cnf(c.num_vars * m, tuple(clauses), tuple(parents))


def composed_stats(c: Cnf, g: Gadget, composed: Cnf) -> dict:
    w = c.width
    return {
        "vars": composed.num_vars,
        "clauses": len(composed),
        "width": composed.width,
        "width_bound": g.m * w,
        "count_bound": len(c) * (1 << (g.m * w)),
    }


def reduction_check(c: Cnf, g: Gadget, y: BitVec, composed: Optional[Cnf] = None) -> bool:
    """Every composed clause falsified by y has a parent falsified by g^n(y)."""
    composed = composed or compose_cnf(c, g)
    x = apply_gadget(g, y, c.num_vars)
    return all(c.falsified(composed.parents[d], x) for d in composed.falsified_by(y))


# refutations


@dataclass(frozen=True)
class LinearClause:
    """Disjunction of affine equations dot(p, y) == a; empty means false."""

    n: int
    disjuncts: tuple[tuple[BitVec, int], ...] = ()

    def __post_init__(self):
        seen, out = set(), []
        for p, a in self.disjuncts:
            if p.n != self.n:
                raise ValueError("disjunct length mismatch")
            if (p.bits, a) not in seen:
                seen.add((p.bits, a))
                out.append((p, a))
        object.__setattr__(self, "disjuncts", tuple(out))

    @classmethod
    def from_clause(cls, clause: Sequence[int], n: int) -> "LinearClause":
        return cls(n, tuple((BitVec.unit(n, abs(l) - 1), 1 if l > 0 else 0) for l in clause))

    def satisfied(self, y: BitVec) -> bool:
        return any(((p.bits & y.bits).bit_count() & 1) == a for p, a in self.disjuncts)

    def falsifying_mask(self) -> int:
        m = _full(self.n)
        for p, a in self.disjuncts:
            m &= parity_mask(p, 1 - a)
        return m

    def is_empty(self) -> bool:
        return not self.disjuncts

    def to_json(self) -> list:
        return [[str(p), a] for p, a in self.disjuncts]

    @classmethod
    def from_json(cls, d: list, n: int) -> "LinearClause":
        return cls(n, tuple((BitVec.from_str(p), int(a)) for p, a in d))

    def __str__(self) -> str:
        if not self.disjuncts:
            return "FALSE"
        return " | ".join(f"<{p},y>={a}" for p, a in self.disjuncts)


@dataclass(frozen=True)
class RefutationTree:
    line: LinearClause
    c0: Optional["RefutationTree"] = None
    c1: Optional["RefutationTree"] = None
    cites: Optional[int] = None

    @property
    def is_leaf(self) -> bool:
        return self.c0 is None

    @property
    def size(self) -> int:
        return 1 if self.is_leaf else self.c0.size + self.c1.size

    def nodes(self):
        yield self
        if not self.is_leaf:
            yield from self.c0.nodes()
            yield from self.c1.nodes()

    def to_json(self) -> dict:
        if self.is_leaf:
            return {"line": self.line.to_json(), "cites": self.cites}
        return {"line": self.line.to_json(), "c0": self.c0.to_json(), "c1": self.c1.to_json()}

    @classmethod
    def from_json(cls, d: dict, n: int) -> "RefutationTree":
        line = LinearClause.from_json(d["line"], n)
        if "cites" in d:
            return cls(line, cites=int(d["cites"]))
        return cls(line, cls.from_json(d["c0"], n), cls.from_json(d["c1"], n))


def _refute(t: Tree, n: int, path: tuple) -> RefutationTree:
    line = LinearClause(n, tuple((p, 1 - a) for p, a in path))
    if isinstance(t, Leaf):
        return RefutationTree(line, cites=t.label)
    p = BitVec.unit(n, t.var) if isinstance(t, DtNode) else t.parity
    return RefutationTree(line, _refute(t.c0, n, path + ((p, 0),)), _refute(t.c1, n, path + ((p, 1),)))


def refutation_from_tree(t: Tree, c: Cnf, cap: Optional[int] = None) -> RefutationTree:
    """Each node's line is falsified by exactly the inputs that reach it."""
    if not isinstance(t, (Leaf, DtNode, PdtNode)):
        raise TypeError("expected a DT or PDT")
    rel = search_relation(c, cap)
    bad = first_error(t, rel, cap)
    if bad is not None:
        raise ValueError(f"tree does not compute the search relation (fails at {bad})")
    return _refute(t, c.num_vars, ())


def refutation_from_dt(t: Tree, c: Cnf, cap: Optional[int] = None) -> RefutationTree:
    return refutation_from_tree(t, c, cap)


def refutation_from_pdt(t: Tree, c: Cnf, cap: Optional[int] = None) -> RefutationTree:
    return refutation_from_tree(t, c, cap)


def check_refutation(r: RefutationTree, c: Cnf, cap: Optional[int] = None) -> bool:
    """Semantic check: empty root; each line is falsified only where a child's
    line is; each leaf line is falsified only where its cited clause is."""
    return refutation_error(r, c, cap) is None


def refutation_error(r: RefutationTree, c: Cnf, cap: Optional[int] = None) -> Optional[str]:
    _cap(c.num_vars, cap)
    if not r.line.is_empty():
        return "root line is not empty"
    clause_masks = [c.falsifying_mask(i) for i in range(len(c))]
    for node in r.nodes():
        if node.line.n != c.num_vars:
            return "line length does not match the CNF"
        F = node.line.falsifying_mask()
        if node.is_leaf:
            if not isinstance(node.cites, int) or not 0 <= node.cites < len(c):
                return f"leaf cites a missing clause {node.cites!r}"
            if F & ~clause_masks[node.cites]:
                return f"leaf line [{node.line}] is not implied by clause {node.cites}"
        else:
            if F & ~(node.c0.line.falsifying_mask() | node.c1.line.falsifying_mask()):
                return f"line [{node.line}] does not follow from its children"
    return None


# standard unsatisfiable families


def tseitin(num_vertices: int, edges: Sequence[tuple[int, int]], charges: Sequence[int]) -> Cnf:
    """Edge variables (1-based in edge order); vertex v asserts the XOR of its
    incident edges equals charges[v]."""
    if len(charges) != num_vertices:
        raise ValueError("one charge per vertex")
    clauses = []
    for v in range(num_vertices):
        inc = [e + 1 for e, (a, b) in enumerate(edges) if v in (a, b)]
        for bits in itertools.product((0, 1), repeat=len(inc)):
            if sum(bits) % 2 != charges[v] % 2:
                clauses.append(tuple(-e if b else e for e, b in zip(inc, bits)))
    return Cnf(len(edges), tuple(clauses))


def _default_charges(n: int) -> list[int]:
    return [1] + [0] * (n - 1)


def tseitin_path(n: int, charges: Optional[Sequence[int]] = None) -> Cnf:
    return tseitin(n, [(i, i + 1) for i in range(n - 1)], charges or _default_charges(n))


def tseitin_cycle(n: int, charges: Optional[Sequence[int]] = None) -> Cnf:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return tseitin(n, [(i, (i + 1) % n) for i in range(n)], charges or _default_charges(n))


def tseitin_triangle(charges: Optional[Sequence[int]] = None) -> Cnf:
    return tseitin_cycle(3, charges)


def contradiction() -> Cnf:
    """(x1) and (not x1)."""
    return Cnf(1, ((1,), (-1,)))


# DIMACS


def to_dimacs(c: Cnf, comments: Iterable[str] = ()) -> str:
    lines = [f"c {s}" for s in comments]
    lines.append(f"p cnf {c.num_vars} {len(c)}")
    lines += [" ".join(map(str, cl + (0,))) for cl in c.clauses]
    return "\n".join(lines) + "\n"


def from_dimacs(text: str) -> Cnf:
    header = None
    lits: list[int] = []
    clauses = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"bad header {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise ValueError("clause before the 'p cnf' header")
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(tuple(lits))
                lits = []
            else:
                lits.append(v)
    if header is None:
        raise ValueError("missing 'p cnf' header")
    if lits:
        clauses.append(tuple(lits))
    if len(clauses) != header[1]:
        raise ValueError(f"header promises {header[1]} clauses, found {len(clauses)}")
    return Cnf(header[0], tuple(clauses))


# lifting a DT for S_C to a DT for the composed search relation


def composed_search_dt(dt: Tree, c: Cnf, g: Gadget, composed: Cnf, g_dt: Tree) -> Tree:
    """Simulate ``dt`` by evaluating each queried block with ``g_dt``; at a leaf
    naming clause C, read the rest of C's blocks and name the composed clause
    that blocks the observed assignment."""
    from .corpus import compose_dt

    m = g.m
    index = {}
    for d, (cl, p) in enumerate(zip(composed.clauses, composed.parents)):
        index.setdefault((p, frozenset(cl)), d)

    def finish(ci, known):
        coords = [j * m + i for j in c.variables(ci) for i in range(m)]

        def read(kn):
            for v in coords:
                if v not in kn:
                    return DtNode(v, read({**kn, v: 0}), read({**kn, v: 1}))
            return Leaf(index[(ci, frozenset(-(v + 1) if kn[v] else v + 1 for v in coords))])

        return read(known)

    return compose_dt(dt, g_dt, m, at_leaf=finish)


def relabel(t: Tree, mapping) -> Tree:
    if isinstance(t, Leaf):
        return Leaf(mapping(t.label))
    if isinstance(t, DtNode):
        return DtNode(t.var, relabel(t.c0, mapping), relabel(t.c1, mapping))
    return PdtNode(t.parity, relabel(t.c0, mapping), relabel(t.c1, mapping))
