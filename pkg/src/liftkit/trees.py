"""Decision trees, parity decision trees, subspace decision trees, and
parity-constraint protocols: evaluation, measures, conversions, JSON I/O.

All node types are immutable; ``size`` (leaf count), ``depth`` and ``cost``
are computed once at construction, so shared subtrees are cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence, Union

from .boolfun import Relation
from .f2core import BitVec, F2Basis, dot


def _measure(obj, kids):
    object.__setattr__(obj, "size", sum(k.size for k in kids))
    object.__setattr__(obj, "depth", 1 + max(k.depth for k in kids))


@dataclass(frozen=True)
class Leaf:
    label: object
    size: int = field(default=1, init=False, compare=False, repr=False)
    depth: int = field(default=0, init=False, compare=False, repr=False)
    cost: int = field(default=0, init=False, compare=False, repr=False)


@dataclass(frozen=True)
class DtNode:
    var: int
    c0: "Dt"
    c1: "Dt"
    size: int = field(default=0, init=False, compare=False, repr=False)
    depth: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        _measure(self, (self.c0, self.c1))

    def child(self, a: int) -> "Dt":
        return self.c1 if a else self.c0


@dataclass(frozen=True)
class PdtNode:
    parity: BitVec
    c0: "Pdt"
    c1: "Pdt"
    size: int = field(default=0, init=False, compare=False, repr=False)
    depth: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        _measure(self, (self.c0, self.c1))

    def child(self, a: int) -> "Pdt":
        return self.c1 if a else self.c0


@dataclass(frozen=True)
class SdtNode:
    """Tests membership in {x : dot(v_i, x) == a_i for all i}."""

    constraints: tuple[tuple[BitVec, int], ...]
    cin: "Sdt"
    cout: "Sdt"
    size: int = field(default=0, init=False, compare=False, repr=False)
    depth: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        if not self.constraints:
            raise ValueError("subspace node needs at least one constraint")
        n = self.constraints[0][0].n
        if any(v.n != n for v, _ in self.constraints):
            raise ValueError("inconsistent constraint lengths")
        _measure(self, (self.cin, self.cout))

    def holds(self, x: BitVec) -> bool:
        return all(dot(v, x) == a for v, a in self.constraints)


@dataclass(frozen=True)
class PcNode:
    """Parity-constraint query: 'right' iff dot(parity, x) == rhs."""

    parity: BitVec
    rhs: int
    right: "PcProtocol"
    wrong: "PcProtocol"
    size: int = field(default=0, init=False, compare=False, repr=False)
    depth: int = field(default=0, init=False, compare=False, repr=False)
    cost: int = field(default=0, init=False, compare=False, repr=False)

    def __post_init__(self):
        _measure(self, (self.right, self.wrong))
        object.__setattr__(self, "cost", max(self.right.cost, 1 + self.wrong.cost))

    def child(self, a: int) -> "PcProtocol":
        return self.right if a == self.rhs else self.wrong


Dt = Union[Leaf, DtNode]
Pdt = Union[Leaf, PdtNode]
Sdt = Union[Leaf, SdtNode]
PcProtocol = Union[Leaf, PcNode]
Tree = Union[Leaf, DtNode, PdtNode, SdtNode, PcNode]


def depth(t: Tree) -> int:
    return t.depth


def size(t: Tree) -> int:
    return t.size


def cost(t: PcProtocol) -> int:
    """Worst-case number of 'Wrong' answers on a root-leaf path."""
    return t.cost


def step(t: Tree, x: BitVec) -> Tree:
    """The child of internal node ``t`` followed on input x."""
    if isinstance(t, DtNode):
        return t.child(x[t.var])
    if isinstance(t, PdtNode):
        return t.child(dot(t.parity, x))
    if isinstance(t, SdtNode):
        return t.cin if t.holds(x) else t.cout
    if isinstance(t, PcNode):
        return t.child(dot(t.parity, x))
    raise TypeError(f"not an internal node: {t!r}")


def path(t: Tree, x: BitVec) -> Iterator[Tree]:
    """Nodes visited on input x, root first, leaf last."""
    while not isinstance(t, Leaf):
        yield t
        t = step(t, x)
    yield t


def answers(t: Union[Pdt, PcProtocol, Dt], x: BitVec) -> list[int]:
    """Edge bits taken on input x (query values, not Right/Wrong)."""
    out = []
    while not isinstance(t, Leaf):
        a = x[t.var] if isinstance(t, DtNode) else dot(t.parity, x)
        out.append(a)
        t = t.child(a)
    return out


def evaluate(t: Tree, x: BitVec):
    arity = tree_arity(t)
    if arity is not None and arity != x.n:
        raise ValueError(f"tree arity {arity}, input length {x.n}")
    while not isinstance(t, Leaf):
        t = step(t, x)
    return t.label


def tree_arity(t: Tree) -> Optional[int]:
    """Arity recorded in the first parity/constraint found, None for DTs and leaves."""
    while not isinstance(t, Leaf):
        if isinstance(t, (PdtNode, PcNode)):
            return t.parity.n
        if isinstance(t, SdtNode):
            return t.constraints[0][0].n
        t = t.c0
    return None


def max_var(t: Tree) -> int:
    if isinstance(t, DtNode):
        return max(t.var, max_var(t.c0), max_var(t.c1))
    return -1


def eval_cap() -> int:
    from .config import caps_from_env

    return caps_from_env().evaluate


def computes(t: Tree, rel: Relation, cap: Optional[int] = None) -> bool:
    """Exhaustively check that t outputs an allowed label on every input."""
    return first_error(t, rel, cap) is None


def first_error(t: Tree, rel: Relation, cap: Optional[int] = None) -> Optional[BitVec]:
    cap = eval_cap() if cap is None else cap
    if rel.n > cap:
        raise ValueError(f"arity {rel.n} exceeds brute-force cap {cap}")
    arity = tree_arity(t)
    if arity is not None and arity != rel.n:
        raise ValueError(f"tree arity {arity} != relation arity {rel.n}")
    if isinstance(t, (DtNode,)) and max_var(t) >= rel.n:
        raise ValueError("DT queries a variable beyond the relation arity")
    for i in range(1 << rel.n):
        x = BitVec(rel.n, i)
        if evaluate(t, x) not in rel.allowed[i]:
            return x
    return None


def equivalent(a: Tree, b: Tree, n: int) -> bool:
    return all(evaluate(a, BitVec(n, i)) == evaluate(b, BitVec(n, i)) for i in range(1 << n))


# conversions


def pdt_from_dt(t: Dt, n: int) -> Pdt:
    if isinstance(t, Leaf):
        return t
    return PdtNode(BitVec.unit(n, t.var), pdt_from_dt(t.c0, n), pdt_from_dt(t.c1, n))


def pdt_from_sdt(t: Sdt) -> Pdt:
    """Query a node's parities in order; the first violated one exits to ``cout``.

    Constraints implied by earlier ones in the same node are not queried:
    their value is already fixed once the earlier ones held.
    """
    if isinstance(t, Leaf):
        return t
    cin = pdt_from_sdt(t.cin)
    cout = pdt_from_sdt(t.cout)
    n = t.constraints[0][0].n
    basis = F2Basis(n)
    kept: list[tuple[BitVec, int]] = []
    rhs_of: list[int] = []
    for v, a in t.constraints:
        combo = basis.express(v)
        if combo is None:
            basis.add(v)
            rhs_of.append(a)
            kept.append((v, a))
            continue
        if sum(rhs_of[i] for i in combo) & 1 != a:
            # empty subspace: the node always exits
            return cout
    node = cin
    for v, a in reversed(kept):
        node = PdtNode(v, node, cout) if a == 0 else PdtNode(v, cout, node)
    return node


def _walk(t: Pdt) -> Iterator[tuple[Pdt, tuple[int, ...], tuple[tuple[BitVec, int], ...]]]:
    """Preorder over (node, edge bits from root, constraints from root)."""
    stack = [(t, (), ())]
    while stack:
        node, bits, cons = stack.pop()
        yield node, bits, cons
        if isinstance(node, PdtNode):
            stack.append((node.c1, bits + (1,), cons + ((node.parity, 1),)))
            stack.append((node.c0, bits + (0,), cons + ((node.parity, 0),)))


def _remove(t: Pdt, bits: Sequence[int]) -> Pdt:
    """t with the (non-root) node at edge path ``bits`` contracted away."""
    if len(bits) == 1:
        return t.c0 if bits[0] else t.c1
    if bits[0]:
        return PdtNode(t.parity, t.c0, _remove(t.c1, bits[1:]))
    return PdtNode(t.parity, _remove(t.c0, bits[1:]), t.c1)


def balanced_node(t: Pdt) -> tuple[Pdt, tuple[int, ...], tuple[tuple[BitVec, int], ...]]:
    """First node in preorder whose leaf count is within [s/3, 2s/3]."""
    s = t.size
    for node, bits, cons in _walk(t):
        if s <= 3 * node.size <= 2 * s:
            return node, bits, cons
    raise ValueError("no balanced node (tree is a single leaf?)")


def sdt_from_pdt(t: Pdt) -> Sdt:
    """Repeatedly ask whether the input reaches a balanced node."""
    if isinstance(t, Leaf):
        return t
    v, bits, cons = balanced_node(t)
    # cons is nonempty: the root holds all s > 2s/3 leaves
    return SdtNode(cons, sdt_from_pdt(v), sdt_from_pdt(_remove(t, bits)))


def pc_from_sdt(t: Sdt) -> PcProtocol:
    if isinstance(t, Leaf):
        return t
    node = pc_from_sdt(t.cin)
    out = pc_from_sdt(t.cout)
    for v, a in reversed(t.constraints):
        node = PcNode(v, a, node, out)
    return node


# alias with the descriptive name
parity_constraint_protocol_from_sdt = pc_from_sdt


def query_of(t: Tree):
    if isinstance(t, DtNode):
        return ("var", t.var)
    if isinstance(t, PdtNode):
        return ("parity", t.parity)
    raise TypeError(f"unsupported node for non-adaptivity: {t!r}")


def is_nonadaptive(t: Union[Dt, Pdt]) -> bool:
    """Same query at every node of a level, and all leaves at the same depth."""
    level = [t]
    while level:
        if all(isinstance(x, Leaf) for x in level):
            return True
        if any(isinstance(x, Leaf) for x in level):
            return False
        q = query_of(level[0])
        if any(query_of(x) != q for x in level[1:]):
            return False
        level = [c for x in level for c in (x.c0, x.c1)]
    return True


def levels(t: Union[Dt, Pdt]) -> list:
    """Query sequence of a non-adaptive tree (raises if adaptive)."""
    if not is_nonadaptive(t):
        raise ValueError("tree is adaptive")
    out = []
    while not isinstance(t, Leaf):
        out.append(query_of(t))
        t = t.c0
    return out


def complete_pdt(queries: Sequence[BitVec], label_of) -> Pdt:
    """Level-uniform tree querying ``queries`` in order; ``label_of(answers)`` labels leaves."""

    def build(i, ans):
        if i == len(queries):
            return Leaf(label_of(tuple(ans)))
        return PdtNode(queries[i], build(i + 1, ans + [0]), build(i + 1, ans + [1]))

    return build(0, [])


# JSON


def _label_in(v):
    return tuple(v) if isinstance(v, list) else v


def tree_to_json(t: Tree) -> dict:
    if isinstance(t, Leaf):
        return {"leaf": t.label}
    if isinstance(t, DtNode):
        return {"var": t.var, "c0": tree_to_json(t.c0), "c1": tree_to_json(t.c1)}
    if isinstance(t, PdtNode):
        return {"parity": str(t.parity), "c0": tree_to_json(t.c0), "c1": tree_to_json(t.c1)}
    if isinstance(t, SdtNode):
        return {
            "constraints": [[str(v), a] for v, a in t.constraints],
            "in": tree_to_json(t.cin),
            "out": tree_to_json(t.cout),
        }
    if isinstance(t, PcNode):
        return {
            "constraint": [str(t.parity), t.rhs],
            "right": tree_to_json(t.right),
            "wrong": tree_to_json(t.wrong),
        }
    raise TypeError(f"not a tree: {t!r}")


def tree_from_json(d: dict) -> Tree:
    if "leaf" in d:
        return Leaf(_label_in(d["leaf"]))
    if "var" in d:
        return DtNode(int(d["var"]), tree_from_json(d["c0"]), tree_from_json(d["c1"]))
    if "parity" in d:
        return PdtNode(BitVec.from_str(d["parity"]), tree_from_json(d["c0"]), tree_from_json(d["c1"]))
    if "constraints" in d:
        cons = tuple((BitVec.from_str(v), int(a)) for v, a in d["constraints"])
        return SdtNode(cons, tree_from_json(d["in"]), tree_from_json(d["out"]))
    if "constraint" in d:
        v, a = d["constraint"]
        return PcNode(BitVec.from_str(v), int(a), tree_from_json(d["right"]), tree_from_json(d["wrong"]))
    raise ValueError(f"unrecognised tree node keys: {sorted(d)}")


_KINDS = {DtNode: "dt", PdtNode: "pdt", SdtNode: "sdt", PcNode: "pc"}


def tree_kind(t: Tree) -> str:
    if isinstance(t, Leaf):
        return "leaf"
    return _KINDS[type(t)]


def tree_document(t: Tree, arity: int, alphabet: Sequence, kind: Optional[str] = None) -> dict:
    kind = kind or tree_kind(t)
    return {"kind": kind, "arity": arity, "alphabet": list(alphabet), "tree": tree_to_json(t)}


def load_tree_document(d: dict) -> tuple[Tree, int, tuple, str]:
    t = tree_from_json(d["tree"])
    return t, int(d["arity"]), tuple(_label_in(a) for a in d.get("alphabet", [])), d.get("kind", tree_kind(t))


def check_size_bound(t: Sdt, arity: int) -> bool:
    """size(pdt_from_sdt(t)) <= arity ** depth(t)."""
    return pdt_from_sdt(t).size <= arity ** t.depth


def log2_depth_bound(size: int) -> float:
    return 2 * math.log2(size) if size > 1 else 0.0
