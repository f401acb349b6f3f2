"""Simulating a parity decision tree for f∘g by a decision tree for f.

The simulation walks the parity tree, row-reducing each parity against the
earlier ones so that it marks at most one block. Once a block has collected
k marks the outer variable x_j is queried and the block is stifled to x_j,
leaving exactly k coordinates free. The free coordinates keep the marked
parities independent, which is what lets any consistent outer input be
realised by a completion that reaches the same leaf (``witness_completion``).
"""

from __future__ import annotations

import copy
import enum
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence, Union

from .boolfun import Gadget, apply_gadget, is_k_stifled, stifle
from .f2core import BitVec, dot, express_in_basis, parity_mask, pivot_columns, rank, solve
from .trees import DtNode, Leaf, PcNode, PdtNode, tree_arity


class Mode(str, enum.Enum):
    DEPTH = "depth"
    SIZE = "size"
    SDT_COST = "sdt-cost"
    DEFERRED = "deferred"


class InvariantError(AssertionError):
    """A simulation invariant failed; carries the offending transcript."""

    def __init__(self, msg: str, state: "SimState"):
        super().__init__(msg)
        self.state = state


@dataclass
class SimState:
    n: int
    m: int
    k: int
    M: list[BitVec] = field(default_factory=list)
    A: list[int] = field(default_factory=list)
    MARK: list[list[int]] = field(default_factory=list)
    FREE: list[list[int]] = field(default_factory=list)
    Q: list[int] = field(default_factory=list)
    y: list[Optional[int]] = field(default_factory=list)
    # bookkeeping beyond the algorithm's own variables
    x: dict[int, int] = field(default_factory=dict)
    parities: list[BitVec] = field(default_factory=list)
    path: list[int] = field(default_factory=list)
    wrong: int = 0
    triggers: list[int] = field(default_factory=list)

    @classmethod
    def initial(cls, n: int, m: int, k: int) -> "SimState":
        return cls(
            n, m, k,
            MARK=[[] for _ in range(n)],
            FREE=[list(range(j * m, (j + 1) * m)) for j in range(n)],
            y=[None] * (n * m),
        )

    @property
    def num(self) -> int:
        return len(self.M)

    @property
    def N(self) -> int:
        return self.n * self.m

    def marks(self) -> int:
        return sum(len(s) for s in self.MARK)

    def marked_block(self, i: int) -> Optional[int]:
        for j, s in enumerate(self.MARK):
            if i in s:
                return j
        return None

    def y_str(self) -> str:
        return "".join("*" if v is None else str(v) for v in self.y)

    def clone(self) -> "SimState":
        return copy.deepcopy(self)

    def to_json(self) -> dict:
        return {
            "M": [str(p) for p in self.M],
            "A": list(self.A),
            "MARK": [list(s) for s in self.MARK],
            "FREE": [list(s) for s in self.FREE],
            "Q": list(self.Q),
            "x": {str(j): b for j, b in sorted(self.x.items())},
            "y": self.y_str(),
            "path": "".join(map(str, self.path)),
        }


def val(p: BitVec, y: Sequence[Optional[int]]) -> int:
    """dot(p, y) for a partial y that is set on the support of p."""
    s = 0
    for c in p.support():
        if y[c] is None:
            raise ValueError(f"coordinate {c} is unset")
        s ^= y[c]
    return s


def row_reduce(P: BitVec, state: SimState, start: int = 0, b: int = 0):
    """Reduce P block by block; return (P', b, marked block or None).

    Scanning blocks from ``start``, whenever P' restricted to FREE[j] is a
    sum of the restricted parities marking block j, that sum is added to P'
    (and the matching answers to b). The first block where it is not marks.
    """
    Pp = P
    for j in range(start, state.n):
        free = state.FREE[j]
        rows = [state.M[i].restrict(free) for i in state.MARK[j]]
        S = express_in_basis(Pp.restrict(free), rows)
        if S is None:
            return Pp, b, j
        for s in S:
            i = state.MARK[j][s]
            Pp = Pp ^ state.M[i]
            b ^= state.A[i]
    return Pp, b, None


Reducer = Callable[..., tuple]
Chooser = Callable[[object, SimState], int]


def smaller_child(node, state: SimState) -> int:
    """Answer leading to the child with fewer leaves; ties go to 0."""
    return 0 if node.c0.size <= node.c1.size else 1


def larger_child(node, state: SimState) -> int:
    return 1 if node.c0.size <= node.c1.size else 0


def wrong_edge(node, state: SimState) -> int:
    return 1 - node.rhs


# invariant checks


def consistent_mask(M: Sequence[BitVec], A: Sequence[int], N: int) -> int:
    m = (1 << (1 << N)) - 1
    for p, a in zip(M, A):
        m &= parity_mask(p, a)
    return m


def check_structure(state: SimState):
    """Algorithm-level invariants of the transcript (raises InvariantError)."""
    n, m, k = state.n, state.m, state.k
    if len(state.M) != len(state.A):
        raise InvariantError("|M| != |A|", state)
    for j in range(n):
        unset = [c for c in range(j * m, (j + 1) * m) if state.y[c] is None]
        if sorted(state.FREE[j]) != unset:
            raise InvariantError(f"FREE[{j}] does not match unset coordinates of y", state)
        if len(state.MARK[j]) > k:
            raise InvariantError(f"block {j} marked more than k times", state)
        if j in state.x and len(state.FREE[j]) != k:
            raise InvariantError(f"queried block {j} has {len(state.FREE[j])} free coordinates", state)
    free_sets = [set(f) for f in state.FREE]
    for i, p in enumerate(state.M):
        blk = state.marked_block(i)
        upto = n if blk is None else blk
        sup = set(p.support())
        for j1 in range(upto):
            if sup & free_sets[j1]:
                raise InvariantError(f"M[{i}] touches FREE[{j1}] before its marked block", state)
    for j in range(n):
        rows = [state.M[i].restrict(state.FREE[j]) for i in state.MARK[j]]
        if rows and rank(rows, len(state.FREE[j])) != len(rows):
            raise InvariantError(f"marked restrictions of block {j} are dependent", state)


def check_claim5(P: BitVec, Pp: BitVec, b: int, state: SimState):
    """On every y answering M per A: val(P,y) == 0 iff val(P',y) == b."""
    N = state.N
    cons = consistent_mask(state.M, state.A, N)
    differ = parity_mask(P) ^ parity_mask(Pp)
    bad = cons & ~differ if b else cons & differ
    if bad:
        y = (bad & -bad).bit_length() - 1
        raise InvariantError(f"row-reduce contract fails at y={BitVec(N, y)}", state)


def check_reach(state: SimState):
    """Inputs answering M per A are exactly those reaching the current node."""
    N = state.N
    cons = consistent_mask(state.M, state.A, N)
    reach = consistent_mask(state.parities, state.path, N)
    if cons != reach:
        raise InvariantError("processed answers no longer describe the reached node", state)


# the simulation


class _Unanswered(Exception):
    def __init__(self, j: int):
        self.j = j


def _oracle(answers, n: int) -> Callable[[int], int]:
    if callable(answers):
        return answers
    if isinstance(answers, BitVec):
        if answers.n != n:
            raise ValueError(f"outer input has length {answers.n}, expected {n}")
        return lambda j: answers[j]
    if isinstance(answers, Mapping):
        return lambda j: answers[j]
    bits = list(answers)
    if len(bits) != n:
        raise ValueError(f"outer input has length {len(bits)}, expected {n}")
    return lambda j: bits[j]


def _query_block(state: SimState, j: int, g: Gadget, query):
    xj = query(j)
    m = state.m
    rows = [state.M[i].block(j, m) for i in state.MARK[j]]
    cols = pivot_columns(rows)
    pa = stifle(g, cols, xj)
    state.y[j * m:(j + 1) * m] = list(pa.vals)
    state.FREE[j] = [j * m + c for c in cols]
    state.Q.append(j)
    state.x[j] = xj


def _validate(t, g: Gadget, k: int, mode: Mode, n: Optional[int]) -> int:
    if k < 1:
        raise ValueError("the simulation needs k >= 1")
    if k > g.m or not is_k_stifled(g, k):
        raise ValueError(f"gadget {g} is not {k}-stifled")
    mode = Mode(mode)
    arity = tree_arity(t)
    if n is None:
        if arity is None:
            raise ValueError("cannot infer n from a leaf; pass n")
        n, rem = divmod(arity, g.m)
        if rem:
            raise ValueError(f"tree arity {arity} is not a multiple of m={g.m}")
    elif arity is not None and arity != n * g.m:
        raise ValueError(f"tree arity {arity} != n*m = {n * g.m}")
    node = t
    stack = [t]
    while stack:
        node = stack.pop()
        if isinstance(node, Leaf):
            continue
        if mode is Mode.SDT_COST:
            if not isinstance(node, PcNode):
                raise ValueError("sdt-cost mode needs a parity-constraint protocol")
            stack += [node.right, node.wrong]
        else:
            if not isinstance(node, PdtNode):
                raise ValueError(f"{mode.value} mode needs a parity decision tree")
            stack += [node.c0, node.c1]
    return n


def _default_chooser(mode: Mode) -> Chooser:
    return wrong_edge if mode is Mode.SDT_COST else smaller_child


def _run(t, g, k, n, mode, query, choose, reducer, check, exhaustive):
    state = SimState.initial(n, g.m, k)
    node = t
    while not isinstance(node, Leaf):
        P = node.parity
        Pp, b, j = reducer(P, state)
        if mode is Mode.DEFERRED:
            # query only when a block would take its (k+1)th mark, then reprocess
            while j is not None and len(state.MARK[j]) == k:
                if j in state.x:
                    raise InvariantError(f"reprocessed parity marks queried block {j} again", state)
                state.triggers.append(state.num)
                _query_block(state, j, g, query)
                Pp, b, j = reducer(Pp, state, start=j, b=b)
        if exhaustive:
            check_claim5(P, Pp, b, state)
        num = state.num
        state.M.append(Pp)
        if j is None:
            try:
                state.A.append(val(Pp, state.y))
            except ValueError as e:
                state.A.append(0)
                raise InvariantError(f"unmarked parity M[{num}] has an unset coordinate: {e}", state)
        else:
            state.MARK[j].append(num)
            if mode is not Mode.DEFERRED and len(state.MARK[j]) == k:
                state.triggers.append(num)
                _query_block(state, j, g, query)
            state.A.append(choose(node, state) ^ b)
        edge = state.A[num] ^ b
        state.parities.append(P)
        state.path.append(edge)
        if isinstance(node, PcNode) and edge != node.rhs:
            state.wrong += 1
        node = node.child(edge)
        if check:
            check_structure(state)
        if exhaustive:
            check_reach(state)
    return node.label, state


@dataclass
class SimResult:
    label: object
    state: SimState

    @property
    def queries(self) -> list[int]:
        return list(self.state.Q)


def simulate_path(
    t,
    g: Gadget,
    k: int,
    answers,
    mode: Union[Mode, str] = Mode.DEPTH,
    n: Optional[int] = None,
    choose: Optional[Chooser] = None,
    reducer: Reducer = row_reduce,
    check: bool = False,
    exhaustive: bool = False,
) -> SimResult:
    """Run the simulation on one outer input.

    ``answers`` supplies x_j on demand: a BitVec, a sequence or mapping of
    bits, or a callable j -> bit. ``check`` asserts the transcript invariants
    after every iteration; ``exhaustive`` also verifies the row-reduce and
    reachability contracts over all inputs (only sensible for m*n <= ~12).
    """
    mode = Mode(mode)
    n = _validate(t, g, k, mode, n)
    label, state = _run(
        t, g, k, n, mode, _oracle(answers, n), choose or _default_chooser(mode), reducer, check, exhaustive
    )
    return SimResult(label, state)


@dataclass
class LiftResult:
    dt: object
    runs: list[SimResult]
    mode: Mode

    def metrics(self, source) -> dict:
        d = {
            "mode": self.mode.value,
            "source_depth": source.depth,
            "source_size": source.size,
            "lifted_depth": self.dt.depth,
            "lifted_size": self.dt.size,
            "max_marks": max(r.state.marks() for r in self.runs),
            "max_queries": max(len(r.state.Q) for r in self.runs),
            "branches": [
                {
                    "x": {str(j): b for j, b in sorted(r.state.x.items())},
                    "label": r.label,
                    "iterations": r.state.num,
                    "marks": r.state.marks(),
                    "queries": list(r.state.Q),
                    "wrong": r.state.wrong,
                }
                for r in self.runs
            ],
        }
        if isinstance(source, PcNode):
            d["source_cost"] = source.cost
        return d


def build_lifted_dt(
    t,
    g: Gadget,
    k: int,
    mode: Union[Mode, str] = Mode.DEPTH,
    n: Optional[int] = None,
    choose: Optional[Chooser] = None,
    reducer: Reducer = row_reduce,
    check: bool = False,
    exhaustive: bool = False,
) -> LiftResult:
    """Materialise the simulation as a DT by branching on every outer query.

    Branches are explored depth-first with answer 0 first. Each branch is a
    deterministic replay of the simulation with the answers fixed so far.
    """
    mode = Mode(mode)
    n = _validate(t, g, k, mode, n)
    choose = choose or _default_chooser(mode)
    runs: list[SimResult] = []

    def ask(known):
        def q(j):
            if j not in known:
                raise _Unanswered(j)
            return known[j]

        return q

    def build(known):
        try:
            label, state = _run(t, g, k, n, mode, ask(known), choose, reducer, check, exhaustive)
        except _Unanswered as e:
            return DtNode(e.j, build({**known, e.j: 0}), build({**known, e.j: 1}))
        runs.append(SimResult(label, state))
        return Leaf(label)

    return LiftResult(build({}), runs, mode)


def witness_completion(state: SimState, g: Gadget, k: int, w: BitVec) -> BitVec:
    """A full input that reaches the transcript's leaf and has g^n(y') == w."""
    n, m = state.n, state.m
    if w.n != n:
        raise ValueError(f"w has length {w.n}, expected {n}")
    y = list(state.y)
    for j in range(n):
        if j in state.x:
            if w[j] != state.x[j]:
                raise ValueError(f"w disagrees with queried x_{j} = {state.x[j]}")
            continue
        rows = [state.M[i].block(j, m) for i in state.MARK[j]]
        if len(rows) > k:
            raise ValueError(f"unqueried block {j} has {len(rows)} > k marks")
        cols = pivot_columns(rows)
        pa = stifle(g, cols, w[j])
        y[j * m:(j + 1) * m] = list(pa.vals)
    N = state.N
    unset = [c for c in range(N) if y[c] is None]
    fixed = BitVec(N, sum(1 << (N - 1 - c) for c in range(N) if y[c] == 1))
    marked = sorted(i for s in state.MARK for i in s)
    rows = [state.M[i].restrict(unset) for i in marked]
    rhs = [state.A[i] ^ dot(state.M[i], fixed) for i in marked]
    sol = solve(rows, rhs, n=len(unset))
    if sol is None:
        raise ValueError("completion system is unsolvable (invariant violation)")
    for c, bit in zip(unset, sol):
        y[c] = bit
    out = BitVec.from_bits(y)
    for i, (p, a) in enumerate(zip(state.M, state.A)):
        if dot(p, out) != a:
            raise ValueError(f"completion misses processed parity M[{i}]")
    if apply_gadget(g, out, n) != w:
        raise ValueError("completion does not realise w")
    return out
