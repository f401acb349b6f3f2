"""Truth-table Boolean functions, gadgets, stifling, and relations.

A truth table is indexed by the input read as a binary number with x_1 as the
most significant bit, i.e. the ``bits`` field of the input's BitVec.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

from .f2core import BitVec


@dataclass(frozen=True)
class Gadget:
    m: int
    table: tuple[int, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.m < 0:
            raise ValueError("negative arity")
        if len(self.table) != 1 << self.m:
            raise ValueError(f"table length {len(self.table)} != 2^{self.m}")
        if any(b not in (0, 1) for b in self.table):
            raise ValueError("table entries must be bits")

    @classmethod
    def from_str(cls, s: str, name: str = "") -> "Gadget":
        m = len(s).bit_length() - 1
        if len(s) != 1 << m:
            raise ValueError("table length must be a power of two")
        return cls(m, tuple(int(c) for c in s), name)

    @classmethod
    def from_callable(cls, m: int, fn, name: str = "") -> "Gadget":
        return cls(m, tuple(int(fn(BitVec(m, i))) & 1 for i in range(1 << m)), name)

    @cached_property
    def as_int(self) -> int:
        # bit p of the integer is table[p]
        v = 0
        for p, b in enumerate(self.table):
            if b:
                v |= 1 << p
        return v

    def __call__(self, x: BitVec) -> int:
        return eval_gadget(self, x)

    def table_str(self) -> str:
        return "".join(map(str, self.table))

    def to_json(self) -> dict:
        return {"m": self.m, "table": self.table_str()}

    @classmethod
    def from_json(cls, d: Mapping) -> "Gadget":
        g = cls.from_str(d["table"])
        if g.m != d["m"]:
            raise ValueError("m does not match table length")
        return g

    def __str__(self) -> str:
        return self.name or f"table:{self.table_str()}"


def eval_gadget(g: Gadget, x: BitVec) -> int:
    if x.n != g.m:
        raise ValueError(f"gadget arity {g.m}, input length {x.n}")
    return g.table[x.bits]


def make_ind(m: int) -> Gadget:
    """Indexing: m address bits, then 2^m targets; address a selects target a."""
    if m < 1:
        raise ValueError("IND needs m >= 1")
    n = m + (1 << m)

    def ind(x: BitVec) -> int:
        addr = x.bits >> (1 << m)
        return x[m + addr]

    return Gadget.from_callable(n, ind, f"ind:{m}")


def make_ip(m: int) -> Gadget:
    if m < 1:
        raise ValueError("IP needs m >= 1")
    return Gadget.from_callable(
        2 * m, lambda x: ((x.bits >> m) & x.bits & ((1 << m) - 1)).bit_count() & 1, f"ip:{m}"
    )


def make_maj(n: int) -> Gadget:
    if n < 1:
        raise ValueError("MAJ needs n >= 1")
    return Gadget.from_callable(n, lambda x: int(2 * x.weight() >= n), f"maj:{n}")


def make_xor(n: int) -> Gadget:
    if n < 1:
        raise ValueError("XOR needs n >= 1")
    return Gadget.from_callable(n, lambda x: x.weight() & 1, f"xor:{n}")


def make_and(n: int) -> Gadget:
    if n < 1:
        raise ValueError("AND needs n >= 1")
    return Gadget.from_callable(n, lambda x: int(x.weight() == n), f"and:{n}")


def make_or(n: int) -> Gadget:
    if n < 1:
        raise ValueError("OR needs n >= 1")
    return Gadget.from_callable(n, lambda x: int(x.weight() > 0), f"or:{n}")


def make_const(m: int, b: int) -> Gadget:
    return Gadget(m, (b,) * (1 << m), f"const:{m}:{b}")


def random_gadget(m: int, seed: int) -> Gadget:
    """Independent uniform table entries from a seeded PCG64 stream."""
    if m < 1:
        raise ValueError("random gadget needs m >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    table = rng.integers(0, 2, size=1 << m, dtype=np.uint8)
    return Gadget(m, tuple(int(b) for b in table), f"random:{m}:{seed}")


_BUILDERS = {
    "ind": make_ind,
    "ip": make_ip,
    "maj": make_maj,
    "xor": make_xor,
    "and": make_and,
    "or": make_or,
}


def parse_gadget(spec: str) -> Gadget:
    """Parse ``name:param[:seed]`` (ind, ip, maj, xor, and, or, random, table)."""
    parts = spec.split(":")
    name = parts[0].lower()
    try:
        if name in _BUILDERS and len(parts) == 2:
            return _BUILDERS[name](int(parts[1]))
        if name == "random" and len(parts) == 3:
            return random_gadget(int(parts[1]), int(parts[2]))
        if name == "table" and len(parts) == 2:
            return Gadget.from_str(parts[1], spec)
        if name == "const" and len(parts) == 3:
            return make_const(int(parts[1]), int(parts[2]))
    except ValueError as e:
        raise ValueError(f"bad gadget spec {spec!r}: {e}") from None
    raise ValueError(f"bad gadget spec {spec!r}")


# stifling


def _coord_shift(m: int, i: int) -> int:
    # flipping coordinate i moves the table index by this much
    return 1 << (m - 1 - i)


def _forcing_mask(g: Gadget, S: Sequence[int], b: int) -> int:
    """Bitmask over table indices z (S-coordinates zero) that force g to b."""
    full = (1 << (1 << g.m)) - 1
    A = g.as_int if b else (~g.as_int & full)
    valid = full
    for i in S:
        d = _coord_shift(g.m, i)
        A &= A >> d
        # indices with coordinate i equal to zero
        zero_i = 0
        period = 2 * d
        chunk = (1 << d) - 1
        for start in range(0, 1 << g.m, period):
            zero_i |= chunk << start
        valid &= zero_i
    return A & valid


def forces(g: Gadget, S: Sequence[int], b: int) -> bool:
    return _forcing_mask(g, S, b) != 0


def is_k_stifled(g: Gadget, k: int) -> bool:
    """Every k coordinates can be made irrelevant with g forced to either bit."""
    if not 0 <= k <= g.m:
        raise ValueError(f"k={k} outside [0, {g.m}]")
    return stifling_counterexample(g, k) is None


def stifling_counterexample(g: Gadget, k: int) -> Optional[tuple[tuple[int, ...], int]]:
    """First (S, b) in lexicographic scan with no forcing assignment, else None."""
    for S in itertools.combinations(range(g.m), k):
        for b in (0, 1):
            if not forces(g, S, b):
                return S, b
    return None


def max_stifling(g: Gadget) -> int:
    best = -1
    for k in range(g.m + 1):
        if not is_k_stifled(g, k):
            break
        best = k
    return best


@dataclass(frozen=True)
class PartialAssignment:
    vals: tuple[Optional[int], ...]

    @classmethod
    def from_str(cls, s: str) -> "PartialAssignment":
        table = {"0": 0, "1": 1, "*": None}
        try:
            return cls(tuple(table[c] for c in s))
        except KeyError:
            raise ValueError(f"not a partial assignment: {s!r}") from None

    def __str__(self) -> str:
        return "".join("*" if v is None else str(v) for v in self.vals)

    def __len__(self) -> int:
        return len(self.vals)

    def free(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.vals) if v is None)

    def completions(self) -> Iterable[BitVec]:
        free = self.free()
        for fill in itertools.product((0, 1), repeat=len(free)):
            vals = list(self.vals)
            for i, b in zip(free, fill):
                vals[i] = b
            yield BitVec.from_bits(vals)

    def is_completion(self, x: BitVec) -> bool:
        return x.n == len(self.vals) and all(v is None or v == x[i] for i, v in enumerate(self.vals))


def stifle(g: Gadget, S: Iterable[int], b: int, verify: bool = False) -> PartialAssignment:
    """Lexicographically first assignment outside S forcing g to b, stars on S.

    With ``verify`` every completion is re-evaluated before returning.
    """
    S = sorted(set(S))
    if any(not 0 <= i < g.m for i in S):
        raise ValueError("coordinate out of range")
    mask = _forcing_mask(g, S, b)
    if not mask:
        raise ValueError(f"{g} cannot be forced to {b} with free coordinates {S}")
    # lowest table index = lexicographically first z (S coordinates are zero there)
    idx = (mask & -mask).bit_length() - 1
    x = BitVec(g.m, idx)
    Sset = set(S)
    pa = PartialAssignment(tuple(None if i in Sset else x[i] for i in range(g.m)))
    if verify and any(g(z) != b for z in pa.completions()):
        raise AssertionError(f"{pa} does not force {g} to {b}")
    return pa


# relations

Label = Hashable


@dataclass(frozen=True)
class Relation:
    """Arity n, output alphabet, and a nonempty allowed set per input index."""

    n: int
    alphabet: tuple
    allowed: tuple[frozenset, ...]

    def __post_init__(self):
        if len(self.allowed) != 1 << self.n:
            raise ValueError(f"need {1 << self.n} allowed sets, got {len(self.allowed)}")
        alpha = set(self.alphabet)
        if len(alpha) != len(self.alphabet):
            raise ValueError("duplicate labels in alphabet")
        for i, a in enumerate(self.allowed):
            if not a:
                raise ValueError(f"input {format(i, f'0{self.n}b')} allows no output")
            if not a <= alpha:
                raise ValueError(f"labels {set(a) - alpha} not in alphabet")

    def __call__(self, x: BitVec) -> frozenset:
        if x.n != self.n:
            raise ValueError(f"relation arity {self.n}, input length {x.n}")
        return self.allowed[x.bits]

    def is_allowed(self, x: BitVec, label) -> bool:
        return label in self(x)

    @cached_property
    def label_masks(self) -> tuple[int, ...]:
        """Allowed sets as bitmasks over alphabet positions."""
        pos = {a: i for i, a in enumerate(self.alphabet)}
        return tuple(sum(1 << pos[a] for a in s) for s in self.allowed)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "alphabet": list(self.alphabet),
            "allowed": [sorted(s, key=self.alphabet.index) for s in self.allowed],
        }

    @classmethod
    def from_json(cls, d: Mapping) -> "Relation":
        alphabet = tuple(_hashable(a) for a in d["alphabet"])
        allowed = tuple(frozenset(_hashable(a) for a in s) for s in d["allowed"])
        return cls(int(d["n"]), alphabet, allowed)

    def fingerprint(self) -> str:
        import hashlib
        import json

        blob = json.dumps(self.to_json(), sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _hashable(a):
    return tuple(a) if isinstance(a, list) else a


def relation_from_function(table: Sequence[int]) -> Relation:
    n = len(table).bit_length() - 1
    if len(table) != 1 << n:
        raise ValueError("table length must be a power of two")
    labels = set(table)
    alphabet = (0, 1) if labels <= {0, 1} else tuple(sorted(labels))
    return Relation(n, alphabet, tuple(frozenset([v]) for v in table))


def partial_relation(n: int, promise: Mapping, alphabet: Sequence = (0, 1)) -> Relation:
    """Off-promise inputs allow every label. Keys are input indices or bit strings."""
    alphabet = tuple(alphabet)
    allowed = [frozenset(alphabet)] * (1 << n)
    for key, val in promise.items():
        idx = BitVec.from_str(key).bits if isinstance(key, str) else int(key)
        allowed[idx] = frozenset([val])
    return Relation(n, alphabet, tuple(allowed))


def gadget_relation(g: Gadget) -> Relation:
    return relation_from_function(g.table)


def apply_gadget(g: Gadget, y: BitVec, n: int) -> BitVec:
    """g^n(y): g applied to each of the n consecutive m-bit blocks."""
    if y.n != g.m * n:
        raise ValueError(f"input length {y.n} != {g.m}*{n}")
    out = 0
    mask = (1 << g.m) - 1
    for j in range(n):
        out = (out << 1) | g.table[(y.bits >> (g.m * (n - 1 - j))) & mask]
    return BitVec(n, out)


def compose_relation(f: Relation, g: Gadget) -> Relation:
    N = f.n * g.m
    allowed = tuple(f.allowed[apply_gadget(g, BitVec(N, y), f.n).bits] for y in range(1 << N))
    return Relation(N, f.alphabet, allowed)
