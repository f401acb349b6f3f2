"""Exact linear algebra over F2 on fixed-length bit vectors.

Vectors are stored as Python ints. Coordinate 0 is the most significant bit,
so ``int(str(v), 2) == v.bits`` and a vector of length m doubles as the
index of a truth-table row.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


@dataclass(frozen=True, slots=True)
class BitVec:
    n: int
    bits: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative length")
        if self.bits < 0 or self.bits >> self.n:
            raise ValueError(f"bits {self.bits} do not fit in length {self.n}")

    @classmethod
    def from_str(cls, s: str) -> "BitVec":
        if s and set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(len(s), int(s, 2) if s else 0)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitVec":
        v = 0
        n = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"not a bit: {b!r}")
            v = (v << 1) | b
            n += 1
        return cls(n, v)

    @classmethod
    def zeros(cls, n: int) -> "BitVec":
        return cls(n, 0)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVec":
        if not 0 <= i < n:
            raise IndexError(i)
        return cls(n, 1 << (n - 1 - i))

    @classmethod
    def from_support(cls, n: int, coords: Iterable[int]) -> "BitVec":
        v = 0
        for i in coords:
            v |= 1 << (n - 1 - i)
        return cls(n, v)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.n}b") if self.n else ""

    def __len__(self) -> int:
        return self.n

    def __getitem__(self, i: int) -> int:
        if not 0 <= i < self.n:
            raise IndexError(i)
        return (self.bits >> (self.n - 1 - i)) & 1

    def __iter__(self):
        for i in range(self.n):
            yield (self.bits >> (self.n - 1 - i)) & 1

    def __xor__(self, other: "BitVec") -> "BitVec":
        return xor(self, other)

    def __bool__(self) -> bool:
        return self.bits != 0

    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> list[int]:
        return [i for i in range(self.n) if (self.bits >> (self.n - 1 - i)) & 1]

    def restrict(self, coords: Sequence[int]) -> "BitVec":
        """Sub-vector on ``coords``, in the given order."""
        v = 0
        for i in coords:
            v = (v << 1) | ((self.bits >> (self.n - 1 - i)) & 1)
        return BitVec(len(coords), v)

    def block(self, j: int, m: int) -> "BitVec":
        shift = self.n - (j + 1) * m
        if shift < 0 or j < 0:
            raise IndexError(j)
        return BitVec(m, (self.bits >> shift) & ((1 << m) - 1))

    def leading(self) -> int:
        """Index of the first nonzero coordinate (-1 for the zero vector)."""
        return self.n - self.bits.bit_length() if self.bits else -1


def _check_len(a: BitVec, b: BitVec):
    if a.n != b.n:
        raise ValueError(f"length mismatch: {a.n} != {b.n}")


def xor(a: BitVec, b: BitVec) -> BitVec:
    _check_len(a, b)
    return BitVec(a.n, a.bits ^ b.bits)


def dot(a: BitVec, b: BitVec) -> int:
    _check_len(a, b)
    return (a.bits & b.bits).bit_count() & 1


def concat(parts: Sequence[BitVec]) -> BitVec:
    v = 0
    n = 0
    for p in parts:
        v = (v << p.n) | p.bits
        n += p.n
    return BitVec(n, v)


class F2Basis:
    """Row-echelon basis with per-row combination tracking.

    Every stored row has a distinct leading coordinate and rows are kept
    sorted by it. ``combos[r]`` records which input rows (by insertion index)
    sum to stored row ``r``.
    """

    def __init__(self, n: int, rows: Iterable[BitVec] = ()):
        self.n = n
        self.rows: list[int] = []
        self.pivots: list[int] = []
        self.combos: list[int] = []
        self._count = 0
        for r in rows:
            self.add(r)

    def __len__(self) -> int:
        return len(self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        for row, piv, c in zip(self.rows, self.pivots, self.combos):
            if (v >> (self.n - 1 - piv)) & 1:
                v ^= row
                combo ^= c
        return v, combo

    def add(self, v: BitVec) -> bool:
        """Insert ``v``; return False (and store nothing) if it is dependent."""
        if v.n != self.n:
            raise ValueError(f"length mismatch: {v.n} != {self.n}")
        idx = self._count
        self._count += 1
        r, combo = self._reduce(v.bits)
        if not r:
            return False
        piv = self.n - r.bit_length()
        pos = 0
        while pos < len(self.pivots) and self.pivots[pos] < piv:
            pos += 1
        self.rows.insert(pos, r)
        self.pivots.insert(pos, piv)
        self.combos.insert(pos, combo ^ (1 << idx))
        return True

    def contains(self, v: BitVec) -> bool:
        if v.n != self.n:
            raise ValueError(f"length mismatch: {v.n} != {self.n}")
        return self._reduce(v.bits)[0] == 0

    def express(self, v: BitVec) -> Optional[frozenset[int]]:
        if v.n != self.n:
            raise ValueError(f"length mismatch: {v.n} != {self.n}")
        r, combo = self._reduce(v.bits)
        if r:
            return None
        return frozenset(i for i in range(self._count) if (combo >> i) & 1)


def rank(rows: Sequence[BitVec], n: Optional[int] = None) -> int:
    if n is None:
        n = rows[0].n if rows else 0
    return F2Basis(n, rows).rank


def in_span(target: BitVec, basis) -> bool:
    """True iff ``target`` is a sum of rows of ``basis`` (an F2Basis or a sequence)."""
    if not isinstance(basis, F2Basis):
        basis = F2Basis(target.n, basis)
    return basis.contains(target)


def express_in_basis(target: BitVec, rows: Sequence[BitVec]) -> Optional[frozenset[int]]:
    """Indices S with ``sum(rows[S]) == target``, or None if there is none.

    Rows are eliminated in order; rows dependent on earlier ones are never
    used, which makes S canonical.
    """
    return F2Basis(target.n, rows).express(target)


def pivot_columns(rows: Sequence[BitVec]) -> tuple[int, ...]:
    """Leftmost coordinate set on which the (independent) rows stay independent."""
    if not rows:
        return ()
    basis = F2Basis(rows[0].n)
    for r in rows:
        if not basis.add(r):
            raise ValueError("rows are linearly dependent")
    return tuple(sorted(basis.pivots))


def solve(rows: Sequence[BitVec], rhs: Sequence[int], n: Optional[int] = None) -> Optional[BitVec]:
    """A solution v of ``dot(rows[i], v) == rhs[i]``, free variables set to 0."""
    if len(rows) != len(rhs):
        raise ValueError("one rhs bit per row required")
    if n is None:
        if not rows:
            raise ValueError("cannot infer length of an empty system")
        n = rows[0].n
    # rows are augmented with the rhs as the lowest bit
    work: list[tuple[int, int]] = []  # (pivot, augmented row), reduced form
    for r, b in zip(rows, rhs):
        if r.n != n:
            raise ValueError(f"length mismatch: {r.n} != {n}")
        v = (r.bits << 1) | (b & 1)
        for piv, row in work:
            if (v >> (n - piv)) & 1:
                v ^= row
        if v >> 1 == 0:
            if v & 1:
                return None
            continue
        piv = n - (v >> 1).bit_length()
        # keep the system fully reduced so pivots can be read off directly
        work = [(p, row ^ v) if (row >> (n - piv)) & 1 else (p, row) for p, row in work]
        work.append((piv, v))
    sol = 0
    for piv, row in work:
        if row & 1:
            sol |= 1 << (n - 1 - piv)
    return BitVec(n, sol)


# inputs as point sets: bit y of a mask stands for the input with index y

_UNIT_MASKS: dict[int, tuple[int, ...]] = {}


def unit_masks(n: int) -> tuple[int, ...]:
    """``unit_masks(n)[i]`` is the set of inputs whose coordinate i is 1."""
    if n not in _UNIT_MASKS:
        out = []
        for i in range(n):
            d = 1 << (n - 1 - i)
            block = ((1 << d) - 1) << d  # pattern of length 2d: d zeros then d ones
            m = 0
            for start in range(0, 1 << n, 2 * d):
                m |= block << start
            out.append(m)
        _UNIT_MASKS[n] = tuple(out)
    return _UNIT_MASKS[n]


def parity_mask(p: BitVec, a: int = 1) -> int:
    """Set of inputs y with ``dot(p, y) == a``."""
    units = unit_masks(p.n)
    m = 0
    for c in p.support():
        m ^= units[c]
    return m if a else m ^ ((1 << (1 << p.n)) - 1)


def mask_points(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out
