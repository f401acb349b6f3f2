import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftkit.f2core import (
    BitVec,
    F2Basis,
    concat,
    dot,
    express_in_basis,
    in_span,
    mask_points,
    parity_mask,
    pivot_columns,
    rank,
    solve,
    unit_masks,
    xor,
)


def V(s):
    return BitVec.from_str(s)


@st.composite
def vectors(draw, n=None, count=1):
    n = draw(st.integers(1, 64)) if n is None else n
    vs = [BitVec(n, draw(st.integers(0, (1 << n) - 1))) for _ in range(count)]
    return vs


def all_vectors(n):
    return [BitVec(n, i) for i in range(1 << n)]


def test_bitvec_text_and_index():
    v = V("1011")
    assert str(v) == "1011"
    assert v.bits == 0b1011
    assert list(v) == [1, 0, 1, 1]
    assert v[0] == 1 and v[1] == 0
    assert v.support() == [0, 2, 3]
    assert v.weight() == 3
    assert BitVec.from_bits([1, 0, 1, 1]) == v
    assert BitVec.unit(4, 1) == V("0100")
    assert BitVec.from_support(4, [0, 3]) == V("1001")
    assert v.restrict([3, 0]) == V("11")
    assert concat([V("10"), V("011")]) == V("10011")
    assert V("110011").block(1, 3) == V("011")
    assert V("0010").leading() == 2
    assert BitVec.zeros(3).leading() == -1


def test_bitvec_rejects_bad_input():
    with pytest.raises(ValueError):
        BitVec.from_str("10a")
    with pytest.raises(ValueError):
        BitVec(2, 4)
    with pytest.raises(IndexError):
        V("101")[3]


def test_xor_examples():
    assert xor(V("101"), V("011")) == V("110")
    x = V("1101")
    assert xor(x, x) == BitVec.zeros(4)
    assert xor(x, BitVec.zeros(4)) == x
    with pytest.raises(ValueError):
        xor(V("10"), V("101"))


def test_dot_examples():
    assert dot(V("110"), V("011")) == 1
    assert dot(V("101"), V("000")) == 0
    assert dot(V("1111"), V("1111")) == 0
    with pytest.raises(ValueError):
        dot(V("1"), V("11"))


def test_in_span_examples():
    rows = [V("100"), V("010")]
    assert in_span(V("110"), rows)
    assert not in_span(V("001"), rows)
    assert in_span(V("000"), F2Basis(3))
    with pytest.raises(ValueError):
        in_span(V("11"), rows)


def test_express_examples():
    assert express_in_basis(V("110"), [V("100"), V("010"), V("110")]) == {0, 1}
    assert express_in_basis(V("000"), [V("101"), V("011")]) == frozenset()
    assert express_in_basis(V("001"), [V("100"), V("010")]) is None


def test_pivot_columns_examples():
    assert pivot_columns([V("101")]) == (0,)
    assert pivot_columns([V("110"), V("011")]) == (0, 1)
    assert pivot_columns([V("100"), V("010"), V("001")]) == (0, 1, 2)
    with pytest.raises(ValueError):
        pivot_columns([V("110"), V("011"), V("101")])


def test_solve_examples():
    assert solve([V("10"), V("01")], [1, 0]) == V("10")
    assert solve([V("11")], [1]) == V("10")
    assert solve([V("10"), V("10")], [0, 1]) is None
    with pytest.raises(ValueError):
        solve([V("10")], [1, 0])


def test_bilinearity_exhaustive_small():
    for n in range(1, 5):
        vs = all_vectors(n)
        for a, b, c in itertools.product(vs, repeat=3):
            assert xor(xor(a, b), c) == xor(a, xor(b, c))
            assert xor(a, b) == xor(b, a)
            assert dot(xor(a, b), c) == dot(a, c) ^ dot(b, c)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 64).flatmap(lambda n: vectors(n=n, count=3)))
def test_bilinearity_random(vs):
    a, b, c = vs
    assert xor(xor(a, b), c) == xor(a, xor(b, c))
    assert xor(a, a) == BitVec.zeros(a.n)
    assert dot(xor(a, b), c) == dot(a, c) ^ dot(b, c)
    assert dot(a, b) == dot(b, a)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(vectors(n=n, count=1), st.integers(0, 6).flatmap(lambda k: vectors(n=n, count=k)))))
def test_express_sums_to_target(args):
    (t,), rows = args
    S = express_in_basis(t, rows)
    if S is None:
        assert not in_span(t, rows)
    else:
        acc = BitVec.zeros(t.n)
        for i in S:
            acc = acc ^ rows[i]
        assert acc == t


def _independent_rows(n, vs):
    basis = F2Basis(n)
    return [v for v in vs if basis.add(v)]


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 16).flatmap(lambda n: vectors(n=n, count=8)))
def test_pivot_columns_give_full_rank_restriction(vs):
    rows = _independent_rows(vs[0].n, vs)
    cols = pivot_columns(rows)
    assert len(cols) == len(rows)
    assert rank([r.restrict(cols) for r in rows], len(cols)) == len(rows)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 12).flatmap(lambda n: st.tuples(vectors(n=n, count=6), st.lists(st.integers(0, 1), min_size=6, max_size=6))))
def test_solve_satisfies_or_is_inconsistent(args):
    rows, rhs = args
    n = rows[0].n
    sol = solve(rows, rhs)
    if sol is not None:
        assert all(dot(r, sol) == b for r, b in zip(rows, rhs))
    else:
        aug = [BitVec(n + 1, (r.bits << 1) | b) for r, b in zip(rows, rhs)]
        assert rank(rows, n) < rank(aug, n + 1)


def test_basis_rank_and_pivots_increase():
    b = F2Basis(4, [V("0110"), V("1100"), V("1010"), V("0001")])
    assert b.rank == 3
    assert b.pivots == sorted(b.pivots) and len(set(b.pivots)) == 3


def test_point_masks():
    for n in range(1, 5):
        units = unit_masks(n)
        for i in range(n):
            assert mask_points(units[i]) == [y for y in range(1 << n) if BitVec(n, y)[i]]
        for p in all_vectors(n):
            ones = [y for y in range(1 << n) if dot(p, BitVec(n, y))]
            assert mask_points(parity_mask(p)) == ones
            assert mask_points(parity_mask(p, 0)) == [y for y in range(1 << n) if y not in ones]
