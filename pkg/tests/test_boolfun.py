import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftkit.boolfun import (
    Gadget,
    PartialAssignment,
    Relation,
    apply_gadget,
    compose_relation,
    eval_gadget,
    forces,
    gadget_relation,
    is_k_stifled,
    make_const,
    make_ind,
    make_ip,
    make_maj,
    make_xor,
    max_stifling,
    parse_gadget,
    partial_relation,
    random_gadget,
    relation_from_function,
    stifle,
    stifling_counterexample,
)
from liftkit.f2core import BitVec


def V(s):
    return BitVec.from_str(s)


def all_gadgets(m):
    for t in range(1 << (1 << m)):
        yield Gadget(m, tuple((t >> i) & 1 for i in range(1 << m)))


def test_eval_examples():
    assert eval_gadget(make_ind(1), V("010")) == 1
    assert eval_gadget(make_ip(2), V("1111")) == 0
    assert eval_gadget(make_maj(3), V("110")) == 1
    with pytest.raises(ValueError):
        eval_gadget(make_ind(1), V("01"))


def test_ind_layout():
    g = make_ind(1)
    assert g.m == 3
    for y1, y2 in itertools.product((0, 1), repeat=2):
        assert g(BitVec.from_bits([1, y1, y2])) == y2
        assert g(BitVec.from_bits([0, y1, y2])) == y1
    g2 = make_ind(2)
    assert g2.m == 6
    # address 10 (= 2) selects the third target
    assert g2(V("10" + "0010")) == 1
    assert g2(V("10" + "1101")) == 0


def test_ip_and_maj_definitions():
    g = make_ip(2)
    for x in range(16):
        b = BitVec(4, x)
        assert g(b) == (b[0] & b[2]) ^ (b[1] & b[3])
    for n in (1, 3, 4, 5):
        g = make_maj(n)
        for x in range(1 << n):
            assert g(BitVec(n, x)) == int(2 * bin(x).count("1") >= n)


def test_bad_arity():
    for mk in (make_ind, make_ip, make_maj, make_xor):
        with pytest.raises(ValueError):
            mk(0)
    with pytest.raises(ValueError):
        Gadget(2, (0, 1, 1))


def test_random_gadget_is_deterministic():
    assert random_gadget(3, 11).table == random_gadget(3, 11).table
    tables = {random_gadget(6, s).table for s in range(5)}
    assert len(tables) > 1


def test_parse_gadget():
    assert parse_gadget("ind:1") == make_ind(1)
    assert parse_gadget("ip:2").table == make_ip(2).table
    assert parse_gadget("maj:3").table == make_maj(3).table
    assert parse_gadget("xor:2").table == (0, 1, 1, 0)
    assert parse_gadget("random:4:9").table == random_gadget(4, 9).table
    assert parse_gadget("table:0110").table == (0, 1, 1, 0)
    for bad in ("ind", "foo:2", "ind:x", "table:012"):
        with pytest.raises(ValueError):
            parse_gadget(bad)


def test_gadget_json_round_trip():
    g = make_ip(2)
    assert g.to_json() == {"m": 4, "table": g.table_str()}
    assert Gadget.from_json(g.to_json()).table == g.table


def test_stifling_examples():
    assert is_k_stifled(make_ind(1), 1)
    assert not is_k_stifled(make_ind(1), 2)
    assert is_k_stifled(make_ip(2), 1)
    assert not is_k_stifled(make_ip(2), 2)
    assert is_k_stifled(make_maj(3), 1)
    assert not is_k_stifled(make_const(2, 0), 0)
    assert max_stifling(make_ind(2)) == 2
    assert max_stifling(make_maj(5)) == 2
    assert max_stifling(make_xor(2)) == 0
    assert max_stifling(make_const(3, 1)) == -1


def test_counterexample_is_a_real_failure():
    g = make_ip(2)
    S, b = stifling_counterexample(g, 2)
    assert not forces(g, S, b)


def _forces_brute(g, S, b):
    rest = [i for i in range(g.m) if i not in S]
    for z in itertools.product((0, 1), repeat=len(rest)):
        ok = True
        for w in itertools.product((0, 1), repeat=len(S)):
            x = [0] * g.m
            for i, v in zip(rest, z):
                x[i] = v
            for i, v in zip(S, w):
                x[i] = v
            if g(BitVec.from_bits(x)) != b:
                ok = False
                break
        if ok:
            return True
    return False


def test_forcing_mask_matches_brute_force():
    for m in (1, 2, 3):
        for g in all_gadgets(m):
            for k in range(m + 1):
                for S in itertools.combinations(range(m), k):
                    for b in (0, 1):
                        assert forces(g, S, b) == _forces_brute(g, S, b)


def test_subset_monotonicity():
    for m in range(1, 5):
        for g in all_gadgets(m):
            for k in range(1, m + 1):
                if is_k_stifled(g, k):
                    assert is_k_stifled(g, k - 1)


def test_stifle_examples():
    assert str(stifle(make_ind(1), [0], 0)) == "*00"
    assert str(stifle(make_ip(2), [0], 1)) == "*101"
    g = make_maj(3)
    for b in (0, 1):
        pa = stifle(g, [], b)
        assert pa.free() == ()
        first = next(x for x in range(8) if g(BitVec(3, x)) == b)
        assert str(pa) == format(first, "03b")
    with pytest.raises(ValueError):
        stifle(make_ip(2), [0, 1], 1)


def test_stifle_output_forces_everywhere():
    for m in (2, 3, 4):
        for seed in range(20):
            g = random_gadget(m, seed)
            for k in range(m + 1):
                for S in itertools.combinations(range(m), k):
                    for b in (0, 1):
                        if forces(g, S, b):
                            pa = stifle(g, S, b, verify=True)
                            assert pa.free() == S
                            assert all(g(z) == b for z in pa.completions())


def test_partial_assignment():
    pa = PartialAssignment.from_str("1*0*")
    assert str(pa) == "1*0*"
    assert pa.free() == (1, 3)
    assert sorted(str(z) for z in pa.completions()) == ["1000", "1001", "1100", "1101"]
    assert pa.is_completion(V("1101")) and not pa.is_completion(V("0101"))


def test_relations():
    r = relation_from_function([0, 1, 1, 0])
    assert r(V("01")) == {1}
    assert r.alphabet == (0, 1)
    p = partial_relation(2, {"00": 0, "11": 1})
    assert p(V("01")) == {0, 1} and p(V("11")) == {1}
    assert all(s == {0, 1} for s in partial_relation(2, {}).allowed)
    with pytest.raises(ValueError):
        Relation(1, (0, 1), (frozenset(), frozenset([1])))
    with pytest.raises(ValueError):
        relation_from_function([0, 1, 1])
    assert Relation.from_json(r.to_json()) == r


def test_compose_examples():
    xor2 = relation_from_function([0, 1, 1, 0])
    c = compose_relation(xor2, make_ind(1))
    assert c.n == 6
    assert c(V("010101")) == {0}
    const = relation_from_function([1, 1])
    assert set().union(*compose_relation(const, make_maj(3)).allowed) == {1}
    assert compose_relation(relation_from_function([0, 1, 1, 0]), make_ind(1)).n == 6


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32 - 1), st.integers(0, 2**32 - 1))
def test_compose_round_trip(n, m, fseed, gseed):
    if n * m > 12:
        return
    g = random_gadget(m, gseed)
    f = gadget_relation(random_gadget(n, fseed))
    c = compose_relation(f, g)
    for y in range(1 << (n * m)):
        yv = BitVec(n * m, y)
        assert c(yv) == f(apply_gadget(g, yv, n))
