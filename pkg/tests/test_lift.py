import itertools

import pytest

from liftkit.boolfun import apply_gadget, compose_relation, make_ind, make_ip, make_maj, make_xor, relation_from_function
from liftkit.corpus import random_correct_pdt, rng_for
from liftkit.f2core import BitVec
from liftkit.lift import (
    InvariantError,
    Mode,
    SimState,
    build_lifted_dt,
    larger_child,
    row_reduce,
    simulate_path,
    witness_completion,
)
from liftkit.trees import Leaf, PdtNode, computes, pc_from_sdt, sdt_from_pdt

XOR2 = relation_from_function([0, 1, 1, 0])


def canonical():
    def target(a, j):
        return j * 3 + 1 + a

    kids = []
    for a0 in (0, 1):
        row = [PdtNode(BitVec.from_support(6, [target(a0, 0), target(a1, 1)]), Leaf(0), Leaf(1)) for a1 in (0, 1)]
        kids.append(PdtNode(BitVec.unit(6, 3), row[0], row[1]))
    return PdtNode(BitVec.unit(6, 0), kids[0], kids[1])


def test_row_reduce_examples():
    s = SimState.initial(2, 3, 1)
    P = BitVec.from_str("101000")
    assert row_reduce(P, s) == (P, 0, 0)
    assert row_reduce(BitVec.zeros(6), s) == (BitVec.zeros(6), 0, None)
    s.M.append(P)
    s.A.append(1)
    s.MARK[0].append(0)
    Pp, b, j = row_reduce(P, s)
    assert Pp == BitVec.zeros(6) and b == 1 and j is None
    Pp, b, j = row_reduce(BitVec.from_str("101010"), s)
    assert Pp == BitVec.from_str("000010") and b == 1 and j == 1
    assert row_reduce(BitVec.from_str("100010"), s) == (BitVec.from_str("100010"), 0, 0)


def test_simulate_canonical_source():
    t = canonical()
    for x in itertools.product((0, 1), repeat=2):
        r = simulate_path(t, make_ind(1), 1, list(x), check=True, exhaustive=True)
        assert r.label == x[0] ^ x[1]
        assert r.state.marks() <= t.depth
        assert set(r.queries) <= {0, 1}
        assert len(r.queries) <= r.state.marks()


def test_leaf_source():
    r = simulate_path(Leaf(1), make_ind(1), 1, [0, 0], n=2)
    assert r.label == 1 and r.queries == [] and r.state.num == 0
    res = build_lifted_dt(Leaf(1), make_ind(1), 1, n=2)
    assert res.dt == Leaf(1)
    with pytest.raises(ValueError):
        simulate_path(Leaf(1), make_ind(1), 1, [0])


def test_bad_arguments():
    t = canonical()
    with pytest.raises(ValueError):
        simulate_path(t, make_ind(1), 0, [0, 0])
    with pytest.raises(ValueError):
        simulate_path(t, make_xor(3), 1, [0, 0])
    with pytest.raises(ValueError):
        simulate_path(t, make_ip(2), 1, [0, 0])
    with pytest.raises(ValueError):
        simulate_path(t, make_ind(1), 1, [0, 0], mode="sdt-cost")
    pc = pc_from_sdt(sdt_from_pdt(t))
    with pytest.raises(ValueError):
        simulate_path(pc, make_ind(1), 1, [0, 0], mode="depth")
    with pytest.raises(ValueError):
        simulate_path(t, make_ind(1), 1, [0, 0, 1])


@pytest.mark.parametrize("mode", ["depth", "size", "deferred"])
def test_lifted_dt_computes_outer(mode):
    for name, g in (("ind", make_ind(1)), ("maj", make_maj(3)), ("ip", make_ip(2))):
        for i in range(4):
            t = random_correct_pdt(XOR2, g, rng_for(5, i, g.m))
            res = build_lifted_dt(t, g, 1, mode, check=True)
            assert computes(res.dt, XOR2), name
            assert res.dt.depth <= t.depth
            if mode != "deferred":
                assert res.dt.size <= t.size


def test_sdt_cost_mode():
    g = make_ind(1)
    for i in range(6):
        t = random_correct_pdt(XOR2, g, rng_for(6, i))
        pc = pc_from_sdt(sdt_from_pdt(t))
        res = build_lifted_dt(pc, g, 1, "sdt-cost", check=True)
        assert computes(res.dt, XOR2)
        assert res.dt.depth <= pc.cost


def test_any_edge_choice_stays_correct():
    # correctness holds whatever edge the free answers take
    g = make_ind(1)
    for i in range(4):
        t = random_correct_pdt(XOR2, g, rng_for(7, i))
        res = build_lifted_dt(t, g, 1, choose=larger_child, check=True)
        assert computes(res.dt, XOR2)
        assert res.dt.depth <= t.depth


def test_witness_completion():
    g, t = make_ind(1), canonical()
    for x in itertools.product((0, 1), repeat=2):
        st = simulate_path(t, g, 1, list(x)).state
        w = BitVec.from_bits(x)
        y = witness_completion(st, g, 1, w)
        assert apply_gadget(g, y, 2) == w
        flipped = BitVec.from_bits([1 - x[0], x[1]])
        if 0 in st.x:
            with pytest.raises(ValueError):
                witness_completion(st, g, 1, flipped)
    with pytest.raises(ValueError):
        witness_completion(st, g, 1, BitVec.zeros(3))


def test_faulty_reducer_is_caught():
    def skip_reduce(P, state, start=0, b=0):
        # never reduces: marks the first block touched by P
        for j in range(start, state.n):
            if P.block(j, state.m).bits:
                return P, b, j
        return P, b, None

    t = canonical()
    with pytest.raises(InvariantError) as err:
        for i in range(4):
            build_lifted_dt(t, make_ind(1), 1, check=True, reducer=skip_reduce)
    assert err.value.state.to_json()["M"]


def test_deferred_fires_on_overflow():
    g = make_ind(1)
    rel = compose_relation(XOR2, g)
    t = canonical()
    assert computes(t, rel)
    for x in itertools.product((0, 1), repeat=2):
        r = simulate_path(t, g, 1, list(x), mode=Mode.DEFERRED, check=True)
        assert r.label == x[0] ^ x[1]
        assert all(len(s) <= 1 for s in r.state.MARK)
