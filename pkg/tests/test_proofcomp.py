import itertools

import pytest

from liftkit import oracle
from liftkit.boolfun import apply_gadget, make_ind, make_ip
from liftkit.f2core import BitVec
from liftkit.proofcomp import (
    Cnf,
    LinearClause,
    RefutationTree,
    check_refutation,
    compose_cnf,
    composed_stats,
    contradiction,
    from_dimacs,
    reduction_check,
    refutation_error,
    refutation_from_dt,
    refutation_from_pdt,
    search_relation,
    to_dimacs,
    tseitin_cycle,
    tseitin_path,
    tseitin_triangle,
)
from liftkit.trees import DtNode, Leaf, PdtNode

IND1 = make_ind(1)


def V(s):
    return BitVec.from_str(s)


def test_cnf_validation():
    with pytest.raises(ValueError):
        Cnf(2, [(1, 3)])
    with pytest.raises(ValueError):
        Cnf(2, [(1, -1)])
    with pytest.raises(ValueError):
        Cnf(2, [(1, 1)])
    with pytest.raises(ValueError):
        Cnf(1, [(1,)], parents=(0, 0))
    c = Cnf(3, [(1, -3), (2,)])
    assert c.width == 2 and c.variables(0) == [0, 2]
    assert c.falsified(0, V("001")) and not c.falsified(0, V("101"))
    assert c.falsified_by(V("001")) == [0, 1]


def test_tseitin_triangle_unsat():
    c = tseitin_triangle()
    assert c.num_vars == 3 and len(c) == 6 and c.width == 2
    for x in range(8):
        assert c.falsified_by(BitVec(3, x))
    assert not c.satisfiable()
    assert Cnf(3, [(1, 2), (-1,)]).satisfiable()
    assert not tseitin_cycle(4).satisfiable() and not tseitin_path(3).satisfiable()
    even = tseitin_triangle([1, 1, 0])
    assert even.satisfiable()


def test_gamma_of_single_clause():
    # (x1) o IND_1: one blocking clause per block assignment with g = 0
    comp = compose_cnf(Cnf(1, [(1,)]), IND1)
    assert comp.num_vars == 3 and comp.width == 3 and len(comp) == 4
    falsifiers = ["".join("1" if l < 0 else "0" for l in cl) for cl in comp.clauses]
    assert falsifiers == ["000", "001", "100", "110"]
    assert all(IND1(V(f)) == 0 for f in falsifiers)


def test_compose_matches_filtered_enumeration():
    for c, g in ((tseitin_triangle(), IND1), (Cnf(3, [(1, -3), (2,)]), make_ip(2))):
        comp = compose_cnf(c, g)
        expected = []
        for ci, cl in enumerate(c.clauses):
            blocks = c.variables(ci)
            coords = [j * g.m + i for j in blocks for i in range(g.m)]
            for bits in itertools.product((0, 1), repeat=len(coords)):
                x = apply_gadget(g, BitVec.from_bits(bits), len(blocks))
                if all(x[bi] == (1 if cl[[abs(l) - 1 for l in cl].index(j)] < 0 else 0) for bi, j in enumerate(blocks)):
                    expected.append(tuple(-(v + 1) if b else v + 1 for v, b in zip(coords, bits)))
        assert list(comp.clauses) == expected


def test_compose_bounds_and_unsat():
    for c, g in ((contradiction(), IND1), (tseitin_triangle(), IND1), (contradiction(), make_ip(2))):
        comp = compose_cnf(c, g)
        st = composed_stats(c, g, comp)
        assert st["width"] <= st["width_bound"] == g.m * c.width
        assert st["clauses"] <= st["count_bound"]
        assert not comp.satisfiable()
        assert all(comp.parents[i] < len(c) for i in range(len(comp)))


def test_reduction_check_exhaustive():
    for c in (contradiction(), tseitin_triangle()):
        comp = compose_cnf(c, IND1)
        N = comp.num_vars
        for y in range(1 << N):
            yv = BitVec(N, y)
            assert reduction_check(c, IND1, yv, comp)
            # every y falsifies some composed clause whose parent g^n(y) falsifies
            x = apply_gadget(IND1, yv, c.num_vars)
            assert comp.falsified_by(yv) and c.falsified_by(x)


def test_search_relation():
    c = contradiction()
    rel = search_relation(c)
    assert rel.n == 1 and rel.allowed == (frozenset([0]), frozenset([1]))
    with pytest.raises(ValueError):
        search_relation(Cnf(1, [(1,)]))
    with pytest.raises(ValueError):
        search_relation(Cnf(20, [(1,), (-1,)]))


def test_refutation_of_contradiction():
    c = contradiction()
    dt = DtNode(0, Leaf(0), Leaf(1))
    r = refutation_from_dt(dt, c)
    assert r.size == dt.size == 2 and len(list(r.nodes())) == 3
    assert r.line.is_empty()
    assert check_refutation(r, c)
    with pytest.raises(ValueError):
        refutation_from_dt(DtNode(0, Leaf(1), Leaf(0)), c)


def test_corrupted_refutations_fail():
    c = contradiction()
    good = refutation_from_dt(DtNode(0, Leaf(0), Leaf(1)), c)
    swapped = RefutationTree(good.line, RefutationTree(good.c0.line, cites=1), good.c1)
    assert not check_refutation(swapped, c)
    assert "leaf" in refutation_error(swapped, c)
    single = RefutationTree(LinearClause(1), cites=0)
    assert not check_refutation(single, c)
    nonempty = RefutationTree(LinearClause(1, ((V("1"), 1),)), cites=0)
    assert refutation_error(nonempty, c) == "root line is not empty"
    bad_cite = RefutationTree(good.line, RefutationTree(good.c0.line, cites=7), good.c1)
    assert not check_refutation(bad_cite, c)
    # an inner line stronger than its children allow
    strong = RefutationTree(good.line, RefutationTree(LinearClause(1), cites=0), good.c1)
    assert not check_refutation(strong, c)


def test_refutations_from_oracle_trees():
    for c in (contradiction(), tseitin_triangle()):
        rel = search_relation(c)
        for t in (oracle.optimal_dt(rel, "size"), oracle.optimal_pdt(rel, "size"), oracle.optimal_pdt(rel)):
            r = refutation_from_pdt(t, c) if isinstance(t, PdtNode) else refutation_from_dt(t, c)
            assert check_refutation(r, c) and r.size == t.size
            assert RefutationTree.from_json(r.to_json(), c.num_vars) == r


def test_composed_contradiction_pipeline():
    c = contradiction()
    comp = compose_cnf(c, IND1)
    rel = search_relation(comp)
    t = oracle.optimal_pdt(rel, "size")
    r = refutation_from_pdt(t, comp)
    assert check_refutation(r, comp) and r.size == t.size
    assert t.size >= 2 ** oracle.dt_depth(search_relation(c))


def test_dimacs_round_trip():
    for c in (tseitin_triangle(), contradiction(), Cnf(4, [(1, -2, 4), (3,)])):
        text = to_dimacs(c, ["hello"])
        assert text.startswith("c hello\np cnf")
        back = from_dimacs(text)
        assert back.num_vars == c.num_vars and back.clauses == c.clauses
    assert from_dimacs("p cnf 2 2\n1 -2\n0\n2 0\n").clauses == ((1, -2), (2,))
    for bad in ("1 2 0\n", "p cnf 1 1\n2 0\n", "p cnf 2 2\n1 0\n"):
        with pytest.raises(ValueError):
            from_dimacs(bad)


def test_linear_clause():
    lc = LinearClause(3, ((V("110"), 1), (V("110"), 1), (V("001"), 0)))
    assert len(lc.disjuncts) == 2
    assert str(lc) == "<110,y>=1 | <001,y>=0"
    for y in itertools.product((0, 1), repeat=3):
        yv = BitVec.from_bits(y)
        assert lc.satisfied(yv) == ((y[0] ^ y[1]) == 1 or y[2] == 0)
        assert bool((lc.falsifying_mask() >> yv.bits) & 1) == (not lc.satisfied(yv))
    assert LinearClause.from_clause((1, -3), 3).disjuncts == ((V("100"), 1), (V("001"), 0))
    assert str(LinearClause(2)) == "FALSE"
