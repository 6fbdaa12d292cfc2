from itertools import product
from math import prod

import pytest

from qcapelli.algebras import build_tower, canonical_generators
from qcapelli.capelli import build_H, build_H2mu, quantum_determinant
from qcapelli.family import Kind, build_family, partitions_up_to
from qcapelli.freealg import NCPoly
from qcapelli.scalar import ONE, Q, QINV, ZERO, qpow
from qcapelli.uqmod import (AII_BRACKET_SCALAR, Ki, ModuleError, UExpr, btheta_generators, check_btheta_invariance,
                            derive_action_tables, module_closure, parse_uexpr, q_commutator, simple_root)


def action(kind, n):
    return derive_action_tables(build_tower(build_family(kind, n)))


def t(i, j):
    return NCPoly.generator("t", i, j)


def x(i, j):
    return NCPoly.generator("x", i, j)


def K(*beta):
    return UExpr.K(beta)


# generator formulas on the coordinate ring

def test_left_action_on_t():
    act = action("ai", 2)
    assert act.act_on_t(("E", 1), "left", ("t", 2, 1)) == {(("t", 1, 1),): ONE}
    assert act.act_on_t(("E", 1), "left", ("t", 1, 1)) == {}
    assert act.act_on_t(("K", (1, 0)), "left", ("t", 1, 2)) == {(("t", 1, 2),): Q}
    assert act.act_on_t(("F", 1), "left", ("t", 1, 2)) == {(("t", 2, 2),): ONE}


def test_right_action_on_t():
    act = action("ai", 2)
    assert act.act_on_t(("F", 1), "right", ("t", 1, 2)) == {(("t", 1, 1),): ONE}
    assert act.act_on_t(("E", 1), "right", ("t", 1, 1)) == {(("t", 1, 2),): ONE}
    assert act.act_on_t(("K", (0, 1)), "right", ("t", 1, 2)) == {(("t", 1, 2),): Q}


def test_action_on_del():
    act = action("ai", 2)
    assert act.act_on_t(("E", 1), "left", ("del", 1, 1)) == {(("del", 2, 1),): -QINV}
    assert act.act_on_t(("F", 1), "left", ("del", 2, 1)) == {(("del", 1, 1),): -Q}
    assert act.act_on_t(("K", (1, 0)), "left", ("del", 1, 2)) == {(("del", 1, 2),): QINV}


def test_out_of_range_is_zero():
    act = action("ai", 2)
    assert act.act_on_t(("F", 1), "left", ("t", 2, 2)) == {}
    assert act.act_on_t(("E", 1), "right", ("t", 1, 2)) == {}


@pytest.mark.parametrize("N", [2, 3])
def test_qdet_is_invariant_under_raising(N):
    act = action("ai", N)
    det = quantum_determinant(N)
    for i in range(1, N):
        assert act.act_right(det, ("E", i)).is_zero()
        assert act.act_right(det, ("F", i)).is_zero()
        assert act.act_left(UExpr.E(i), det).is_zero()
    beta = tuple(1 if k == 0 else 0 for k in range(N))
    assert act.act_right(det, UExpr.K(beta)) == det.scale(Q)


def test_right_action_is_a_representation():
    act = action("ai", 2)
    p = build_tower(build_family("ai", 2)).t.mul(t(1, 1), t(2, 2))
    lhs = act.act_right(p, UExpr.E(1) * UExpr.F(1))
    rhs = act.act_right(act.act_right(p, UExpr.E(1)), UExpr.F(1))
    assert lhs == rhs


# derived tables on P and D

FAMILIES = [(k, n) for k in ("ai", "aii", "diag") for n in (1, 2, 3)]


def highest_generator(fam):
    return {Kind.AI: (1, 1), Kind.AII: (1, 2), Kind.DIAG: (1, fam.n + 1)}[fam.kind]


@pytest.mark.parametrize("kind,n", FAMILIES)
def test_highest_generator_is_killed_by_raising(kind, n):
    act = action(kind, n)
    g = highest_generator(act.fam)
    for e in act.raising():
        assert act.act_left(e, x(*g)).is_zero()


def test_k_weight_on_x_and_d():
    act = action("ai", 2)
    assert act.act_left(K(1, 0), x(1, 1)) == x(1, 1).scale(qpow(2))
    assert act.act_left(K(1, 0), x(1, 2)) == x(1, 2).scale(Q)
    d = NCPoly.generator("d", 1, 1)
    assert act.act_left(K(1, 0), d) == d.scale(qpow(-2))


def test_f_moves_x11_to_x12():
    act = action("ai", 2)
    image = act.act_left(UExpr.F(1), x(1, 1))
    assert list(image.terms) == [(("x", 1, 2),)]
    assert image.coefficient((("x", 1, 2),)) != ZERO


def test_weights():
    act = action("ai", 2)
    assert act.weight_of(x(1, 2)) == (1, 1)
    assert act.weight_of(x(1, 1) * NCPoly.generator("d", 1, 1)) == (0, 0)
    assert act.weight_of(build_H(act.fam, 2).poly) == (2, 2)
    with pytest.raises(ModuleError):
        act.weight_of(x(1, 1) + x(2, 2))


def _operator(act, u, kind="x"):
    return act.degree_one_matrix(u, kind)


@pytest.mark.parametrize("kind,n", [(k, n) for k in ("ai", "aii", "diag") for n in (1, 2)])
@pytest.mark.parametrize("space", ["x", "d"])
def test_commutator_identity_on_degree_one(kind, n, space):
    act = action(kind, n)
    idx = act.fam.simple_indices()
    for i, j in product(idx, repeat=2):
        lhs = UExpr.E(i) * UExpr.F(j) - UExpr.F(j) * UExpr.E(i)
        if i == j:
            rhs = (Ki(act.N, i) - Ki(act.N, i, -1)).scale((Q - QINV).inverse())
        else:
            rhs = UExpr()
        assert _operator(act, lhs, space) == _operator(act, rhs, space)


@pytest.mark.parametrize("kind,n", [("ai", 2), ("aii", 2), ("diag", 2)])
def test_k_conjugation_on_degree_one(kind, n):
    act = action(kind, n)
    N = act.N
    for i in act.fam.simple_indices():
        for s in range(N):
            beta = tuple(1 if k == s else 0 for k in range(N))
            inv = tuple(-b for b in beta)
            alpha = simple_root(N, i)
            for gen in (UExpr.E(i), UExpr.F(i)):
                sign = 1 if gen.terms and next(iter(gen.terms))[0][0] == "E" else -1
                lhs = UExpr.K(beta) * gen * UExpr.K(inv)
                expo = sign * sum(b * a for b, a in zip(beta, alpha))
                assert _operator(act, lhs) == _operator(act, gen.scale(qpow(expo)))


@pytest.mark.parametrize("kind,n", [("ai", 2), ("aii", 1), ("aii", 2), ("diag", 2)])
def test_action_commutes_with_embedding(kind, n):
    act = action(kind, n)
    tower = act.tower
    for g in canonical_generators(act.fam, "x"):
        embedded = NCPoly._raw(tower.t.reduce_terms(tower.embed_generator("x", g[1], g[2])))
        for u in act.raising() + act.lowering():
            lhs = act.act_left(u, embedded)
            rhs = tower.embed(act.act_left(u, NCPoly.of_word((g,))))
            assert tower.t.normal_form(lhs) == tower.t.normal_form(rhs)


@pytest.mark.parametrize("kind,n", [("ai", 2), ("aii", 2), ("diag", 2)])
def test_action_is_multiplicative_on_products(kind, n):
    act = action(kind, n)
    P = act.tower.x
    gens = canonical_generators(act.fam, "x")
    for a, b in product(gens[:3], repeat=2):
        p = P.mul(NCPoly.of_word((a,)), NCPoly.of_word((b,)))
        for u in act.raising():
            lhs = act.act_left(u, p)
            Ka = act.act_left(UExpr.K(simple_root(act.N, next(iter(u.terms))[0][1])), NCPoly.of_word((a,)))
            rhs = P.mul(act.act_left(u, NCPoly.of_word((a,))), NCPoly.of_word((b,))) + P.mul(Ka, act.act_left(u, NCPoly.of_word((b,))))
            assert lhs == rhs


def test_action_preserves_degree():
    act = action("ai", 2)
    p = act.tower.xd.mul(x(1, 1), NCPoly.generator("d", 1, 2))
    for u in act.raising() + act.lowering():
        assert {len(w) for w in act.act_left(u, p).terms} <= {2}


# the coideal subalgebra

@pytest.mark.parametrize("kind,n", FAMILIES)
def test_btheta_invariance(kind, n):
    assert check_btheta_invariance(action(kind, n)) == []


def test_btheta_examples():
    ai = action("ai", 2)
    tower = ai.tower
    x11 = NCPoly._raw(tower.t.reduce_terms(tower.embed_generator("x", 1, 1)))
    b = UExpr.F(1) - UExpr.E(1) * Ki(2, 1, -1)
    assert ai.act_right(x11, b).is_zero()
    diag = action("diag", 2)
    names = [name for name, _ in btheta_generators(diag.fam)]
    assert any(name.startswith("K") for name in names)


def test_aii_bracket_scalar_is_forced():
    act = action("aii", 2)
    assert AII_BRACKET_SCALAR == QINV
    tower = act.tower
    x12 = NCPoly._raw(tower.t.reduce_terms(tower.embed_generator("x", 1, 2)))
    bracket = q_commutator(UExpr.E(1), q_commutator(UExpr.E(3), UExpr.E(2))) * Ki(4, 2, -1)
    for scalar in (qpow(3), QINV):
        b2 = UExpr.F(2) - bracket.scale(scalar)
        vanishes = tower.t.normal_form(act.act_right(x12, b2)).is_zero()
        assert vanishes == (scalar == QINV)


def test_counit():
    assert UExpr.K((1, -1)).counit() == ONE
    assert UExpr.E(1).counit() == ZERO
    assert (UExpr.one().scale(Q) + UExpr.F(1)).counit() == Q


# parsing and validation

def test_parse_uexpr():
    assert parse_uexpr("E1 F2", 3) == UExpr.E(1) * UExpr.F(2)
    assert parse_uexpr("K1^-1", 2) == UExpr.K((-1, 1))
    assert parse_uexpr("K(1,0,-1)", 3) == UExpr.K((1, 0, -1))
    with pytest.raises(ValueError):
        parse_uexpr("G1", 2)
    with pytest.raises(ValueError):
        parse_uexpr("K(1,0)", 3)


def test_diagonal_gap_is_rejected():
    act = action("diag", 2)
    assert act.fam.simple_indices() == [1, 3]
    with pytest.raises(ValueError):
        act.act_left(UExpr.E(2), x(1, 3))


# module closure against the Weyl dimension formula

def weyl_dimension(w):
    N = len(w)
    return prod((w[i] - w[j] + j - i) / (j - i) for i in range(N) for j in range(i + 1, N))


def expected_dimension(fam, mu):
    w = fam.weight_2lambda(mu)
    if fam.kind is Kind.DIAG:
        return round(weyl_dimension(w[:fam.n]) * weyl_dimension(w[fam.n:]))
    return round(weyl_dimension(w))


@pytest.mark.parametrize("kind,n", [(k, n) for k in ("ai", "aii", "diag") for n in (1, 2)])
def test_closure_matches_weyl_dimension(kind, n):
    act = action(kind, n)
    for mu in partitions_up_to(2, n):
        seed = build_H2mu(act.fam, mu).poly
        basis = module_closure(act, seed, act.lowering())
        assert len(basis) == expected_dimension(act.fam, mu), mu


def test_closure_examples():
    act = action("ai", 2)
    assert len(module_closure(act, build_H(act.fam, 2).poly, act.lowering())) == 1
    assert len(module_closure(act, build_H(act.fam, 1).poly, act.lowering())) == 3
    assert len(module_closure(act, NCPoly.constant(ONE), act.lowering() + act.raising())) == 1
