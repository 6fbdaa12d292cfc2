from itertools import permutations

import pytest
from hypothesis import given, strategies as st

from qcapelli.family import build_family, partitions_up_to
from qcapelli.knopsahi import (InterpolationError, family_parameters, knop_sahi, monomial_symmetric, point,
                               verify_theorem_b)
from qcapelli.scalar import ONE, Q, ZERO, SymPoly, qpow


def test_monomial_symmetric_examples():
    assert monomial_symmetric((1,), 2) == SymPoly(2, {(1, 0): ONE, (0, 1): ONE})
    assert monomial_symmetric((1, 1), 2) == SymPoly(2, {(1, 1): ONE})
    assert monomial_symmetric((2, 0), 2) == SymPoly(2, {(2, 0): ONE, (0, 2): ONE})
    with pytest.raises(ValueError):
        monomial_symmetric((1, 1, 1), 2)


def test_point_is_componentwise():
    a = qpow(4)
    assert point((2, 1), 3, a) == [qpow(8), qpow(4), ONE]


def test_empty_partition_is_one():
    p = knop_sahi((), 2, qpow(4), qpow(2))
    assert p.in_x == SymPoly(2, {(0, 0): ONE})


def test_rank_one_degree_one():
    a = qpow(4)
    p = knop_sahi((1,), 1, a, qpow(2))
    c = (a - 1).inverse()
    assert p.in_x == SymPoly(1, {(1,): c, (0,): -c})


def test_rank_one_degree_two_product_form():
    a = qpow(2)
    p = knop_sahi((2,), 1, a, qpow(4))
    x = SymPoly(1, {(1,): ONE})
    one = SymPoly(1, {(0,): ONE})
    expected = ((x - one) * (x - one.scale(a))).scale(((a * a - 1) * (a * a - a)).inverse())
    assert p.in_x == expected


def test_unnormalized_keeps_value():
    p = knop_sahi((1,), 2, qpow(4), qpow(2), normalized=False)
    assert p.value_at_lambda != ZERO and not p.normalized
    q = knop_sahi((1,), 2, qpow(4), qpow(2))
    assert p.in_x.scale(p.value_at_lambda.inverse()) == q.in_x


def test_bad_parameters():
    with pytest.raises(ValueError):
        knop_sahi((1,), 1, ZERO, Q)


def test_degenerate_system_is_reported():
    # with a = 1 every vanishing point collapses to (1, ..., 1)
    with pytest.raises(InterpolationError):
        knop_sahi((2,), 1, ONE, Q)


def _check(p, lam, n, a, g):
    assert p.kernel_dim == 1
    assert p.basis_size - p.conditions == 1
    assert p.in_x.degree() == sum(lam)
    assert p.in_y.is_symmetric()
    for mu in partitions_up_to(sum(lam), n):
        value = p.evaluate(point(mu, n, a))
        assert value == (ONE if mu == lam else ZERO)


@pytest.mark.parametrize("kind", ["ai", "aii", "diag"])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_family_parameters(kind, n):
    a, g, m = family_parameters(build_family(kind, n))
    for lam in partitions_up_to(3, n):
        _check(knop_sahi(lam, n, a, g), lam, n, a, g)


@given(st.integers(1, 5), st.integers(1, 5), st.sampled_from(partitions_up_to(3, 2)))
def test_vanishing_and_symmetry(i, j, lam):
    a, g = qpow(i), qpow(j)
    _check(knop_sahi(lam, 2, a, g), lam, 2, a, g)


def test_symmetry_under_transpositions_in_y():
    p = knop_sahi((2, 1), 3, qpow(4), qpow(2))
    for perm in permutations(range(3)):
        moved = SymPoly(3, {tuple(m[k] for k in perm): c for m, c in p.in_y.terms.items()})
        assert moved == p.in_y


def test_x_form_is_not_symmetric_in_general():
    p = knop_sahi((1,), 2, qpow(4), qpow(2))
    assert not p.in_x.is_symmetric()


@pytest.mark.parametrize("kind", ["ai", "aii", "diag"])
def test_eigenvalues_match_interpolation_rank_one(kind):
    cells = verify_theorem_b(build_family(kind, 1), 3, 5)
    assert cells and all(c.ok for c in cells)
