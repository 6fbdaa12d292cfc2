import pytest

from qcapelli.family import (Kind, build_family, check_reflection_equation, make_partition, parse_partition,
                             partitions_of, partitions_up_to, r_tensor, standard_r)
from qcapelli.scalar import ONE, Q, QINV, ZERO, qpow

FAMILIES = [(k, n) for k in ("ai", "aii", "diag") for n in (1, 2, 3)]


@pytest.mark.parametrize("kind,n", FAMILIES)
def test_reflection_equation(kind, n):
    assert check_reflection_equation(build_family(kind, n)) == []


def test_reflection_equation_negative_control(monkeypatch):
    fam = build_family("aii", 1)
    original = type(fam).j_entry

    def perturbed(self, r, s):
        value = original(self, r, s)
        return value * Q if (r, s) == (1, 2) else value

    monkeypatch.setattr(type(fam), "j_entry", perturbed)
    assert check_reflection_equation(fam) != []


def test_descriptor_fields():
    ai = build_family("ai", 3)
    assert (ai.N, ai.gamma_x, ai.m) == (3, Q, 4)
    assert ai.canonical == ((1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3))
    aii = build_family("aii", 1)
    assert aii.N == 2 and aii.canonical == ((1, 2),)
    assert aii.gamma_x == -QINV and aii.m == 2
    assert aii.j_entry(1, 2) == ONE and aii.j_entry(2, 1) == -Q and aii.j_entry(1, 1) == ZERO
    diag = build_family("diag", 2)
    assert diag.N == 4 and diag.canonical == ((1, 3), (1, 4), (2, 3), (2, 4))
    assert diag.in_zero_set(1, 2) and diag.in_zero_set(3, 4) and not diag.in_zero_set(1, 3)
    assert (diag.a, diag.g) == (qpow(2), qpow(2))
    assert (ai.a, ai.g) == (qpow(4), qpow(2)) and (aii.a, aii.g) == (qpow(2), qpow(4))


def test_weights():
    assert build_family("ai", 2).weight_2lambda((1, 1)) == (2, 2)
    assert build_family("aii", 2).weight_2lambda((1, 1)) == (1, 1, 1, 1)
    assert build_family("diag", 2).weight_2lambda((2, 1)) == (2, 1, 2, 1)


def test_standard_r_entries():
    assert standard_r(1, 1, 1, 1) == Q
    assert standard_r(1, 2, 1, 2) == ONE
    assert standard_r(2, 1, 1, 2) == Q - QINV
    assert standard_r(1, 2, 2, 1) == ZERO
    assert r_tensor(build_family("ai", 2))[(2, 1, 1, 2)] == Q - QINV


def test_partitions():
    assert parse_partition("2,1,0") == (2, 1)
    assert parse_partition("") == ()
    with pytest.raises(ValueError):
        parse_partition("1,2")
    with pytest.raises(ValueError):
        make_partition((1, 1, 1), 2)
    assert partitions_of(3, 2) == [(3,), (2, 1)]
    assert len(partitions_up_to(3, 2)) == 1 + 1 + 2 + 2


def test_bad_family():
    with pytest.raises(ValueError):
        build_family("bii", 2)
    with pytest.raises(ValueError):
        build_family("ai", 0)
