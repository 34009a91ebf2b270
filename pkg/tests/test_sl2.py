import itertools
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sl2growth.constructions import _two_dot_s4_generators
from sl2growth.errors import BudgetExceeded, MatrixParseError, ModulusMismatch, NotInSL2
from sl2growth.field import Fp
from sl2growth.sl2 import (
    GroupElement,
    GroupTable,
    conj,
    element_order,
    enumerate_group,
    format_matrix,
    group_order,
    inv,
    mul,
    parse_matrix,
)


def brute_sl2(p):
    return sorted(m for m in itertools.product(range(p), repeat=4) if (m[0] * m[3] - m[1] * m[2]) % p == 1)


@pytest.mark.parametrize("p,order", [(3, 24), (5, 120), (7, 336), (17, 4896)])
def test_group_order(p, order):
    assert group_order(p) == order
    assert len(enumerate_group(p)) == order


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_enumeration_is_lexicographic_and_complete(p):
    t = enumerate_group(p)
    assert [tuple(r) for r in t.entries.tolist()] == brute_sl2(p)


@pytest.mark.parametrize("p", [13, 17])
def test_enumeration_distinct_det_one(p):
    e = enumerate_group(p).entries
    assert ((e[:, 0] * e[:, 3] - e[:, 1] * e[:, 2]) % p == 1).all()
    assert len({tuple(r) for r in e.tolist()}) == len(e)


@pytest.mark.parametrize("p", [5, 13, 17])
def test_index_roundtrip(p):
    t = enumerate_group(p)
    idx = np.arange(len(t))
    e = t.entries
    assert (t.index_arrays(e[:, 0], e[:, 1], e[:, 2], e[:, 3]) == idx).all()
    for i in random.Random(p).sample(range(len(t)), 50):
        assert t.index(t[i]) == i


def test_budget():
    with pytest.raises(BudgetExceeded):
        GroupTable(211, budget=10**6)


def test_entries_are_reduced_and_det_checked():
    g = GroupElement(6, -1, 0, 1, 5)
    assert (g.a, g.b) == (1, 4)
    with pytest.raises(NotInSL2):
        GroupElement(1, 1, 1, 1, 5)
    with pytest.raises(NotInSL2):
        GroupElement.of(((1, -2), (-1, -1)), 13)


def test_matrix_text_format():
    g = parse_matrix(" [[ 1, 2 ],\n [3, 7]] ", 5)
    assert format_matrix(g) == "[[1,2],[3,2]]" == str(g)
    assert parse_matrix(str(g), 5) == g
    for bad in ("[[1,2],[3]]", "1 2 3 4", "[[a,b],[c,d]]", ""):
        with pytest.raises(MatrixParseError):
            parse_matrix(bad, 5)
    with pytest.raises(NotInSL2):
        parse_matrix("[[1,1],[1,1]]", 5)


def test_small_examples():
    p = 5
    I = GroupElement.identity(p)
    m = GroupElement.minus_identity(p)
    d = GroupElement.of(((2, 0), (0, 3)), p)
    assert inv(d) == GroupElement.of(((3, 0), (0, 2)), p)
    assert inv(I) == I and inv(m) == m
    assert element_order(I) == 1 and element_order(m) == 2
    assert mul(d, inv(d)) == I and d * I == d
    assert conj(m, d) == m and conj(d, I) == d
    with pytest.raises(ModulusMismatch):
        d * GroupElement.identity(7)


def test_antidiag_squares_to_minus_identity():
    p = 17
    for v in range(1, p):
        x = GroupElement.antidiag(v, p)
        assert x * x == GroupElement.minus_identity(p)


def test_conjugation_by_antidiag_formula():
    p = 17
    F = Fp(p)
    rng = random.Random(1)
    t = enumerate_group(p)
    for _ in range(100):
        v = F(rng.randrange(1, p))
        x = GroupElement.antidiag(v, p)
        m = t[rng.randrange(len(t))]
        expect = GroupElement(m.d, -m.c * int(v * v), -m.b * int((v * v).inverse()), m.a, p)
        assert m.conj(x) == expect


def test_two_dot_s4_generators_have_order_eight():
    a, b = _two_dot_s4_generators(17)
    assert element_order(a) == element_order(b) == 8


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17])
def test_unique_involution(p):
    t = enumerate_group(p)
    idx = np.arange(len(t))
    sq = t.mul_idx(idx, idx)
    order_two = np.flatnonzero((sq == t.identity) & (idx != t.identity))
    assert order_two.tolist() == [t.minus_identity]


@pytest.mark.parametrize("p", [5, 13, 17])
def test_associativity_and_inverse_arrays(p):
    t = enumerate_group(p)
    rng = np.random.default_rng(p)
    i, j, k = rng.integers(0, len(t), size=(3, 1000))
    assert (t.mul_idx(t.mul_idx(i, j), k) == t.mul_idx(i, t.mul_idx(j, k))).all()
    assert (t.mul_idx(i, t.inverse[i]) == t.identity).all()
    assert (t.negation[i] == t.mul_idx(i, t.minus_identity)).all()


def test_cayley_matches_arithmetic(g5):
    assert g5.cayley is not None
    for i, j in itertools.product(range(0, 120, 7), range(0, 120, 5)):
        assert g5.cayley[i, j] == g5.index(g5[i] * g5[j])


def test_conjugation_is_a_bijection(g5):
    idx = np.arange(len(g5))
    for x in range(len(g5)):
        assert len(set(g5.conj_idx(idx, x).tolist())) == len(g5)


@given(st.sampled_from([5, 7, 13, 17]), st.data())
def test_element_methods_agree_with_table(p, data):
    t = enumerate_group(p)
    i = data.draw(st.integers(0, len(t) - 1))
    j = data.draw(st.integers(0, len(t) - 1))
    g, h = t[i], t[j]
    assert t.index(g * h) == t.mul_idx(i, j)
    assert t.index(g.conj(h)) == t.conj_idx(i, j)
    n = g.order()
    assert g ** n == GroupElement.identity(p) and (g ** -1) == g.inverse()
    assert (p * (p * p - 1)) % n == 0
