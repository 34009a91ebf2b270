import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sl2growth.constructions import build_subgroup, catalog, coset_core_set, splus2
from sl2growth.errors import NotASubgroup, NotCentrallyClosed, SymmetryViolation, TableMismatch, XInH
from sl2growth.growth import (
    ElementSet,
    analyze,
    closure,
    coset_core,
    delta_greater,
    delta_ratio,
    double_coset,
    double_cosets,
    format_set,
    frobenius_size,
    generated_by,
    generates,
    intersect_conjugate,
    is_subgroup,
    parse_set_text,
    product,
    psl_project,
    read_set_file,
    triple,
    write_set_file,
)
from sl2growth.search import published_optimum
from sl2growth.sl2 import GroupElement, enumerate_group


def brute_product(A, B):
    return {A.table.index(a * b) for a in A.elements() for b in B.elements()}


def brute_closure(S):
    t = S.table
    seen = {t.identity}
    frontier = [t[t.identity]]
    gens = S.elements()
    while frontier:
        nxt = []
        for g in frontier:
            for s in gens:
                h = g * s
                if t.index(h) not in seen:
                    seen.add(t.index(h))
                    nxt.append(h)
        frontier = nxt
    return seen


def random_subset(t, rng, k):
    return ElementSet.from_indices(t, rng.sample(range(len(t)), k))


def symmetrize(S):
    return S | S.inverse()


subset_seeds = st.integers(0, 10**9)


@given(subset_seeds, st.integers(1, 40), st.integers(1, 40))
def test_product_matches_brute_force(seed, ka, kb):
    t = enumerate_group(5)
    rng = random.Random(seed)
    A, B = random_subset(t, rng, ka), random_subset(t, rng, kb)
    assert set((A * B).indices().tolist()) == brute_product(A, B)


@given(subset_seeds, st.integers(1, 30))
def test_set_algebra_laws(seed, k):
    t = enumerate_group(7)
    rng = random.Random(seed)
    A, B, C = (random_subset(t, rng, k) for _ in range(3))
    assert (A | B) & C == (A & C) | (B & C)
    assert A - B <= A and (A - B).isdisjoint(B)
    assert (A * B).inverse() == B.inverse() * A.inverse()
    assert A.inverse().inverse() == A
    assert (A * B) * C == A * (B * C)
    assert hash(A | B) == hash(B | A)


@given(subset_seeds, st.integers(1, 20))
def test_symmetric_chain(seed, k):
    t = enumerate_group(5)
    S = symmetrize(random_subset(t, random.Random(seed), k)).with_elements(t.identity)
    rep = analyze(S)
    assert rep.symmetric and rep.contains_identity
    assert rep.sizeS <= rep.sizeS2 <= rep.sizeS3
    S3 = triple(S)
    assert S <= product(S, S) <= S3 and S3.is_symmetric()


@given(subset_seeds, st.integers(1, 12))
def test_closure_matches_bfs_oracle(seed, k):
    t = enumerate_group(5)
    S = random_subset(t, random.Random(seed), k)
    C = closure(S)
    assert set(C.indices().tolist()) == brute_closure(S)
    assert is_subgroup(C)
    assert generates(S) == (C.size == 120) == analyze(S).generates


def test_large_sets_fill_the_group(g5):
    rng = random.Random(0)
    A, B = random_subset(g5, rng, 61), random_subset(g5, rng, 60)
    assert (A * B).size == 120


def test_trivial_products_and_triples(g17, opt17):
    I = ElementSet.from_indices(g17, [g17.identity])
    B = random_subset(g17, random.Random(3), 50)
    assert I * B == B
    Z = ElementSet.from_indices(g17, [g17.identity, g17.minus_identity])
    assert triple(Z) == Z
    H = opt17.H.elements
    assert triple(H) == H
    assert triple(opt17.S).size == 224
    rep = analyze(I)
    assert (rep.sizeS3, rep.generates, rep.delta_ratio) == (1, False, 1.0)


def test_reports():
    rep = analyze(published_optimum())
    assert (rep.sizeS, rep.sizeS3) == (30, 114)
    assert rep.delta_ratio == pytest.approx(math.log(114) / math.log(30), abs=1e-9)
    assert rep.generates and rep.sizeS3 < 120
    d = rep.to_dict()
    assert d["sizeS3"] == 114 and '"sizeS": 30' in rep.to_json()


def test_optimal_report(opt17):
    rep = analyze(opt17.S)
    assert rep.delta_ratio == pytest.approx((5 + math.log2(7)) / 6, abs=1e-9)


def test_closure_examples(g17, opt17):
    H = opt17.H.elements
    assert closure(H) == H
    assert closure(H.with_elements(opt17.x)).size == len(g17)
    Z = closure(ElementSet.from_indices(g17, [g17.minus_identity]))
    assert set(Z.indices().tolist()) == {g17.identity, g17.minus_identity}
    assert generated_by(g17, []).size == 1


def test_double_coset_examples(g17, opt17):
    H, x = opt17.H.elements, opt17.x
    assert double_coset(H, g17.identity) == H
    assert double_coset(H, x).size == 144
    assert frobenius_size(H, H, x) == 144
    assert frobenius_size(H, H, g17.identity) == 48
    one = ElementSet.from_indices(g17, [g17.identity])
    assert all(frobenius_size(one, one, i) == 1 for i in range(0, len(g17), 97))
    L = intersect_conjugate(H, x)
    assert L.size == 16 and is_subgroup(L)
    assert intersect_conjugate(H, H.elements()[5]) == H
    assert coset_core(H, x).size == 16


def test_normalizing_x_gives_full_coset(g13):
    U = build_subgroup("upper_triangular", 13).elements
    N = build_subgroup("unipotent", 13).elements
    x = GroupElement.diag(2, 13)  # in U, so it normalises N
    assert double_coset(N, x).size == N.size
    assert coset_core(N, x) == N.left(x)
    Z = ElementSet.from_indices(g13, [g13.identity, g13.minus_identity])
    y = GroupElement.of(((1, 1), (1, 2)), 13)
    assert coset_core(Z, y) == ElementSet.from_elements(g13, [y, -y])
    with pytest.raises(XInH):
        coset_core(U, x)


def test_upper_triangular_index(g13):
    U = build_subgroup("upper_triangular", 13).elements
    rng = random.Random(13)
    outside = np.flatnonzero(~U.bits).tolist()
    for _ in range(20):
        assert intersect_conjugate(U, rng.choice(outside)).size == 12


def test_double_cosets_partition(g5):
    for spec in catalog(5):
        H = spec.elements
        parts = double_cosets(H)
        total = sum(D.bits.astype(int) for D in parts)
        assert (total == 1).all()
        for D in parts:
            x = int(D.indices()[0])
            assert D.size == frobenius_size(H, H, x)


@pytest.mark.parametrize("p", [5, 13, 17])
def test_frobenius_agreement(p):
    specs = [s for s in catalog(p) if s.order <= 2 * p * p]
    t = enumerate_group(p)
    rng = random.Random(p)
    for _ in range(200):
        H, L = rng.choice(specs).elements, rng.choice(specs).elements
        x = rng.randrange(len(t))
        assert double_coset(H, x, L).size == frobenius_size(H, L, x)


@pytest.mark.parametrize("p", [13, 17])
def test_triple_decomposition_when_square_in_subgroup(p):
    t = enumerate_group(p)
    rng = random.Random(p)
    for spec in catalog(p):
        H = spec.elements
        if H.size > 200:
            continue
        cands = np.flatnonzero(~H.bits)
        cands = cands[H.bits[t.mul_idx(cands, cands)]]
        for xi in rng.sample(cands.tolist(), min(3, len(cands))):
            x = t[xi]
            if x.order() <= 2:
                continue
            S = splus2(spec, x)
            expect = H | double_coset(H, x) | H.conjugate(x)
            assert triple(S) == expect
            # adding the coset core leaves the triple product alone
            assert triple(coset_core_set(spec, x)) == expect


def test_psl_projection(g17, opt17):
    assert psl_project(opt17.S) == (32, 112)
    Z = ElementSet.from_indices(g17, [g17.identity, g17.minus_identity])
    assert psl_project(Z) == (1, 1)
    assert psl_project(ElementSet.full(g17)) == (len(g17) // 2, len(g17) // 2)
    with pytest.raises(NotCentrallyClosed):
        psl_project(ElementSet.from_indices(g17, [g17.identity]))
    with pytest.raises(SymmetryViolation):
        psl_project(ElementSet.from_elements(g17, [GroupElement.upper(1, 1, 17)]))


def test_subgroup_checks(g5):
    S = ElementSet.from_elements(g5, [GroupElement.upper(1, 1, 5)])
    assert not is_subgroup(S)
    with pytest.raises(NotASubgroup):
        double_coset(S, 0)
    with pytest.raises(TableMismatch):
        S | ElementSet.empty(enumerate_group(7))


def test_delta_helpers():
    assert delta_ratio(1, 1) == 1.0
    assert delta_ratio(64, 224) == pytest.approx((5 + math.log2(7)) / 6)
    assert delta_greater(66, 450, 64, 224)
    assert not delta_greater(64, 224, 64, 224)
    # equal ratios in different guises: 8^3 vs 4^... log 512/log 8 == log 64/log 4
    assert not delta_greater(8, 512, 4, 64)
    assert not delta_greater(4, 64, 8, 512)
    assert delta_greater(8, 513, 4, 64)


def test_set_file_roundtrip(tmp_path, opt17):
    S = opt17.S
    path = tmp_path / "s.txt"
    write_set_file(S, path)
    T = read_set_file(path)
    assert np.array_equal(T.bits, S.bits)
    text = "# comment\np = 5\n\n[[1, 0], [0, 1]]  # identity\n[[4,0],[0,4]]\n"
    U = parse_set_text(text)
    assert U.size == 2 and U.contains_identity()
    assert format_set(U) == "p=5\n[[1,0],[0,1]]\n[[4,0],[0,4]]\n"
    with pytest.raises(ValueError):
        parse_set_text("[[1,0],[0,1]]\n")
